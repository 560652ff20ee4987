#pragma once

#include <cmath>

#include "steklov/errors.hpp"

namespace steklov {

inline void check_radii(double r1, double r2) {
  if (!(std::isfinite(r1) && std::isfinite(r2) && r1 > 0.0 && r1 < r2)) {
    throw InvalidAnnulus("radii must satisfy 0 < r1 < r2");
  }
}

// First eigenvalue of the concentric annulus, the maximum over all offsets.
inline double concentric_value(double r1, double r2) {
  check_radii(r1, r2);
  return 1.0 / (r2 * std::log(r2 / r1));
}

// Asymptotic lower bound on liminf sigma as the boundaries approach.
inline double liminf_lower(double r1, double r2) {
  check_radii(r1, r2);
  return r1 / (2.0 * r2 * (r2 - r1));
}

}  // namespace steklov
