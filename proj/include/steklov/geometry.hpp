#pragma once

#include <cmath>
#include <sstream>

#include "steklov/errors.hpp"

namespace steklov {

// Outer disk B(0, r2) with an inner disk of radius r1 whose centre is
// offset by t along the first axis.
struct Annulus {
  double r1 = 0.0;
  double r2 = 0.0;
  double t = 0.0;

  // Width of the thinnest part of the annulus.
  double eps() const { return r2 - r1 - t; }
};

inline void validate(const Annulus& a) {
  const bool ok = std::isfinite(a.r1) && std::isfinite(a.r2) &&
                  std::isfinite(a.t) && a.r1 > 0.0 && a.r1 < a.r2 &&
                  a.t >= 0.0 && a.t < a.r2 - a.r1;
  if (!ok) {
    std::ostringstream msg;
    msg << "invalid annulus (r1=" << a.r1 << ", r2=" << a.r2 << ", t=" << a.t
        << "): need 0 < r1 < r2 and 0 <= t < r2 - r1";
    throw InvalidAnnulus(msg.str());
  }
}

inline Annulus make_annulus(double r1, double r2, double t) {
  Annulus a{r1, r2, t};
  validate(a);
  return a;
}

// Bipolar frame with poles at (+-alpha, 0).  The inner circle is the level
// set xi = xi1, the outer circle xi = xi2, and the annulus is the strip
// xi2 < xi < xi1.
struct BipolarFrame {
  double alpha = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;

  double gap() const { return xi1 - xi2; }
  // Abscissa of the centre of the circle xi = const.
  double centre(double xi) const { return alpha / std::tanh(xi); }
  double radius(double xi) const { return alpha / std::sinh(xi); }
};

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

inline BipolarFrame bipolar_frame(const Annulus& a) {
  validate(a);
  if (a.t == 0.0) {
    throw DegenerateFrame(
        "bipolar frame undefined for a concentric annulus (t = 0)");
  }
  // (r2 +- r1)^2 - t^2 in factored form; the minus branch carries eps and
  // would cancel badly when the boundaries nearly touch.
  const double plus = (a.r2 + a.r1 - a.t) * (a.r2 + a.r1 + a.t);
  const double minus = a.eps() * (a.r2 - a.r1 + a.t);
  BipolarFrame f;
  f.alpha = std::sqrt(plus) * std::sqrt(minus) / (2.0 * a.t);
  // asinh(x) = ln(x + sqrt(x^2 + 1)); the library version stays accurate
  // for the huge alpha/r produced by small t.
  f.xi1 = std::asinh(f.alpha / a.r1);
  f.xi2 = std::asinh(f.alpha / a.r2);
  return f;
}

inline Point to_cartesian(const BipolarFrame& f, double xi, double theta) {
  const double denom = std::cosh(xi) + std::cos(theta);
  return {f.alpha * std::sinh(xi) / denom, f.alpha * std::sin(theta) / denom};
}

// Common scale factor h_xi = h_theta of the conformal frame.
inline double scale_factor(const BipolarFrame& f, double xi, double theta) {
  return f.alpha / (std::cosh(xi) + std::cos(theta));
}

// Leading small-gap behaviour of the frame: alpha ~ r* sqrt(eps),
// xi_j ~ (r*/r_j) sqrt(eps), with O(eps^{3/2}) corrections.
struct AsymptoticFrame {
  double r_star = 0.0;
  double alpha_hat = 0.0;
  double xi_hat_1 = 0.0;
  double xi_hat_2 = 0.0;
};

inline AsymptoticFrame asymptotic_frame(const Annulus& a) {
  validate(a);
  AsymptoticFrame af;
  af.r_star = std::sqrt(2.0 * a.r1 * a.r2 / (a.r2 - a.r1));
  const double root_eps = std::sqrt(a.eps());
  af.alpha_hat = af.r_star * root_eps;
  af.xi_hat_1 = af.r_star / a.r1 * root_eps;
  af.xi_hat_2 = af.r_star / a.r2 * root_eps;
  return af;
}

}  // namespace steklov
