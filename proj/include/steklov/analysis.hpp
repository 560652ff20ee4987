#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "steklov/bounds.hpp"
#include "steklov/eigenfunction.hpp"
#include "steklov/errors.hpp"
#include "steklov/geometry.hpp"
#include "steklov/quadrature.hpp"
#include "steklov/spectral.hpp"

namespace steklov {

// A finite stretch x_first, x_{first+1}, ... of an integer-indexed sequence.
struct Sequence {
  std::size_t first = 1;
  std::vector<double> values;

  std::size_t last() const { return first + values.size() - 1; }
  bool contains(std::size_t n) const { return n >= first && n <= last(); }
  double operator()(std::size_t n) const { return values.at(n - first); }
};

// ---------------------------------------------------------------------------
// Recursion parameters and fixed points of the ratio map x -> -T_n - 1/x.

inline double t_value(const BipolarFrame& f, double sigma, std::size_t n) {
  const double nd = static_cast<double>(n);
  return 2.0 * std::cosh(f.xi2) - 2.0 * f.alpha * sigma / nd * std::tanh(nd * f.gap());
}

// T_1 .. T_{n_max}.  Increases to 2 cosh(xi2).
inline Sequence t_sequence(const BipolarFrame& f, double sigma, std::size_t n_max) {
  Sequence s{1, {}};
  s.values.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) s.values.push_back(t_value(f, sigma, n));
  return s;
}

struct FixedPoints {
  double L = -1.0;
  double U = -1.0;
};

// Roots of x^2 + T x + 1 when T > 2; both collapse to -1 otherwise.
inline FixedPoints fixed_points_of(double T) {
  if (!(T > 2.0)) return {};
  // Larger-magnitude root first, the other by Vieta (L U = 1).
  const double L = -0.5 * (T + std::sqrt((T - 2.0) * (T + 2.0)));
  return {L, 1.0 / L};
}

inline FixedPoints fixed_points(const BipolarFrame& f, double sigma, std::size_t n) {
  return fixed_points_of(t_value(f, sigma, n));
}

// Limits of L_n and U_n as T_n -> 2 cosh(xi2).
inline FixedPoints limit_fixed_points(const BipolarFrame& f) {
  return {-std::exp(f.xi2), -std::exp(-f.xi2)};
}

// ---------------------------------------------------------------------------
// Analytic bounds.

// int_0^pi sqrt(r2^2 - 2 r2 t cos(phi) + t^2) dphi, the mean distance from an
// offset point to the outer circle (an elliptic integral, done numerically).
inline double offset_distance_integral(double r2, double t) {
  return gauss_legendre_adaptive(
      [&](double phi) {
        const double s = r2 * r2 - 2.0 * r2 * t * std::cos(phi) + t * t;
        return std::sqrt(std::max(s, 0.0));
      },
      0.0, std::numbers::pi);
}

// Rayleigh quotient of the test function |x - (t, 0)| - r1.
inline double upper_bound_M(const Annulus& a) {
  validate(a);
  constexpr double pi = std::numbers::pi;
  const double num = pi * (a.r2 * a.r2 - a.r1 * a.r1);
  const double den = 2.0 * pi * a.r2 * (a.r2 * a.r2 + a.r1 * a.r1 + a.t * a.t) -
                     4.0 * a.r1 * a.r2 * offset_distance_integral(a.r2, a.t);
  return num / den;
}

struct BoundsReport {
  double upper_M = 0.0;
  double concentric = 0.0;
  double liminf_lower = 0.0;

  double cap() const { return std::min(upper_M, concentric); }
};

inline BoundsReport bounds_report(const Annulus& a) {
  validate(a);
  return {upper_bound_M(a), concentric_value(a.r1, a.r2), liminf_lower(a.r1, a.r2)};
}

// Smallest integer n0 >= alpha cap / (sqrt((alpha/r2)^2 + 1) - 1).  For
// n >= n0 every T_n exceeds 2 when sigma <= cap.
inline std::size_t n0_threshold(const Annulus& a, const BipolarFrame& f,
                                double sigma_cap) {
  if (sigma_cap <= 0.0) return 0;
  const double x = f.alpha / a.r2;
  const double excess = x * x / (std::sqrt(x * x + 1.0) + 1.0);  // sqrt(x^2+1) - 1
  return static_cast<std::size_t>(std::ceil(f.alpha * sigma_cap / excess));
}

// ---------------------------------------------------------------------------
// Coefficient ladder.

// First two scaled coefficients A~_1, A~_2 for a given a0.
struct LadderStart {
  double A1 = 0.0;
  double A2 = 0.0;
};

inline LadderStart ladder_start(const BipolarFrame& f, double sigma, double a0) {
  const double c2 = std::cosh(f.xi2);
  LadderStart s;
  s.A1 = a0 * c2 / f.xi1 - a0 * f.alpha * sigma * (1.0 - f.xi2 / f.xi1);
  s.A2 = a0 / f.xi1 + 2.0 * f.alpha * sigma * s.A1 * std::tanh(f.gap()) - 2.0 * s.A1 * c2;
  return s;
}

// A~_1 .. A~_{n_max} by forward recursion.  At any sigma that is not exactly
// an eigenvalue this locks onto the dominant solution (ratio -> -e^{xi2}),
// so it is only a diagnostic.  Stops early once magnitudes pass 1e300.
inline Sequence ladder_forward(const BipolarFrame& f, double sigma, double a0,
                               std::size_t n_max) {
  Sequence s{1, {}};
  if (n_max == 0) return s;
  const LadderStart start = ladder_start(f, sigma, a0);
  s.values.push_back(start.A1);
  if (n_max >= 2) s.values.push_back(start.A2);
  while (s.values.size() < n_max) {
    const std::size_t n = s.values.size();  // index of the last entry
    const double next = -s.values[n - 1] * t_value(f, sigma, n) - s.values[n - 2];
    if (!(std::abs(next) < 1e300)) break;
    s.values.push_back(next);
  }
  return s;
}

// Explicit ratio A~_2 / A~_1 from the boundary relations (a0 cancels).
inline double f1_explicit(const BipolarFrame& f, double sigma) {
  const LadderStart s = ladder_start(f, sigma, 1.0);
  return s.A2 / s.A1;
}

// Backward recursion F_{n-1} = -1 / (T_n + F_n) seeded with F_{n_hi} = -e^{-xi2}.
// This evaluates the continued fraction for the ratio of the minimal solution.
inline Sequence f_ratio_backward(const BipolarFrame& f, double sigma, std::size_t n_lo,
                                 std::size_t n_hi, std::optional<double> seed = {}) {
  if (n_lo < 1 || n_hi < n_lo) {
    throw InvalidArgument("f_ratio_backward: need 1 <= n_lo <= n_hi");
  }
  Sequence s{n_lo, std::vector<double>(n_hi - n_lo + 1)};
  double F = seed.value_or(limit_fixed_points(f).U);
  s.values.back() = F;
  for (std::size_t n = n_hi; n > n_lo; --n) {
    const double den = t_value(f, sigma, n) + F;
    if (std::abs(den) < 1e-300) {
      std::ostringstream msg;
      msg << "continued fraction denominator vanished at n=" << n << " (sigma=" << sigma
          << ")";
      throw DivisionNearZero(msg.str());
    }
    F = -1.0 / den;
    s.values[n - 1 - n_lo] = F;
  }
  return s;
}

// Index past which the backward recursion has forgotten its seed: beyond the
// first n with T_n > 2 the map contracts by about e^{-2 xi2} per step.
inline std::size_t tail_start(const BipolarFrame& f, double sigma, std::size_t n_from) {
  const double excess = std::cosh(f.xi2) - 1.0;
  const double settle = std::ceil(f.alpha * std::max(sigma, 0.0) / excess) + 1.0;
  const double decay = std::ceil(40.0 / f.xi2) + 64.0;
  const double n = std::max(static_cast<double>(n_from), settle) + decay;
  if (n > 5e7) throw InvalidArgument("tail_start: frame too degenerate for backward recursion");
  return static_cast<std::size_t>(n);
}

inline double f1_tail(const BipolarFrame& f, double sigma) {
  return f_ratio_backward(f, sigma, 1, tail_start(f, sigma, 2)).values.front();
}

// Mismatch between the explicit and continued-fraction values of F_1; its
// zeros are the eigenvalues.
inline double continued_fraction_mismatch(const BipolarFrame& f, double sigma) {
  return f1_explicit(f, sigma) - f1_tail(f, sigma);
}

struct Bracket {
  double lo = 1e-6;
  double hi = 0.0;  // 0 selects the concentric value
};

// First eigenvalue as the lowest zero of the continued-fraction mismatch.
// The bracket is scanned upward; each sign change is bisected and kept only
// if the mismatch actually vanishes there (sign changes also occur at poles).
inline double eigenvalue_by_continued_fraction(const Annulus& a, Bracket b = {}) {
  validate(a);
  const BipolarFrame f = bipolar_frame(a);
  if (b.hi == 0.0) b.hi = concentric_value(a.r1, a.r2);
  if (!(b.lo > 0.0 && b.hi > b.lo)) throw InvalidArgument("bad bracket");

  constexpr int kScan = 256;
  auto phi = [&](double s) { return continued_fraction_mismatch(f, s); };
  double x0 = b.lo;
  double p0 = phi(x0);
  for (int i = 1; i <= kScan; ++i) {
    const double x1 = b.lo + (b.hi - b.lo) * i / kScan;
    const double p1 = phi(x1);
    if (p0 == 0.0) return x0;
    if ((p0 < 0.0) != (p1 < 0.0)) {
      double lo = x0, hi = x1, plo = p0;
      for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi) break;
        const double pm = phi(mid);
        if ((pm < 0.0) == (plo < 0.0)) {
          lo = mid;
          plo = pm;
        } else {
          hi = mid;
        }
      }
      const double root = lo + 0.5 * (hi - lo);
      if (std::abs(phi(root)) < 1e-6) return root;
    }
    x0 = x1;
    p0 = p1;
  }
  throw NoRootInBracket("continued-fraction mismatch has no zero in the bracket");
}

struct CoefficientLadder {
  double sigma = 0.0;
  Sequence T;  // T_1 ..
  Sequence F;  // F_1 .. by backward recursion
  Sequence L;  // L_1 ..
  Sequence U;  // U_1 ..
  double L_inf = 0.0;
  double U_inf = 0.0;
  std::size_t n0 = 0;
};

// Everything about the ratio sequence up to n_max at a given eigenvalue.
inline CoefficientLadder coefficient_ladder(const Annulus& a, double sigma,
                                            std::size_t n_max) {
  const BipolarFrame f = bipolar_frame(a);
  CoefficientLadder c;
  c.sigma = sigma;
  c.T = t_sequence(f, sigma, n_max + 1);
  c.L = Sequence{1, {}};
  c.U = Sequence{1, {}};
  for (double T : c.T.values) {
    const FixedPoints fp = fixed_points_of(T);
    c.L.values.push_back(fp.L);
    c.U.values.push_back(fp.U);
  }
  const FixedPoints lim = limit_fixed_points(f);
  c.L_inf = lim.L;
  c.U_inf = lim.U;
  c.n0 = n0_threshold(a, f, bounds_report(a).cap());
  Sequence full = f_ratio_backward(f, sigma, 1, tail_start(f, sigma, n_max));
  full.values.resize(n_max);
  c.F = std::move(full);
  return c;
}

// Scaled coefficients A~_n = A_n cosh(n (xi1 - xi2)) read off a series.
inline Sequence a_tilde_from_series(const EigenfunctionSeries& s) {
  Sequence out{1, {}};
  for (std::size_t k = 1; k < s.modes(); ++k) out.values.push_back(s.A_tilde(k));
  return out;
}

// ---------------------------------------------------------------------------
// Shape derivative.

// d sigma / dt for the normalised first eigenfunction, from the squared
// normal derivative on the inner circle expanded in the series coefficients:
//
//   -(2 pi / alpha) (-a0^2/xi1^2 + (2 a0/xi1) A_1 cosh xi1
//                    - 2 sum_n (A_n^2 + A_n A_{n+1} cosh xi1)).
//
// The overall minus accounts for the bipolar frame placing the inner disk
// at -t relative to the outer centre, i.e. mirrored with respect to the
// direction in which t increases.
inline double shape_derivative(const EigenfunctionSeries& s) {
  if (!s.normalized) {
    throw NotNormalized("shape_derivative needs a normalised eigenfunction");
  }
  const BipolarFrame& f = s.frame;
  const double ch = std::cosh(f.xi1);
  const std::size_t n = s.modes();
  auto A = [&](std::size_t k) { return k < n ? s.A[k] : 0.0; };

  detail::CompensatedSum tail;
  for (std::size_t k = n; k-- > 1;) {
    tail.add(A(k) * A(k) + A(k) * A(k + 1) * ch);
  }
  const double bracket = -s.a0 * s.a0 / (f.xi1 * f.xi1) +
                         2.0 * s.a0 / f.xi1 * A(1) * ch - 2.0 * tail.value();
  return -2.0 * std::numbers::pi / f.alpha * bracket;
}

// ---------------------------------------------------------------------------
// Small-gap asymptotics of the ladder.

struct AsymptoticLadder {
  Sequence R;            // R_1 ..
  Sequence predicted_T;  // 2 + (2 r1 / (r2 (r2 - r1))) R_n eps
  Sequence predicted_U;  // -exp(-sqrt(max(R_n, 0)) xi2)
  double predicted_T2 = 0.0;  // 2 + (2 r1/(r2 (r2 - r1))) eps - 4 sigma eps
  double R_bound = 0.0;       // 1 + sigma 2 r2 (r2 - r1) / r1
};

inline AsymptoticLadder asymptotic_ladder(const Annulus& a, const BipolarFrame& f,
                                          double sigma, std::size_t n_max) {
  validate(a);
  const double eps = a.eps();
  const double k_sigma = sigma * 2.0 * a.r2 * (a.r2 - a.r1) / a.r1;
  const double k_T = 2.0 * a.r1 / (a.r2 * (a.r2 - a.r1));
  const double gap = f.gap();
  AsymptoticLadder out;
  out.R = Sequence{1, {}};
  out.predicted_T = Sequence{1, {}};
  out.predicted_U = Sequence{1, {}};
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double s = static_cast<double>(n) * gap;
    const double R = 1.0 - k_sigma * std::tanh(s) / s;
    out.R.values.push_back(R);
    out.predicted_T.values.push_back(2.0 + k_T * R * eps);
    out.predicted_U.values.push_back(-std::exp(-std::sqrt(std::max(R, 0.0)) * f.xi2));
  }
  out.predicted_T2 = 2.0 + k_T * eps - 4.0 * sigma * eps;
  out.R_bound = 1.0 + k_sigma;
  return out;
}

}  // namespace steklov
