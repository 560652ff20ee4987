#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "steklov/errors.hpp"
#include "steklov/geometry.hpp"
#include "steklov/quadrature.hpp"
#include "steklov/spectral.hpp"

namespace steklov {

namespace detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// sinh(a) / sinh(b) for 0 <= a <= b without overflow.
inline double sinh_ratio(double a, double b) {
  if (b == 0.0) return 1.0;
  return std::exp(a - b) * std::expm1(-2.0 * a) / std::expm1(-2.0 * b);
}

// cosh(a) / sinh(b) for 0 <= a <= b, b > 0.
inline double cosh_sinh_ratio(double a, double b) {
  return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / -std::expm1(-2.0 * b);
}

// sum_k c[k] cos(k theta), accumulated from the highest mode down.
inline double cosine_series(std::span<const double> c, double theta) {
  if (c.empty()) return 0.0;
  std::vector<double> cosk(c.size());
  cosk[0] = 1.0;
  // Re-anchor the rotation recurrence periodically to bound drift.
  double cr = 1.0, sr = 0.0;
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (k % 64 == 0) {
      cr = std::cos(static_cast<double>(k) * theta);
      sr = std::sin(static_cast<double>(k) * theta);
    } else {
      const double next_c = cr * c1 - sr * s1;
      sr = sr * c1 + cr * s1;
      cr = next_c;
    }
    cosk[k] = cr;
  }
  CompensatedSum acc;
  for (std::size_t k = c.size(); k-- > 0;) acc.add(c[k] * cosk[k]);
  return acc.value();
}

// Drops trailing coefficients too small to affect a double-precision sum.
inline std::size_t effective_length(std::span<const double> c) {
  double big = 0.0;
  for (double v : c) big = std::max(big, std::abs(v));
  std::size_t len = c.size();
  while (len > 1 && std::abs(c[len - 1]) <= 1e-20 * big) --len;
  return len;
}

}  // namespace detail

// First eigenfunction in bipolar coordinates,
//
//   u(xi, theta) = a0 (1 - xi/xi1) - sum_k (2/k) A_k sinh(k (xi1 - xi)) cos(k theta),
//
// which vanishes identically on the inner circle xi = xi1.  The outer trace
// coefficients b_k (u(xi2, theta) = sum_k b_k cos(k theta)) are kept
// alongside, since sinh(k (xi1 - xi2)) overflows long before the trace
// becomes negligible.
struct EigenfunctionSeries {
  double sigma = 0.0;
  double a0 = 0.0;
  std::vector<double> A;      // A[k] for k >= 1; A[0] is unused and zero
  std::vector<double> trace;  // b_0 .. b_{n-1}
  BipolarFrame frame;
  bool normalized = false;

  std::size_t modes() const { return trace.size(); }

  // A~_k = A_k cosh(k (xi1 - xi2)); the coefficients of d_xi u on xi = xi2.
  double A_tilde(std::size_t k) const {
    const double kd = static_cast<double>(k);
    return -0.5 * kd * trace[k] / std::tanh(kd * frame.gap());
  }
};

inline EigenfunctionSeries series_from_trace(const BipolarFrame& f, double sigma,
                                             std::vector<double> trace) {
  if (trace.empty()) throw FrameMismatch("empty trace");
  EigenfunctionSeries s;
  s.sigma = sigma;
  s.frame = f;
  s.a0 = trace[0] / (1.0 - f.xi2 / f.xi1);
  s.A.assign(trace.size(), 0.0);
  const double gap = f.gap();
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double kd = static_cast<double>(k);
    // sinh overflows to inf for huge k*gap, giving A_k = 0 as it should.
    s.A[k] = -0.5 * kd * trace[k] / std::sinh(kd * gap);
  }
  s.trace = std::move(trace);
  return s;
}

// Eigenvector coordinates c_k in the basis cos(k theta)/d_k become the trace
// coefficients b_k = c_k / d_k.
inline EigenfunctionSeries series_from_eigvec(const BipolarFrame& f,
                                              const EigenResult& e) {
  if (e.n == 0 || e.coeffs.size() != e.n) {
    throw FrameMismatch("eigenvector length does not match its truncation size");
  }
  const ModeWeights w = mode_weights(f, e.n);
  std::vector<double> trace(e.n);
  for (std::size_t k = 0; k < e.n; ++k) trace[k] = e.coeffs[k] / w.d(k);
  return series_from_trace(f, e.sigma, std::move(trace));
}

inline double evaluate(const EigenfunctionSeries& s, double xi, double theta) {
  const BipolarFrame& f = s.frame;
  if (!(xi >= f.xi2 && xi <= f.xi1)) {
    throw OutOfDomain("evaluate: xi outside [xi2, xi1]");
  }
  const double gap = f.gap();
  const double depth = f.xi1 - xi;
  const std::size_t n = detail::effective_length(s.trace);
  std::vector<double> c(n);
  c[0] = s.a0 * (1.0 - xi / f.xi1);
  for (std::size_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    c[k] = s.trace[k] * detail::sinh_ratio(kd * depth, kd * gap);
  }
  return detail::cosine_series(c, theta);
}

// d u / d xi at (xi, theta).
inline double evaluate_dxi(const EigenfunctionSeries& s, double xi, double theta) {
  const BipolarFrame& f = s.frame;
  if (!(xi >= f.xi2 && xi <= f.xi1)) {
    throw OutOfDomain("evaluate_dxi: xi outside [xi2, xi1]");
  }
  const double gap = f.gap();
  const double depth = f.xi1 - xi;
  const std::size_t n = detail::effective_length(s.trace);
  std::vector<double> c(n);
  c[0] = -s.a0 / f.xi1;
  for (std::size_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    c[k] = -kd * s.trace[k] * detail::cosh_sinh_ratio(kd * depth, kd * gap);
  }
  return detail::cosine_series(c, theta);
}

// Integral over the outer circle, int g dS = int g(theta) h(xi2, theta) dtheta.
template <class G>
double boundary_integral(const BipolarFrame& f, G&& g) {
  const double c2 = std::cosh(f.xi2);
  return periodic_trapezoid(
      [&](double theta) { return g(theta) * f.alpha / (c2 + std::cos(theta)); });
}

inline double trace_value(const EigenfunctionSeries& s, double theta) {
  const std::size_t n = detail::effective_length(s.trace);
  return detail::cosine_series(std::span<const double>(s.trace).first(n), theta);
}

inline EigenfunctionSeries scaled(EigenfunctionSeries s, double factor) {
  s.a0 *= factor;
  for (double& v : s.A) v *= factor;
  for (double& v : s.trace) v *= factor;
  return s;
}

// Rescales so that int u^2 dS = 1 over the outer circle with int u dS > 0.
inline EigenfunctionSeries normalize(const EigenfunctionSeries& s) {
  const double sq = boundary_integral(s.frame, [&](double th) {
    const double u = trace_value(s, th);
    return u * u;
  });
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw ZeroFunction("normalize: boundary trace is numerically zero");
  }
  const double mean =
      boundary_integral(s.frame, [&](double th) { return trace_value(s, th); });
  const double sign = mean < 0.0 ? -1.0 : 1.0;
  EigenfunctionSeries out = scaled(s, sign / std::sqrt(sq));
  out.normalized = true;
  return out;
}

// Outward normal derivative on the outer circle:
// -(cosh xi2 + cos theta)/alpha * (-a0/xi1 + sum 2 A~_k cos(k theta)).
inline double boundary_flux(const EigenfunctionSeries& s, double theta) {
  const BipolarFrame& f = s.frame;
  const std::size_t n = detail::effective_length(s.trace);
  std::vector<double> g(n);
  g[0] = -s.a0 / f.xi1;
  for (std::size_t k = 1; k < n; ++k) g[k] = 2.0 * s.A_tilde(k);
  return -(std::cosh(f.xi2) + std::cos(theta)) / f.alpha *
         detail::cosine_series(g, theta);
}

// Dirichlet energy int_Omega |grad u|^2 in closed form.  By conformal
// invariance and Green's identity on the (xi, theta) strip it equals
// -int u d_xi u dtheta on xi = xi2, which cosine orthogonality reduces to
// 2 pi sum_k d_k^2 b_k^2.
inline double dirichlet_energy(const EigenfunctionSeries& s) {
  const ModeWeights w = mode_weights(s.frame, s.modes());
  detail::CompensatedSum acc;
  for (std::size_t k = s.modes(); k-- > 0;) {
    acc.add(w.d2[k] * s.trace[k] * s.trace[k]);
  }
  return 2.0 * std::numbers::pi * acc.value();
}

// Rayleigh quotient of the series; an upper bound on the first eigenvalue.
inline double rayleigh_quotient(const EigenfunctionSeries& s) {
  const double den = boundary_integral(s.frame, [&](double th) {
    const double u = trace_value(s, th);
    return u * u;
  });
  if (!(den > 0.0)) throw ZeroFunction("rayleigh_quotient: zero trace");
  return dirichlet_energy(s) / den;
}

// Upper bound I_m from the first eigenvector of the m-mode section.
inline double rayleigh_bound(const BipolarFrame& f, std::size_t m) {
  return rayleigh_quotient(series_from_eigvec(f, smallest_eigpair(finite_section(f, m))));
}

struct Certificate {
  std::size_t m_final = 0;
  double E_final = 0.0;
  std::vector<double> gaps;  // E_{m,N} for m = 1 .. m_final
  bool certified = false;
};

// Raises m until |sigma_N - I_m| < tol, where sigma_N is the converged
// finite-section eigenvalue.  Since I_m bounds the true eigenvalue from
// above, a small gap certifies sigma_N.
inline Certificate certify(const BipolarFrame& f, double sigma_N, double tol = 1e-12,
                           std::size_t m_max = 4096) {
  Certificate c;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double gap = std::abs(sigma_N - rayleigh_bound(f, m));
    c.gaps.push_back(gap);
    c.m_final = m;
    c.E_final = gap;
    if (gap < tol) {
      c.certified = true;
      break;
    }
  }
  return c;
}

}  // namespace steklov
