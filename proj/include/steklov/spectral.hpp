#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "steklov/bounds.hpp"
#include "steklov/errors.hpp"
#include "steklov/geometry.hpp"

namespace steklov {

// Squared normalisers d_k^2 of the cosine modes on the outer circle.  In the
// basis cos(k theta) / d_k the Dirichlet-to-Neumann operator truncated to n
// modes is a symmetric tridiagonal matrix.
struct ModeWeights {
  std::vector<double> d2;

  std::size_t size() const { return d2.size(); }
  double d(std::size_t k) const { return std::sqrt(d2[k]); }
};

inline ModeWeights mode_weights(const BipolarFrame& f, std::size_t n) {
  if (n == 0) throw InvalidArgument("mode_weights: n must be >= 1");
  const double gap = f.gap();
  ModeWeights w;
  w.d2.resize(n);
  w.d2[0] = 1.0 / gap;
  for (std::size_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    w.d2[k] = kd / (2.0 * std::tanh(kd * gap));
  }
  return w;
}

struct TridiagonalSection {
  std::size_t n = 0;
  std::vector<double> diag;  // n entries
  std::vector<double> off;   // n - 1 entries
  BipolarFrame frame;
  ModeWeights weights;
};

inline TridiagonalSection finite_section(const BipolarFrame& f, std::size_t n) {
  TridiagonalSection m;
  m.n = n;
  m.frame = f;
  m.weights = mode_weights(f, n);
  const double c2 = std::cosh(f.xi2);
  const auto& d2 = m.weights.d2;
  m.diag.resize(n);
  m.diag[0] = c2 * d2[0] / f.alpha;
  for (std::size_t k = 1; k < n; ++k) m.diag[k] = 2.0 * c2 * d2[k] / f.alpha;
  m.off.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m.off[k] = std::sqrt(d2[k] * d2[k + 1]) / f.alpha;
  }
  return m;
}

namespace detail {

// Pivot floor for the LDL^T recurrences, scaled to the off-diagonal.
inline double pivot_floor(std::span<const double> off) {
  double big = 1.0;
  for (double b : off) big = std::max(big, b * b);
  return std::numeric_limits<double>::min() * big;
}

}  // namespace detail

// Number of eigenvalues of the section strictly below x, from the signs of
// the LDL^T pivots of (M - x I).
inline std::size_t sturm_count(const TridiagonalSection& m, double x) {
  const double floor = detail::pivot_floor(m.off);
  std::size_t negatives = 0;
  double q = m.diag[0] - x;
  for (std::size_t i = 0;; ++i) {
    if (std::abs(q) < floor) q = -floor;
    if (q < 0.0) ++negatives;
    if (i + 1 == m.n) break;
    q = (m.diag[i + 1] - x) - m.off[i] * m.off[i] / q;
  }
  return negatives;
}

inline double gershgorin_upper(const TridiagonalSection& m) {
  double upper = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    double r = m.diag[i];
    if (i > 0) r += std::abs(m.off[i - 1]);
    if (i + 1 < m.n) r += std::abs(m.off[i]);
    upper = std::max(upper, r);
  }
  return upper;
}

struct EigenResult {
  std::size_t n = 0;
  double sigma = 0.0;
  // Coordinates in the orthonormal basis cos(k theta) / d_k, unit 2-norm,
  // with coeffs[0] > 0.
  std::vector<double> coeffs;
  double residual = 0.0;  // ||M c - sigma c||_2
};

inline std::vector<double> multiply(const TridiagonalSection& m,
                                 std::span<const double> x) {
  std::vector<double> y(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    double s = m.diag[i] * x[i];
    if (i > 0) s += m.off[i - 1] * x[i - 1];
    if (i + 1 < m.n) s += m.off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

inline EigenResult smallest_eigpair(const TridiagonalSection& m) {
  constexpr int kBisectionBudget = 4000;
  constexpr int kInverseBudget = 4;

  EigenResult r;
  r.n = m.n;

  // The section is positive definite, so [0, Gershgorin] brackets sigma.
  // Bisect to full double resolution: the matrix is scaled diagonally
  // dominant, so the Sturm count resolves sigma to a few ulps.
  double lo = 0.0;
  double hi = gershgorin_upper(m);
  int it = 0;
  for (; it < kBisectionBudget; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(m, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (it == kBisectionBudget) {
    throw ConvergenceFailure("smallest_eigpair: bisection budget exhausted");
  }
  r.sigma = hi;

  // Inverse iteration with the converged shift.  Leading sections have a
  // strictly larger first eigenvalue, so every pivot of M - sigma I except
  // possibly the last is positive and no pivoting is needed.
  const std::size_t n = m.n;
  std::vector<double> pivot(n);
  pivot[0] = m.diag[0] - r.sigma;
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(gershgorin_upper(m), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      pivot[i] = (m.diag[i] - r.sigma) - m.off[i - 1] * m.off[i - 1] / pivot[i - 1];
    }
    if (std::abs(pivot[i]) < tiny) pivot[i] = tiny;
  }

  std::vector<double> x(n, 1.0);
  std::vector<double> y(n);
  for (int pass = 0; pass < kInverseBudget; ++pass) {
    y[0] = x[0];
    for (std::size_t i = 1; i < n; ++i) {
      y[i] = x[i] - m.off[i - 1] / pivot[i - 1] * y[i - 1];
    }
    x[n - 1] = y[n - 1] / pivot[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      x[i] = (y[i] - m.off[i] * x[i + 1]) / pivot[i];
    }
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ConvergenceFailure("smallest_eigpair: inverse iteration broke down");
    }
    const double sign = x[0] < 0.0 ? -1.0 : 1.0;
    for (double& v : x) v *= sign / norm;

    const auto mx = multiply(m, x);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = mx[i] - r.sigma * x[i];
      res += e * e;
    }
    r.residual = std::sqrt(res);
    if (r.residual <= 1e-13 * r.sigma) break;
  }
  r.coeffs = std::move(x);
  return r;
}

enum class StopRule { kAbsolute, kRelative };

struct SolveOptions {
  double tol = 1e-12;
  std::size_t n_max = 4096;
  StopRule rule = StopRule::kAbsolute;
};

struct DoublingStep {
  std::size_t n = 0;
  double sigma = 0.0;
  // |sigma_{n/2} - sigma_n| (or its relative form); NaN on the first step.
  double delta = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergedEigenvalue {
  double sigma = 0.0;
  std::size_t n_final = 0;
  std::vector<DoublingStep> history;
  std::optional<BipolarFrame> frame;  // empty for the concentric case
  std::optional<EigenResult> eigen;   // eigenpair of the final section

  double last_delta() const {
    return history.empty() ? 0.0 : history.back().delta;
  }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Doubles the truncation from 8 until consecutive first eigenvalues differ
// by less than tol.  The concentric annulus is answered in closed form.
inline ConvergedEigenvalue solve_first_eigenvalue(const Annulus& a,
                                                  const SolveOptions& opt = {}) {
  validate(a);
  if (!(opt.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (!is_power_of_two(opt.n_max) || opt.n_max < 8) {
    throw InvalidArgument("n_max must be a power of two >= 8");
  }
  ConvergedEigenvalue out;
  if (a.t == 0.0) {
    out.sigma = concentric_value(a.r1, a.r2);
    return out;
  }
  const BipolarFrame f = bipolar_frame(a);
  out.frame = f;
  for (std::size_t n = 8; n <= opt.n_max; n *= 2) {
    EigenResult e = smallest_eigpair(finite_section(f, n));
    DoublingStep step{n, e.sigma};
    if (!out.history.empty()) {
      const double prev = out.history.back().sigma;
      step.delta = std::abs(prev - e.sigma);
      if (opt.rule == StopRule::kRelative) step.delta /= std::abs(e.sigma);
    }
    out.history.push_back(step);
    out.sigma = e.sigma;
    out.n_final = n;
    out.eigen = std::move(e);
    if (out.history.size() > 1 && step.delta < opt.tol) return out;
  }
  std::ostringstream msg;
  msg << "no convergence up to n_max=" << opt.n_max
      << " (last delta " << out.last_delta() << ", tol " << opt.tol << ")";
  throw NoConvergence(msg.str());
}

// Sign and log-magnitude of det(M_n) from the three-term determinant
// recurrence, carried as the ratio of consecutive leading minors.
struct LogDet {
  double log_abs = 0.0;
  int sign = 1;
};

inline LogDet log_determinant(const TridiagonalSection& m) {
  LogDet out;
  double ratio = m.diag[0];
  for (std::size_t i = 0;; ++i) {
    if (ratio == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    out.log_abs += std::log(std::abs(ratio));
    if (ratio < 0.0) out.sign = -out.sign;
    if (i + 1 == m.n) break;
    ratio = m.diag[i + 1] - m.off[i] * m.off[i] / ratio;
  }
  return out;
}

inline double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

// |log det M_n - (-n log alpha + sum log d_k^2 + log cosh(n xi2))|.
inline double determinant_identity_residual(const BipolarFrame& f, std::size_t n) {
  const TridiagonalSection m = finite_section(f, n);
  const LogDet ld = log_determinant(m);
  if (ld.sign <= 0) return std::numeric_limits<double>::infinity();
  double rhs = -static_cast<double>(n) * std::log(f.alpha);
  for (double d2 : m.weights.d2) rhs += std::log(d2);
  rhs += log_cosh(static_cast<double>(n) * f.xi2);
  return std::abs(ld.log_abs - rhs);
}

}  // namespace steklov
