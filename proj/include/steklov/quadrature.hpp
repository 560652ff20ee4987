#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "steklov/errors.hpp"

namespace steklov {

// Periodic trapezoid rule over (-pi, pi] on 2^m nodes, doubling m until the
// relative change drops below rel_tol.  Converges geometrically for analytic
// periodic integrands.  Each doubling reuses the previous sum.
template <class F>
double periodic_trapezoid(F&& g, double rel_tol = 1e-13, int m_start = 4,
                          int m_max = 20) {
  constexpr double pi = std::numbers::pi;
  std::size_t nodes = std::size_t{1} << m_start;
  double raw = 0.0;  // plain sum of samples
  for (std::size_t j = 0; j < nodes; ++j) {
    raw += g(-pi + 2.0 * pi * static_cast<double>(j) / static_cast<double>(nodes));
  }
  double estimate = raw * 2.0 * pi / static_cast<double>(nodes);
  for (int m = m_start + 1; m <= m_max; ++m) {
    const std::size_t fine = nodes * 2;
    for (std::size_t j = 1; j < fine; j += 2) {
      raw += g(-pi + 2.0 * pi * static_cast<double>(j) / static_cast<double>(fine));
    }
    nodes = fine;
    const double next = raw * 2.0 * pi / static_cast<double>(nodes);
    const double change = std::abs(next - estimate);
    estimate = next;
    if (change <= rel_tol * std::abs(next) || (next == 0.0 && change == 0.0)) {
      return estimate;
    }
  }
  throw QuadratureStall("periodic trapezoid did not stabilise by 2^20 nodes");
}

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(unsigned n) {
  // legendre_p_zeros returns the non-negative roots only.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  GaussRule rule;
  for (double x : half) {
    const double dp = boost::math::legendre_p_prime(static_cast<int>(n), x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0.0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

// Gauss-Legendre on [lo, hi], doubling the node count from 8 until the
// relative change drops below rel_tol.
template <class F>
double gauss_legendre_adaptive(F&& g, double lo, double hi, double rel_tol = 1e-13,
                               unsigned n_max = 1024) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  auto apply_rule = [&](unsigned n) {
    const GaussRule rule = gauss_legendre(n);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      s += rule.weights[i] * g(mid + half * rule.nodes[i]);
    }
    return s * half;
  };
  double prev = apply_rule(8);
  for (unsigned n = 16; n <= n_max; n *= 2) {
    const double next = apply_rule(n);
    if (std::abs(next - prev) <= rel_tol * std::abs(next)) return next;
    prev = next;
  }
  throw QuadratureStall("Gauss-Legendre did not stabilise");
}

}  // namespace steklov
