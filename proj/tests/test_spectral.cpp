#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "steklov/steklov.hpp"

using namespace steklov;

namespace {

// Cyclic Jacobi on a dense copy; returns all eigenvalues ascending.
std::vector<double> jacobi_eigenvalues(const TridiagonalSection& m) {
  const std::size_t n = m.n;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = m.diag[i];
    if (i + 1 < n) a[i][i + 1] = a[i + 1][i] = m.off[i];
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double offn = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) offn += a[p][q] * a[p][q];
    if (offn < 1e-40) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

BipolarFrame frame(double r1, double r2, double t) {
  return bipolar_frame(make_annulus(r1, r2, t));
}

}  // namespace

TEST(ModeWeights, ClosedForm) {
  const BipolarFrame f = frame(1.0, 3.0, 1.2);
  const ModeWeights w = mode_weights(f, 4);
  EXPECT_NEAR(w.d2[0], 1.0 / f.gap(), 1e-15);
  // 30-digit reference 1 / (2 tanh(xi1 - xi2)).
  EXPECT_NEAR(w.d2[1], 0.701040484557782860, 1e-15);
  EXPECT_NEAR(w.d2[3], 3.0 / (2.0 * std::tanh(3.0 * f.gap())), 1e-15);
  EXPECT_THROW(mode_weights(f, 0), InvalidArgument);
}

TEST(ModeWeights, LargeModesApproachHalfK) {
  const ModeWeights w = mode_weights(frame(1.0, 3.0, 1.2), 200);
  EXPECT_NEAR(w.d2[199], 99.5, 1e-12);
}

TEST(FiniteSection, TwoByTwoClosedForm) {
  const TridiagonalSection m = finite_section(frame(1.0, 3.0, 1.2), 2);
  const double a = m.diag[0], c = m.diag[1], b = m.off[0];
  const double closed = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const EigenResult e = smallest_eigpair(m);
  EXPECT_NEAR(e.sigma, closed, 1e-15);
  // 30-digit reference for this section.
  EXPECT_NEAR(e.sigma, 0.293943368832146772713, 1e-15);
}

TEST(FiniteSection, EightModesMatchHighPrecision) {
  // mpmath eigsy on the same 8x8 sections.
  EXPECT_NEAR(smallest_eigpair(finite_section(frame(1, 3, 0.4), 8)).sigma,
              0.280415816566845207497, 1e-14);
  EXPECT_NEAR(smallest_eigpair(finite_section(frame(1, 3, 1.2), 8)).sigma,
              0.211232489806590030890, 1e-14);
  EXPECT_NEAR(smallest_eigpair(finite_section(frame(1, 3, 1.6), 8)).sigma,
              0.185487114249768574952, 1e-14);
}

TEST(FiniteSection, SingleModeIsDiagonal) {
  const TridiagonalSection m = finite_section(frame(1.0, 3.0, 0.5), 1);
  EXPECT_TRUE(m.off.empty());
  EXPECT_DOUBLE_EQ(smallest_eigpair(m).sigma, m.diag[0]);
}

TEST(SturmCount, AgreesWithJacobi) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double r1 = 0.1 + 0.8 * u(rng);
    const double t = (1.0 - r1) * (0.05 + 0.9 * u(rng));
    const TridiagonalSection m = finite_section(frame(r1, 1.0, t), 16);
    const std::vector<double> ev = jacobi_eigenvalues(m);
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
      const double mid = 0.5 * (ev[i] + ev[i + 1]);
      EXPECT_EQ(sturm_count(m, mid), i + 1);
    }
    EXPECT_EQ(sturm_count(m, ev.front() * 0.5), 0u);
    EXPECT_NEAR(smallest_eigpair(m).sigma, ev.front(), 1e-12 * ev.front());
  }
}

TEST(SmallestEigpair, EigenvectorIsAccurate) {
  for (std::size_t n : {8u, 64u, 512u}) {
    const TridiagonalSection m = finite_section(frame(1.0, 3.0, 1.8), n);
    const EigenResult e = smallest_eigpair(m);
    ASSERT_EQ(e.coeffs.size(), n);
    double norm = 0.0;
    for (double v : e.coeffs) norm += v * v;
    EXPECT_NEAR(norm, 1.0, 1e-14);
    EXPECT_GT(e.coeffs[0], 0.0);
    EXPECT_LE(e.residual, 1e-12 * e.sigma);
    EXPECT_EQ(sturm_count(m, e.sigma * (1.0 - 1e-12)), 0u);
  }
}

TEST(SmallestEigpair, DecreasesWithTruncation) {
  // Leading principal submatrices interlace.
  const BipolarFrame f = frame(1.0, 3.0, 1.6);
  double prev = smallest_eigpair(finite_section(f, 1)).sigma;
  for (std::size_t n = 2; n <= 64; ++n) {
    const double s = smallest_eigpair(finite_section(f, n)).sigma;
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST(Determinant, IdentityHolds) {
  for (double ratio : {0.1, 0.5, 0.9}) {
    for (double frac : {0.1, 0.5, 0.9}) {
      const BipolarFrame f = frame(ratio, 1.0, frac * (1.0 - ratio));
      for (std::size_t n = 1; n <= 64; ++n) {
        EXPECT_LE(determinant_identity_residual(f, n), 1e-10);
      }
    }
  }
}

TEST(Determinant, LogCoshIsStable) {
  EXPECT_NEAR(log_cosh(0.0), 0.0, 1e-16);
  EXPECT_NEAR(log_cosh(1.0), std::log(std::cosh(1.0)), 1e-15);
  EXPECT_NEAR(log_cosh(1000.0), 1000.0 - std::log(2.0), 1e-12);
}

TEST(Solve, ReferenceValues) {
  const double fracs[] = {0.2, 0.4, 0.6, 0.8, 0.98};
  for (std::size_t i = 0; i < 5; ++i) {
    const ConvergedEigenvalue ev = solve_first_eigenvalue(make_annulus(1, 3, 2 * fracs[i]));
    EXPECT_NEAR(ev.sigma, kReferenceSigma[i], 1e-9);
    EXPECT_TRUE(is_power_of_two(ev.n_final));
    EXPECT_LT(ev.last_delta(), 1e-12);
  }
}

TEST(Solve, HistoryDoublesFromEight) {
  const ConvergedEigenvalue ev = solve_first_eigenvalue(make_annulus(1, 3, 1.96));
  ASSERT_GE(ev.history.size(), 2u);
  EXPECT_EQ(ev.history.front().n, 8u);
  EXPECT_TRUE(std::isnan(ev.history.front().delta));
  for (std::size_t i = 1; i < ev.history.size(); ++i) {
    EXPECT_EQ(ev.history[i].n, 2 * ev.history[i - 1].n);
    EXPECT_LE(ev.history[i].sigma, ev.history[i - 1].sigma);
  }
  EXPECT_EQ(ev.history.back().n, ev.n_final);
}

TEST(Solve, ConcentricClosedForm) {
  const ConvergedEigenvalue ev = solve_first_eigenvalue(make_annulus(1, 3, 0));
  EXPECT_NEAR(ev.sigma, 1.0 / (3.0 * std::log(3.0)), 1e-15);
  EXPECT_EQ(ev.n_final, 0u);
  EXPECT_FALSE(ev.frame.has_value());
}

TEST(Solve, RelativeRuleAgrees) {
  const Annulus a = make_annulus(1, 3, 1.2);
  const double abs_s = solve_first_eigenvalue(a).sigma;
  const double rel_s = solve_first_eigenvalue(a, {1e-12, 4096, StopRule::kRelative}).sigma;
  EXPECT_NEAR(abs_s, rel_s, 1e-12);
}

TEST(Solve, ErrorPaths) {
  const Annulus a = make_annulus(1, 3, 1.96);
  EXPECT_THROW(solve_first_eigenvalue(a, {1e-12, 16}), NoConvergence);
  EXPECT_THROW(solve_first_eigenvalue(a, {0.0, 4096}), InvalidArgument);
  EXPECT_THROW(solve_first_eigenvalue(a, {1e-12, 100}), InvalidArgument);
  EXPECT_THROW(solve_first_eigenvalue(a, {1e-12, 4}), InvalidArgument);
}

TEST(Solve, BelowConcentricProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double r1 = 0.2 + 0.7 * u(rng);
    const double t = (1.0 - r1) * (0.05 + 0.85 * u(rng));
    const Annulus a = make_annulus(r1, 1.0, t);
    const double s = solve_first_eigenvalue(a).sigma;
    EXPECT_LE(s, concentric_value(r1, 1.0) + 1e-12);
    EXPECT_LE(s, upper_bound_M(a) + 1e-10);
    EXPECT_GT(s, 0.0);
  }
}
