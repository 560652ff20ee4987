#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "steklov/steklov.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

// 30-digit references computed with mpmath.
struct FrameRef {
  double t, alpha, xi1, xi2;
};
constexpr FrameRef kRefs[] = {
    {1.2, 2.5438378704451883977, 1.6633901972890540543, 0.76967158375683015510},
    {0.4, 9.7488460855631524326, 2.9729162609330438354, 1.8945590126722978043},
    {1.6, 1.3747727084867520020, 1.1232309825872958895, 0.44356825438511518913},
};

}  // namespace

TEST(Annulus, RejectsBadParameters) {
  EXPECT_THROW(make_annulus(3.0, 1.0, 0.0), InvalidAnnulus);
  EXPECT_THROW(make_annulus(0.0, 1.0, 0.0), InvalidAnnulus);
  EXPECT_THROW(make_annulus(1.0, 1.0, 0.0), InvalidAnnulus);
  EXPECT_THROW(make_annulus(1.0, 3.0, 2.0), InvalidAnnulus);
  EXPECT_THROW(make_annulus(1.0, 3.0, -0.1), InvalidAnnulus);
  EXPECT_THROW(make_annulus(1.0, 3.0, std::nan("")), InvalidAnnulus);
  EXPECT_NO_THROW(make_annulus(1.0, 3.0, 0.0));
  EXPECT_DOUBLE_EQ(make_annulus(1.0, 3.0, 1.5).eps(), 0.5);
}

TEST(Frame, ConcentricIsDegenerate) {
  EXPECT_THROW(bipolar_frame(make_annulus(1.0, 3.0, 0.0)), DegenerateFrame);
}

TEST(Frame, MatchesHighPrecisionReference) {
  for (const FrameRef& r : kRefs) {
    const BipolarFrame f = bipolar_frame(make_annulus(1.0, 3.0, r.t));
    EXPECT_NEAR(f.alpha, r.alpha, 1e-14 * r.alpha) << "t=" << r.t;
    EXPECT_NEAR(f.xi1, r.xi1, 1e-14 * r.xi1);
    EXPECT_NEAR(f.xi2, r.xi2, 1e-14 * r.xi2);
  }
}

TEST(Frame, BoundaryCirclesAreTheAnnulusCircles) {
  const Annulus a = make_annulus(1.0, 3.0, 1.2);
  const BipolarFrame f = bipolar_frame(a);
  EXPECT_NEAR(f.radius(f.xi1), 1.0, 1e-14);
  EXPECT_NEAR(f.radius(f.xi2), 3.0, 1e-14);
  EXPECT_NEAR(f.centre(f.xi2) - f.centre(f.xi1), 1.2, 1e-13);
  for (int j = 0; j < 64; ++j) {
    const double th = -kPi + 2.0 * kPi * j / 64.0;
    for (double xi : {f.xi1, f.xi2}) {
      const Point p = to_cartesian(f, xi, th);
      const double d = std::hypot(p.x1 - f.centre(xi), p.x2);
      EXPECT_NEAR(d, f.radius(xi), 1e-12) << "theta=" << th;
    }
  }
}

TEST(Frame, ScaleFactorMatchesJacobian) {
  const BipolarFrame f = bipolar_frame(make_annulus(1.0, 3.0, 0.8));
  const double h = 1e-6;
  for (double xi : {0.7, 0.9, 1.1}) {
    for (double th : {-2.5, -0.3, 0.4, 2.9}) {
      const Point a = to_cartesian(f, xi + h, th), b = to_cartesian(f, xi - h, th);
      const double jx = std::hypot(a.x1 - b.x1, a.x2 - b.x2) / (2.0 * h);
      const Point c = to_cartesian(f, xi, th + h), d = to_cartesian(f, xi, th - h);
      const double jt = std::hypot(c.x1 - d.x1, c.x2 - d.x2) / (2.0 * h);
      EXPECT_NEAR(jx, scale_factor(f, xi, th), 1e-8);
      EXPECT_NEAR(jt, scale_factor(f, xi, th), 1e-8);
    }
  }
}

TEST(Frame, RandomAnnuliAreConsistent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double r2 = 0.1 + 10.0 * u(rng);
    const double r1 = r2 * (0.01 + 0.98 * u(rng));
    const double t = (r2 - r1) * (1e-3 + 0.998 * u(rng));
    const BipolarFrame f = bipolar_frame(make_annulus(r1, r2, t));
    ASSERT_GT(f.xi1, f.xi2);
    ASSERT_GT(f.xi2, 0.0);
    EXPECT_NEAR(r1 * std::sinh(f.xi1), f.alpha, 1e-12 * f.alpha);
    EXPECT_NEAR(r2 * std::sinh(f.xi2), f.alpha, 1e-12 * f.alpha);
    EXPECT_NEAR(f.centre(f.xi2) - f.centre(f.xi1), t, 1e-10 * t + 1e-13 * r2);
  }
}

TEST(Frame, NearlyTouchingStaysAccurate) {
  // (r2+r1)^2 - t^2 and (r2-r1)^2 - t^2 are formed without cancellation.
  const Annulus a = make_annulus(1.0, 3.0, 2.0 - 1e-10);
  const BipolarFrame f = bipolar_frame(a);
  const double expected = std::sqrt((16.0 - 4.0) * 1e-10 * 4.0) / 4.0;
  EXPECT_NEAR(f.alpha, expected, 1e-5 * expected);
}

TEST(Frame, SmallGapAsymptotics) {
  std::vector<double> ratios;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const Annulus a = make_annulus(1.0, 3.0, 2.0 - eps);
    const BipolarFrame f = bipolar_frame(a);
    const AsymptoticFrame af = asymptotic_frame(a);
    EXPECT_NEAR(af.r_star, std::sqrt(3.0), 1e-15);
    ratios.push_back(std::abs(f.alpha - af.alpha_hat) / std::pow(eps, 1.5));
    EXPECT_LT(std::abs(f.xi1 - af.xi_hat_1) / std::pow(eps, 1.5), 5.0);
    EXPECT_LT(std::abs(f.xi2 - af.xi_hat_2) / std::pow(eps, 1.5), 5.0);
  }
  for (double r : ratios) EXPECT_NEAR(r, ratios.back(), 0.1);
}

TEST(Bounds, ClosedForms) {
  EXPECT_NEAR(concentric_value(1.0, 3.0), 0.303413075542279131, 1e-15);
  EXPECT_NEAR(liminf_lower(1.0, 3.0), 1.0 / 12.0, 1e-16);
  EXPECT_THROW(concentric_value(2.0, 1.0), InvalidAnnulus);
}
