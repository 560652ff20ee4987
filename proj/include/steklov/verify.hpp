#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "steklov/analysis.hpp"
#include "steklov/eigenfunction.hpp"
#include "steklov/geometry.hpp"
#include "steklov/spectral.hpp"

namespace steklov {

struct VerifyOptions {
  bool quick = false;
  // Added to every converged sigma before the ladder checks; a negative
  // control for the harness itself.
  double sigma_perturbation = 0.0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Converged eigenvalues of the (r1, r2) = (1, 3) annulus at
// t / (r2 - r1) = 0.2, 0.4, 0.6, 0.8, 0.98.
inline constexpr std::array<double, 5> kReferenceFractions{0.2, 0.4, 0.6, 0.8, 0.98};
inline constexpr std::array<double, 5> kReferenceSigma{0.280415816559, 0.243981314075,
                                                   0.211194759856, 0.183167795551,
                                                   0.161288441909};

namespace checks {

inline CheckResult frame_consistency(const VerifyOptions& o) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int count = o.quick ? 200 : 1000;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double r2 = 0.5 + 4.5 * unit(rng);
    const double r1 = r2 * (0.05 + 0.9 * unit(rng));
    const double t = (r2 - r1) * (0.01 + 0.98 * unit(rng));
    const BipolarFrame f = bipolar_frame(make_annulus(r1, r2, t));
    worst = std::max(worst, std::abs(r1 * std::sinh(f.xi1) - f.alpha) / f.alpha);
    worst = std::max(worst, std::abs(r2 * std::sinh(f.xi2) - f.alpha) / f.alpha);
    // Centre distance written without the cancelling subtraction.
    const double centres = (r2 * r2 - r1 * r1) / (f.centre(f.xi2) + f.centre(f.xi1));
    worst = std::max(worst, std::abs(centres - t) / t);
  }
  std::ostringstream d;
  d << count << " annuli, worst relative error " << worst;
  return {"frame_consistency", worst <= 1e-12, d.str()};
}

inline CheckResult determinant_identity(const VerifyOptions&) {
  double worst = 0.0;
  for (double ratio : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const BipolarFrame f = bipolar_frame(make_annulus(ratio, 1.0, frac * (1.0 - ratio)));
      for (std::size_t n = 1; n <= 64; ++n) {
        worst = std::max(worst, determinant_identity_residual(f, n));
      }
    }
  }
  std::ostringstream d;
  d << "5x5 grid, n <= 64, worst log residual " << worst;
  return {"determinant_identity", worst <= 1e-10, d.str()};
}

inline CheckResult reference_values(const VerifyOptions&) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kReferenceFractions.size(); ++i) {
    const double s = solve_first_eigenvalue(make_annulus(1.0, 3.0, 2.0 * kReferenceFractions[i])).sigma;
    worst = std::max(worst, std::abs(s - kReferenceSigma[i]));
  }
  std::ostringstream d;
  d << "worst absolute deviation " << worst;
  return {"reference_values", worst <= 1e-9, d.str()};
}

inline std::vector<double> ladder_offsets(const VerifyOptions& o) {
  return o.quick ? std::vector<double>{1.0} : std::vector<double>{0.4, 1.0, 1.6};
}

// The eigenvalue must make the explicit F_1 agree with the continued
// fraction, and the backward ratios must sit in U_{n+1} < F_n < U_inf.
inline CheckResult ladder_sandwich(const VerifyOptions& o) {
  std::ostringstream d;
  bool ok = true;
  for (double t : ladder_offsets(o)) {
    const Annulus a = make_annulus(1.0, 3.0, t);
    const double sigma = solve_first_eigenvalue(a).sigma + o.sigma_perturbation;
    const BipolarFrame f = bipolar_frame(a);
    const double mismatch = std::abs(continued_fraction_mismatch(f, sigma));
    const CoefficientLadder lad = coefficient_ladder(a, sigma, 400);
    std::size_t violations = 0;
    for (std::size_t n = std::max<std::size_t>(lad.n0, 1); n <= lad.n0 + 200; ++n) {
      if (!(lad.U(n + 1) < lad.F(n) && lad.F(n) < lad.U_inf)) ++violations;
    }
    d << "t=" << t << ": |F1 mismatch|=" << mismatch << ", violations=" << violations << "; ";
    ok = ok && mismatch <= 1e-9 && violations == 0;
  }
  return {"ladder_sandwich", ok, d.str()};
}

// F_n approaches -e^{-xi2} monotonically and no slower than U_{n+1}.
inline CheckResult ratio_limit(const VerifyOptions& o) {
  std::ostringstream d;
  bool ok = true;
  for (double t : ladder_offsets(o)) {
    const Annulus a = make_annulus(1.0, 3.0, t);
    const double sigma = solve_first_eigenvalue(a).sigma;
    const std::size_t span = o.quick ? 500 : 2000;
    const CoefficientLadder lad = coefficient_ladder(a, sigma, 0);
    const CoefficientLadder full = coefficient_ladder(a, sigma, lad.n0 + span);
    bool mono = true, bounded = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n = std::max<std::size_t>(full.n0, 1); n < full.n0 + span; ++n) {
      const double gap = std::abs(full.F(n) - full.U_inf);
      mono = mono && gap <= prev;
      bounded = bounded && gap <= std::abs(full.U(n + 1) - full.U_inf);
      prev = gap;
    }
    d << "t=" << t << ": final gap " << prev << (mono ? "" : " (not monotone)")
      << (bounded ? "" : " (escapes U_{n+1})") << "; ";
    ok = ok && mono && bounded;
  }
  return {"ratio_limit", ok, d.str()};
}

inline double central_difference(double r1, double r2, double t, double h) {
  const double up = solve_first_eigenvalue(make_annulus(r1, r2, t + h)).sigma;
  const double down = solve_first_eigenvalue(make_annulus(r1, r2, t - h)).sigma;
  return (up - down) / (2.0 * h);
}

inline double series_derivative(const Annulus& a) {
  const ConvergedEigenvalue ev = solve_first_eigenvalue(a);
  return shape_derivative(normalize(series_from_eigvec(*ev.frame, *ev.eigen)));
}

inline CheckResult derivative_vs_fd(const VerifyOptions& o) {
  std::ostringstream d;
  bool ok = true;
  const std::vector<double> ts = o.quick ? std::vector<double>{0.8}
                                         : std::vector<double>{0.4, 0.8, 1.2};
  for (double t : ts) {
    const double series = series_derivative(make_annulus(1.0, 3.0, t));
    const double fd = central_difference(1.0, 3.0, t, 1e-5);
    const double rel = std::abs(series - fd) / std::abs(fd);
    d << "t=" << t << ": rel " << rel << "; ";
    ok = ok && rel <= 1e-5 && series < 0.0 && fd < 0.0;
  }
  return {"derivative_vs_fd", ok, d.str()};
}

inline CheckResult oracle_equivalence(const VerifyOptions& o) {
  double worst = 0.0;
  const std::size_t rows = o.quick ? 2 : kReferenceFractions.size();
  for (std::size_t i = 0; i < rows; ++i) {
    const Annulus a = make_annulus(1.0, 3.0, 2.0 * kReferenceFractions[kReferenceFractions.size() - 1 - i]);
    worst = std::max(worst, std::abs(eigenvalue_by_continued_fraction(a) -
                                     solve_first_eigenvalue(a).sigma));
  }
  std::ostringstream d;
  d << rows << " rows, worst difference " << worst;
  return {"oracle_equivalence", worst <= 1e-9, d.str()};
}

inline CheckResult rayleigh_certificate(const VerifyOptions&) {
  const BipolarFrame f = bipolar_frame(make_annulus(1.0, 3.0, 1.2));
  const double sigma_N = smallest_eigpair(finite_section(f, 64)).sigma;
  const Certificate c = certify(f, sigma_N, 1e-12, 128);
  bool above = true;
  for (std::size_t m = 1; m <= c.m_final; ++m) {
    above = above && rayleigh_bound(f, m) >= sigma_N - 1e-14;
  }
  std::ostringstream d;
  d << "m_final=" << c.m_final << ", E_final=" << c.E_final;
  return {"rayleigh_certificate", c.certified && above, d.str()};
}

inline CheckResult positivity(const VerifyOptions& o) {
  const ConvergedEigenvalue ev = solve_first_eigenvalue(make_annulus(1.0, 3.0, 1.2));
  const EigenfunctionSeries s = normalize(series_from_eigvec(*ev.frame, *ev.eigen));
  const int nx = o.quick ? 16 : 64, nt = o.quick ? 32 : 128;
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nx; ++i) {
    const double xi = s.frame.xi2 + s.frame.gap() * i / (nx - 1);
    for (int j = 0; j < nt; ++j) {
      const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * (j + 1) / nt;
      lowest = std::min(lowest, evaluate(s, std::min(xi, s.frame.xi1), theta));
    }
  }
  std::ostringstream d;
  d << "minimum " << lowest;
  return {"positivity", lowest >= -1e-10, d.str()};
}

}  // namespace checks

inline std::vector<CheckResult> run_verification(const VerifyOptions& o = {}) {
  using Check = std::function<CheckResult(const VerifyOptions&)>;
  const std::vector<Check> all{
      checks::frame_consistency, checks::determinant_identity, checks::reference_values,
      checks::ladder_sandwich,   checks::ratio_limit,          checks::derivative_vs_fd,
      checks::oracle_equivalence, checks::rayleigh_certificate, checks::positivity,
  };
  std::vector<CheckResult> out;
  for (const Check& c : all) {
    try {
      out.push_back(c(o));
    } catch (const std::exception& e) {
      CheckResult r;
      r.name = "exception";
      r.detail = e.what();
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace steklov
