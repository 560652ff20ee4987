#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "steklov/analysis.hpp"
#include "steklov/eigenfunction.hpp"
#include "steklov/spectral.hpp"

namespace steklov {

struct SweepSpec {
  double r1 = 1.0;
  double r2 = 3.0;
  double t_frac_start = 0.0;
  double t_frac_end = 0.98;
  std::size_t steps = 50;
  double tol = 1e-12;
  std::size_t n_max = 4096;
};

inline void validate(const SweepSpec& s) {
  check_radii(s.r1, s.r2);
  if (!(s.t_frac_start >= 0.0 && s.t_frac_start <= s.t_frac_end && s.t_frac_end < 1.0)) {
    throw InvalidArgument("sweep needs 0 <= t_frac_start <= t_frac_end < 1");
  }
  if (s.steps < 1) throw InvalidArgument("sweep needs steps >= 1");
  if (s.steps == 1 && s.t_frac_end != s.t_frac_start) {
    throw InvalidArgument("a single-step sweep needs t_frac_start == t_frac_end");
  }
}

// Offsets as fractions of r2 - r1, evenly spaced and inclusive of both ends.
inline std::vector<double> sweep_fractions(const SweepSpec& s) {
  std::vector<double> out(s.steps);
  for (std::size_t i = 0; i < s.steps; ++i) {
    out[i] = s.steps == 1 ? s.t_frac_start
                          : s.t_frac_start + (s.t_frac_end - s.t_frac_start) *
                                                 static_cast<double>(i) /
                                                 static_cast<double>(s.steps - 1);
  }
  return out;
}

struct SweepRow {
  double r1 = 0.0;
  double r2 = 0.0;
  double t = 0.0;
  double t_frac = 0.0;
  std::size_t n_final = 0;
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double last_delta = std::numeric_limits<double>::quiet_NaN();
  double upper_M = 0.0;
  double concentric = 0.0;
  double liminf_lower = 0.0;
  double dsigma_dt = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  std::string error;
};

inline SweepRow solve_sweep_point(const SweepSpec& s, double t_frac) {
  SweepRow row;
  row.r1 = s.r1;
  row.r2 = s.r2;
  row.t_frac = t_frac;
  row.t = t_frac * (s.r2 - s.r1);
  const Annulus a = make_annulus(s.r1, s.r2, row.t);
  const BoundsReport b = bounds_report(a);
  row.upper_M = b.upper_M;
  row.concentric = b.concentric;
  row.liminf_lower = b.liminf_lower;
  try {
    const ConvergedEigenvalue ev =
        solve_first_eigenvalue(a, SolveOptions{s.tol, s.n_max, StopRule::kAbsolute});
    row.sigma = ev.sigma;
    row.n_final = ev.n_final;
    row.last_delta = ev.last_delta();
    if (ev.eigen) {
      row.dsigma_dt = shape_derivative(normalize(series_from_eigvec(*ev.frame, *ev.eigen)));
    } else {
      row.dsigma_dt = 0.0;  // sigma is even in t, so it is stationary at t = 0
    }
    row.converged = true;
  } catch (const NoConvergence& e) {
    row.error = e.what();
  }
  return row;
}

// Evaluates every grid point, concurrently when workers > 1.  Rows come back
// in grid order regardless of scheduling.
inline std::vector<SweepRow> run_sweep(const SweepSpec& s, unsigned workers = 0) {
  validate(s);
  const std::vector<double> fracs = sweep_fractions(s);
  std::vector<SweepRow> rows(fracs.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(fracs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < fracs.size(); ++i) rows[i] = solve_sweep_point(s, fracs[i]);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < fracs.size();) {
        rows[i] = solve_sweep_point(s, fracs[i]);
      }
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

// Count of adjacent grid points where sigma fails to decrease.
inline std::size_t adjacent_increases(const std::vector<SweepRow>& rows) {
  std::size_t count = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].sigma < rows[i - 1].sigma)) ++count;
  }
  return count;
}

inline constexpr const char* kCsvHeader =
    "r1,r2,t,t_frac,n_final,sigma,last_delta,upper_M,concentric,liminf_lower,dsigma_dt";

// 12 significant digits, locale-independent.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    os << format_number(r.r1) << ',' << format_number(r.r2) << ',' << format_number(r.t)
       << ',' << format_number(r.t_frac) << ',' << r.n_final << ','
       << format_number(r.sigma) << ',' << format_number(r.last_delta) << ','
       << format_number(r.upper_M) << ',' << format_number(r.concentric) << ','
       << format_number(r.liminf_lower) << ',' << format_number(r.dsigma_dt) << '\n';
  }
}

// Minimal standalone line plot of sigma against t_frac.
inline void write_svg(std::ostream& os, const std::vector<SweepRow>& rows,
                      const std::string& title) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double xmin = 0.0, xmax = 1.0;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const SweepRow& r : rows) {
    if (!std::isfinite(r.sigma)) continue;
    ymin = std::min(ymin, r.sigma);
    ymax = std::max(ymax, r.sigma);
  }
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"15\">"
     << title << "</text>\n"
     << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\"/>\n"
     << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\"/>\n"
     << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = xmin + (xmax - xmin) * i / 5.0;
    const double y = ymin + (ymax - ymin) * i / 5.0;
    os << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
       << format_number(x) << "</text>\n";
    char lab[32];
    std::snprintf(lab, sizeof lab, "%.4f", y);
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << lab
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\">t / (r2 - r1)</text>\n"
     << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">sigma</text>\n</g>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"";
  for (const SweepRow& r : rows) {
    if (!std::isfinite(r.sigma)) continue;
    os << px(r.t_frac) << ',' << py(r.sigma) << ' ';
  }
  os << "\"/>\n";
  for (const SweepRow& r : rows) {
    if (!std::isfinite(r.sigma)) continue;
    os << "<circle cx=\"" << px(r.t_frac) << "\" cy=\"" << py(r.sigma)
       << "\" r=\"2.5\" fill=\"#1f4e9c\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace steklov
