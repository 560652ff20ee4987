#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steklov/steklov.hpp"

namespace steklov::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNoConvergence = 2,
  kVerifyFailed = 3,
};

inline std::string fmt15(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

struct PointArgs {
  double r1 = 1.0;
  double r2 = 3.0;
  double t = 0.0;
};

inline void add_point_flags(CLI::App* cmd, PointArgs& p) {
  cmd->add_option("--r1", p.r1, "inner radius")->required();
  cmd->add_option("--r2", p.r2, "outer radius")->required();
  cmd->add_option("--t", p.t, "centre offset, 0 <= t < r2 - r1")->required();
}

inline int cmd_eig(const PointArgs& p, double tol, std::size_t n_max, bool relative,
                   bool certify_flag, std::ostream& out) {
  const Annulus a = make_annulus(p.r1, p.r2, p.t);
  const SolveOptions opt{tol, n_max, relative ? StopRule::kRelative : StopRule::kAbsolute};
  const ConvergedEigenvalue ev = solve_first_eigenvalue(a, opt);
  out << "sigma=" << fmt15(ev.sigma) << '\n' << "n_final=" << ev.n_final << '\n';
  for (const DoublingStep& s : ev.history) {
    out << "history n=" << s.n << " sigma=" << fmt15(s.sigma) << " delta=" << fmt6(s.delta)
        << '\n';
  }
  if (certify_flag) {
    if (!ev.frame) {
      // Closed form; nothing to certify.
      out << "m_final=0\nE_final=0\n";
    } else {
      const Certificate c = certify(*ev.frame, ev.sigma, 1e-12);
      out << "m_final=" << c.m_final << '\n' << "E_final=" << fmt6(c.E_final) << '\n';
      if (!c.certified) return kNoConvergence;
    }
  }
  return kOk;
}

inline int cmd_sweep(const SweepSpec& spec, const std::string& out_path,
                     const std::string& svg_path, std::ostream& out, std::ostream& err) {
  validate(spec);
  std::ofstream csv(out_path, std::ios::binary);
  if (!csv) {
    err << "error: cannot open " << out_path << " for writing\n";
    return kUsage;
  }
  const std::vector<SweepRow> rows = run_sweep(spec);
  write_csv(csv, rows);
  csv.close();
  if (!svg_path.empty()) {
    std::ofstream svg(svg_path, std::ios::binary);
    if (!svg) {
      err << "error: cannot open " << svg_path << " for writing\n";
      return kUsage;
    }
    std::ostringstream title;
    title << "sigma vs t/(r2-r1), r1=" << format_number(spec.r1)
          << ", r2=" << format_number(spec.r2);
    write_svg(svg, rows, title.str());
  }
  std::size_t failed = 0;
  for (const SweepRow& r : rows) {
    if (!r.converged) {
      ++failed;
      err << "warning: t_frac=" << format_number(r.t_frac) << " did not converge: " << r.error
          << '\n';
    }
  }
  out << "rows=" << rows.size() << '\n'
      << "adjacent_increases=" << adjacent_increases(rows) << '\n'
      << "failed=" << failed << '\n';
  return failed == 0 ? kOk : kNoConvergence;
}

inline int cmd_bounds(const PointArgs& p, std::ostream& out) {
  const Annulus a = make_annulus(p.r1, p.r2, p.t);
  const BoundsReport b = bounds_report(a);
  out << "upper_M=" << fmt15(b.upper_M) << '\n'
      << "concentric=" << fmt15(b.concentric) << '\n'
      << "liminf_lower=" << fmt15(b.liminf_lower) << '\n'
      << "cap=" << fmt15(b.cap()) << '\n';
  if (a.t > 0.0) {
    const BipolarFrame f = bipolar_frame(a);
    out << "alpha=" << fmt15(f.alpha) << '\n'
        << "xi1=" << fmt15(f.xi1) << '\n'
        << "xi2=" << fmt15(f.xi2) << '\n';
  }
  return kOk;
}

inline int cmd_derivative(const PointArgs& p, double tol, std::size_t n_max, std::ostream& out) {
  const Annulus a = make_annulus(p.r1, p.r2, p.t);
  const SolveOptions opt{tol, n_max, StopRule::kAbsolute};
  const ConvergedEigenvalue ev = solve_first_eigenvalue(a, opt);
  out << "sigma=" << fmt15(ev.sigma) << '\n';
  if (!ev.eigen) {
    out << "dsigma_dt=0\n";
    return kOk;
  }
  const EigenfunctionSeries s = normalize(series_from_eigvec(*ev.frame, *ev.eigen));
  out << "dsigma_dt=" << fmt15(shape_derivative(s)) << '\n';
  return kOk;
}

inline int cmd_ladder(const PointArgs& p, std::size_t terms, std::ostream& out) {
  const Annulus a = make_annulus(p.r1, p.r2, p.t);
  const BipolarFrame f = bipolar_frame(a);
  const double sigma = solve_first_eigenvalue(a).sigma;
  const CoefficientLadder lad = coefficient_ladder(a, sigma, terms);
  out << "sigma=" << fmt15(sigma) << '\n'
      << "n0=" << lad.n0 << '\n'
      << "L_inf=" << fmt15(lad.L_inf) << '\n'
      << "U_inf=" << fmt15(lad.U_inf) << '\n'
      << "F1_explicit=" << fmt15(f1_explicit(f, sigma)) << '\n'
      << "F1_tail=" << fmt15(f1_tail(f, sigma)) << '\n';
  for (std::size_t n = 1; n <= terms; ++n) {
    out << "n=" << n << " T=" << fmt15(lad.T(n)) << " L=" << fmt15(lad.L(n))
        << " U=" << fmt15(lad.U(n)) << " F=" << fmt15(lad.F(n)) << '\n';
  }
  return kOk;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<CheckResult> results = run_verification(o);
  bool ok = true;
  for (const CheckResult& r : results) {
    out << "check=" << r.name << " status=" << (r.passed ? "pass" : "FAIL") << " detail=\""
        << r.detail << "\"\n";
    ok = ok && r.passed;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "verify=" << (ok ? "pass" : "fail") << " seconds=" << std::fixed << std::setprecision(2)
      << secs << '\n';
  return ok ? kOk : kVerifyFailed;
}

// Entry point shared by the executable and the tests.  argv[0] is the
// program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"First Steklov-Dirichlet eigenvalue of an eccentric annulus"};
  app.require_subcommand(1);

  PointArgs p;
  double tol = 1e-12;
  std::size_t n_max = 4096;
  bool relative = false, certify_flag = false, quick = false;
  double perturb = 0.0;
  std::size_t terms = 20;
  SweepSpec spec;
  std::string out_path, svg_path;

  auto* eig = app.add_subcommand("eig", "converged eigenvalue at one offset");
  add_point_flags(eig, p);
  eig->add_option("--tol", tol, "stopping tolerance")->capture_default_str();
  eig->add_option("--n-max", n_max, "largest truncation size")->capture_default_str();
  eig->add_flag("--relative", relative, "use the relative stopping rule");
  eig->add_flag("--certify", certify_flag, "raise m until the Rayleigh gap is below 1e-12");

  auto* sweep = app.add_subcommand("sweep", "eigenvalue over a grid of offsets, as CSV");
  sweep->add_option("--r1", spec.r1, "inner radius")->required();
  sweep->add_option("--r2", spec.r2, "outer radius")->required();
  sweep->add_option("--t-frac-start", spec.t_frac_start)->capture_default_str();
  sweep->add_option("--t-frac-end", spec.t_frac_end)->capture_default_str();
  sweep->add_option("--steps", spec.steps)->capture_default_str();
  sweep->add_option("--tol", spec.tol)->capture_default_str();
  sweep->add_option("--n-max", spec.n_max)->capture_default_str();
  sweep->add_option("--out", out_path, "CSV output path")->required();
  sweep->add_option("--svg", svg_path, "optional SVG plot path");

  auto* bounds = app.add_subcommand("bounds", "upper and lower bounds at one offset");
  add_point_flags(bounds, p);

  auto* deriv = app.add_subcommand("derivative", "d sigma / dt from the series formula");
  add_point_flags(deriv, p);
  deriv->add_option("--tol", tol)->capture_default_str();
  deriv->add_option("--n-max", n_max)->capture_default_str();

  auto* ladder = app.add_subcommand("ladder", "recursion parameters and ratios");
  add_point_flags(ladder, p);
  ladder->add_option("--terms", terms, "number of rows")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run the self-check suite");
  verify->add_flag("--quick", quick, "reduced grids");
  verify->add_option("--perturb-sigma", perturb, "shift sigma before the ladder checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*eig) return cmd_eig(p, tol, n_max, relative, certify_flag, out);
    if (*sweep) return cmd_sweep(spec, out_path, svg_path, out, err);
    if (*bounds) return cmd_bounds(p, out);
    if (*deriv) return cmd_derivative(p, tol, n_max, out);
    if (*ladder) {
      if (p.t == 0.0) throw InvalidAnnulus("ladder needs t > 0");
      return cmd_ladder(p, terms, out);
    }
    if (*verify) return cmd_verify(VerifyOptions{quick, perturb}, out);
  } catch (const InvalidAnnulus& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DegenerateFrame& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNoConvergence;
  }
  return kUsage;
}

}  // namespace steklov::cli
