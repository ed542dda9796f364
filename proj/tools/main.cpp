#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "frametol/frame_lab.hpp"
#include "frametol/kernels.hpp"
#include "frametol/tolerance.hpp"

// Exit codes: 0 success, 1 invalid arguments, 2 verification failure,
// 3 solver non-convergence.

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

// 17 significant digits: round-trip safe, locale-independent.
std::string fmt(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

std::string fmt(long long v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

struct ReportRow {
  long long d;
  frametol::ToleranceReport report;
  std::optional<frametol::MainpropDiagnostics> diagnostics;
};

std::string csv_header(bool with_diagnostics) {
  std::string header = "d,rho,x_d,omega_d,correction,ratio,residual";
  if (with_diagnostics) header += ",mp1,mp2,mp3";
  return header + "\n";
}

std::string csv_row(const ReportRow& row) {
  const auto& r = row.report;
  std::string line = fmt(row.d) + "," + fmt(r.rho) + "," + fmt(r.x_d) + "," + fmt(r.omega_d) +
                     "," + fmt(r.correction) + "," + fmt(r.ratio) + "," + fmt(r.residual);
  if (row.diagnostics) {
    const auto& m = *row.diagnostics;
    line += "," + fmt(m.scaled_defect) + "," + fmt(m.slope_at_omega) + "," + fmt(m.slope_at_root);
  }
  return line + "\n";
}

std::string json_object(const ReportRow& row) {
  const auto& r = row.report;
  std::string obj = "{\"d\":" + fmt(row.d) + ",\"rho\":" + fmt(r.rho) +
                    ",\"x_d\":" + fmt(r.x_d) + ",\"omega_d\":" + fmt(r.omega_d) +
                    ",\"correction\":" + fmt(r.correction) + ",\"ratio\":" + fmt(r.ratio) +
                    ",\"residual\":" + fmt(r.residual);
  if (row.diagnostics) {
    const auto& m = *row.diagnostics;
    obj += ",\"mp1\":" + fmt(m.scaled_defect) + ",\"mp2\":" + fmt(m.slope_at_omega) +
           ",\"mp3\":" + fmt(m.slope_at_root);
  }
  return obj + "}";
}

std::string render_rows(const std::vector<ReportRow>& rows, const std::string& format,
                        bool as_array, bool with_diagnostics) {
  if (format == "csv") {
    std::string text = csv_header(with_diagnostics);
    for (const auto& row : rows) text += csv_row(row);
    return text;
  }
  if (!as_array) return json_object(rows.front()) + "\n";
  std::string text = "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    text += "  " + json_object(rows[i]) + (i + 1 < rows.size() ? ",\n" : "\n");
  return text + "]\n";
}

int fail_arguments(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

struct CommonConfig {
  long long d = 1;
  long long d_max = 10000;
  double rho = 1.0;
  double tol = 1e-12;
  std::uint64_t seed = 42;
  long long trials = 100;
  long long grid = 10000;
  std::string format = "csv";
  std::string output = "-";
  double delta = 0.1;
  long long outer = 64;
  long long inner = 48;
};

int validate_common(const CommonConfig& cfg, bool needs_rho) {
  if (cfg.d < 1) return fail_arguments("d must be an integer >= 1");
  if (needs_rho && !(cfg.rho > 0.0 && cfg.rho <= 1.0))
    return fail_arguments("rho must lie in (0, 1]");
  if (!(cfg.tol >= 1e-14 && cfg.tol <= 1.0))
    return fail_arguments("tol must lie in [1e-14, 1]");
  if (cfg.trials < 1) return fail_arguments("trials must be >= 1");
  if (cfg.grid < 10 || cfg.grid > 100000000) return fail_arguments("grid must lie in [10, 1e8]");
  if (cfg.format != "csv" && cfg.format != "json")
    return fail_arguments("format must be csv or json");
  return 0;
}

int run_tolerance(const CommonConfig& cfg) {
  if (int rc = validate_common(cfg, true)) return rc;
  const auto ratio = frametol::FrameRatio::from_rho(cfg.rho);
  ReportRow row{cfg.d, frametol::solve_x_d(static_cast<double>(cfg.d), ratio, cfg.tol), {}};
  write_output(cfg.output, render_rows({row}, cfg.format, false, false));
  return 0;
}

int run_diagnose(const CommonConfig& cfg) {
  if (int rc = validate_common(cfg, true)) return rc;
  const auto ratio = frametol::FrameRatio::from_rho(cfg.rho);
  const double d = static_cast<double>(cfg.d);
  ReportRow row{cfg.d, frametol::solve_x_d(d, ratio, cfg.tol),
                frametol::mainprop_diagnostics(d, ratio)};
  write_output(cfg.output, render_rows({row}, cfg.format, false, true));
  return 0;
}

int run_sweep(const CommonConfig& cfg) {
  if (int rc = validate_common(cfg, true)) return rc;
  if (cfg.d_max < 1 || cfg.d_max > 1000000)
    return fail_arguments("dmax must lie in [1, 1e6]");
  const auto ratio = frametol::FrameRatio::from_rho(cfg.rho);
  std::vector<ReportRow> rows;
  for (long long d = 1; d <= cfg.d_max; d *= 10) {
    const double dd = static_cast<double>(d);
    rows.push_back(
        {d, frametol::solve_x_d(dd, ratio, cfg.tol), frametol::mainprop_diagnostics(dd, ratio)});
  }
  write_output(cfg.output, render_rows(rows, cfg.format, true, true));
  return 0;
}

int run_lemma(const CommonConfig& cfg) {
  if (int rc = validate_common(cfg, false)) return rc;
  const auto reports =
      frametol::lemma_suite(static_cast<int>(cfg.trials), cfg.seed, /*trials_per_system=*/8);
  long long failures = 0;
  double worst_slack = 0.0;
  double worst_defect = 0.0;
  for (const auto& report : reports) {
    if (!report.passed) ++failures;
    worst_slack = std::max(worst_slack, report.slack);
    worst_defect = std::max(worst_defect, report.worst_defect);
  }
  std::string summary = "{\"subcommand\":\"lemma\",\"systems\":" + fmt(cfg.trials) +
                        ",\"trials_per_system\":8,\"seed\":" + fmt((long long)cfg.seed) +
                        ",\"checks\":" + fmt((long long)reports.size()) +
                        ",\"failures\":" + fmt(failures) + ",\"worst_slack\":" + fmt(worst_slack) +
                        ",\"worst_defect\":" + fmt(worst_defect) + "}\n";
  write_output(cfg.output, summary);
  return failures == 0 ? 0 : 2;
}

int run_frame(const CommonConfig& cfg) {
  if (int rc = validate_common(cfg, false)) return rc;
  const double omega =
      frametol::omega_d(static_cast<double>(cfg.d), frametol::FrameRatio::from_rho(1.0));
  if (!(cfg.delta >= 0.0 && cfg.delta < omega))
    return fail_arguments("delta must lie in [0, ln(2)/(pi d)) = [0, " + fmt(omega) +
                          ") for d = " + fmt(cfg.d));
  if (!(cfg.inner >= 0 && cfg.inner < cfg.outer))
    return fail_arguments("window halfwidths must satisfy 0 <= M < N");

  const auto report = frametol::frame_margin_experiment(
      static_cast<int>(cfg.d), static_cast<int>(cfg.outer), static_cast<int>(cfg.inner), cfg.delta,
      static_cast<int>(cfg.trials), cfg.seed);
  const double floor = 0.9 * report.interior_prediction;
  long long failures = 0;
  double sigma_max_worst = 0.0;
  for (std::size_t t = 0; t < report.sigma_min.size(); ++t) {
    if (!(report.sigma_min[t] > 0.0 && report.sigma_min[t] >= floor)) ++failures;
    sigma_max_worst = std::max(sigma_max_worst, report.sigma_max[t]);
  }
  std::string summary =
      "{\"subcommand\":\"frame\",\"d\":" + fmt(cfg.d) + ",\"outer\":" + fmt(cfg.outer) +
      ",\"inner\":" + fmt(cfg.inner) + ",\"delta\":" + fmt(cfg.delta) +
      ",\"trials\":" + fmt(cfg.trials) + ",\"seed\":" + fmt((long long)cfg.seed) +
      ",\"checks\":" + fmt(cfg.trials) + ",\"failures\":" + fmt(failures) +
      ",\"sigma_min_worst\":" + fmt(report.worst_sigma_min) +
      ",\"sigma_max_worst\":" + fmt(sigma_max_worst) +
      ",\"interior_prediction\":" + fmt(report.interior_prediction) +
      ",\"floor\":" + fmt(floor) + "}\n";
  write_output(cfg.output, summary);
  return failures == 0 ? 0 : 2;
}

// Invariant grids for the kernels and tolerance modules.
int run_selfcheck(const CommonConfig& cfg) {
  if (int rc = validate_common(cfg, false)) return rc;
  long long checks = 0;
  long long failures = 0;
  const auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };

  namespace kn = frametol::kernels;
  const long long grid = cfg.grid;

  // sign conditions for f', g' on (0, pi/4) and f'' on (0, 1/2]
  for (long long i = 1; i <= grid; ++i) {
    const double y = (pi / 4) * static_cast<double>(i) / static_cast<double>(grid + 1);
    expect(kn::f_prime(y) + kn::g_prime(y) > 0.0);
    expect(kn::g_prime(y) < 0.0);
  }
  for (long long i = 1; i <= grid; ++i)
    expect(kn::f_second(0.5 * static_cast<double>(i) / static_cast<double>(grid)) > 0.0);

  // derivatives against 5-point central differences
  const auto fd = [](auto&& fn, double y, double step) {
    return (-fn(y + 2 * step) + 8 * fn(y + step) - 8 * fn(y - step) + fn(y - 2 * step)) /
           (12 * step);
  };
  for (int i = 0; i < 100; ++i) {
    const double y = 0.01 + (pi / 4 - 0.01) * i / 99.0;
    const double step = 1e-3;
    expect(std::abs(fd(kn::f_eval, y, step) - kn::f_prime(y)) <= 1e-6 * std::abs(kn::f_prime(y)));
    expect(std::abs(fd(kn::f_prime, y, step) - kn::f_second(y)) <=
           1e-6 * std::abs(kn::f_second(y)));
    expect(std::abs(fd(kn::sinc, y, step) - kn::g_prime(y)) <= 1e-6 * std::abs(kn::g_prime(y)));
    expect(std::abs(fd(kn::g_prime, y, step) - kn::g_second(y)) <=
           1e-6 * std::abs(kn::g_second(y)));
  }

  // series and direct branches agree around the crossovers
  for (int i = 0; i < 100; ++i) {
    const double y = 5e-3 + (2e-2 - 5e-3) * i / 99.0;
    namespace kd = kn::detail;
    expect(std::abs(kd::sinc_series(y) - kd::sinc_direct(y)) <= 1e-10 * kd::sinc_direct(y));
    expect(std::abs(kd::g_prime_series(y) - kd::g_prime_direct(y)) <=
           1e-10 * std::abs(kd::g_prime_direct(y)));
    expect(std::abs(kd::g_second_series(y) - kd::g_second_direct(y)) <=
           1e-10 * std::abs(kd::g_second_direct(y)));
    expect(std::abs(kd::h_series(y) - kd::h_direct(y)) <= 1e-10 * std::abs(kd::h_direct(y)));
    const double ym = 0.4 + 0.2 * i / 99.0;
    expect(std::abs(kd::sinc_m1_series(ym) - kd::sinc_m1_direct(ym)) <=
           1e-10 * std::abs(kd::sinc_m1_direct(ym)));
  }

  // D monotone increasing with positive derivative
  for (double d : {1.0, 2.0, 5.0, 10.0, 100.0}) {
    double previous = 0.0;
    for (long long i = 1; i <= grid; ++i) {
      const double x = 0.25 * static_cast<double>(i) / static_cast<double>(grid + 1);
      const double value = frametol::D_eval(d, x);
      expect(value > previous);
      expect(frametol::D_prime(d, x) > 0.0);
      previous = value;
    }
  }

  // convexity window pinned by the f'' sign change
  for (double d : {1.0, 2.0, 10.0, 100.0}) {
    const auto window = frametol::certify_convex_window(d);
    expect(window.delta > 0.15 && window.delta < 0.20);
    expect(window.d_second_positive_until >= window.delta);
  }

  // root residuals, ordering, and the convexity sandwich on the lattice
  const auto window1 = frametol::certify_convex_window(1.0);
  for (double rho : {0.1, 0.25, 0.5, 0.9, 1.0}) {
    const auto ratio = frametol::FrameRatio::from_rho(rho);
    for (double d : {1.0, 2.0, 5.0, 10.0, 100.0, 1000.0, 10000.0}) {
      const auto report = frametol::solve_x_d(d, ratio, cfg.tol);
      expect(report.residual <= cfg.tol * std::max(1.0, rho));
      expect(report.x_d > 0.0 && report.x_d <= 0.25);
      const double gap_at_omega = frametol::tolerance_detail::root_gap(d, rho, report.omega_d);
      if (gap_at_omega < 0.0) expect(report.omega_d < report.x_d);
      if (d >= 10.0 && report.x_d < window1.delta && report.omega_d < window1.delta) {
        const double mid = d * d * (report.x_d - report.omega_d);
        const double lower = -d * gap_at_omega / (frametol::D_prime(d, report.x_d) / d);
        const double upper = -d * gap_at_omega / (frametol::D_prime(d, report.omega_d) / d);
        expect(lower < mid && mid < upper);
      }
    }
  }

  // x_d decreases toward 0 along a doubling ladder
  std::vector<double> ladder;
  for (double d = 1.0; d <= 1024.0; d *= 2) ladder.push_back(d);
  const auto roots = frametol::corollary_check(frametol::FrameRatio::from_rho(1.0), ladder);
  for (std::size_t i = 1; i < roots.size(); ++i) expect(roots[i].second < roots[i - 1].second);
  expect(roots.back().second < 1e-3);

  // reported ratio is stable under a 100x tighter tolerance
  {
    const auto ratio = frametol::FrameRatio::from_rho(1.0);
    const double loose = frametol::asymptotic_ratio(10000.0, ratio, 1e-12);
    const double tight = frametol::asymptotic_ratio(10000.0, ratio, 1e-14);
    expect(std::abs(loose - tight) < 1e-3);
  }

  std::string summary = "{\"subcommand\":\"selfcheck\",\"grid\":" + fmt(grid) +
                        ",\"checks\":" + fmt(checks) + ",\"failures\":" + fmt(failures) + "}\n";
  write_output(cfg.output, summary);
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perturbation tolerances for exponential frames on [-pi, pi]^d"};
  app.require_subcommand(1);
  CommonConfig cfg;

  auto add_common = [&](CLI::App* cmd, bool with_rho) {
    cmd->add_option("--d", cfg.d, "dimension (integer >= 1)");
    if (with_rho) cmd->add_option("--rho", cfg.rho, "frame-bound ratio A/B in (0, 1]");
    cmd->add_option("--tol", cfg.tol, "solver tolerance (>= 1e-14)");
    cmd->add_option("--format", cfg.format, "output format: csv or json");
    cmd->add_option("--output", cfg.output, "output path, - for stdout");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--trials", cfg.trials, "number of trials / systems");
    cmd->add_option("--grid", cfg.grid, "grid points for invariant scans");
  };

  auto* cmd_tolerance = app.add_subcommand("tolerance", "x_d, omega_d and the correction term");
  add_common(cmd_tolerance, true);
  auto* cmd_sweep = app.add_subcommand("sweep", "tolerance table over d = 1, 10, ..., dmax");
  add_common(cmd_sweep, true);
  cmd_sweep->add_option("--dmax", cfg.d_max, "largest dimension (<= 1e6)");
  auto* cmd_diagnose = app.add_subcommand("diagnose", "tolerance row plus limit diagnostics");
  add_common(cmd_diagnose, true);
  auto* cmd_lemma = app.add_subcommand("lemma", "randomized perturbation-bound certificates");
  add_common(cmd_lemma, false);
  auto* cmd_frame = app.add_subcommand("frame", "windowed lattice perturbation experiment");
  add_common(cmd_frame, false);
  cmd_frame->add_option("--delta", cfg.delta, "sup-norm perturbation radius");
  cmd_frame->add_option("--N", cfg.outer, "outer (node) window halfwidth");
  cmd_frame->add_option("--M", cfg.inner, "inner (test) window halfwidth");
  auto* cmd_selfcheck = app.add_subcommand("selfcheck", "kernel and tolerance invariant grids");
  add_common(cmd_selfcheck, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (cmd_tolerance->parsed()) return run_tolerance(cfg);
    if (cmd_sweep->parsed()) return run_sweep(cfg);
    if (cmd_diagnose->parsed()) return run_diagnose(cfg);
    if (cmd_lemma->parsed()) return run_lemma(cfg);
    if (cmd_frame->parsed()) return run_frame(cfg);
    if (cmd_selfcheck->parsed()) return run_selfcheck(cfg);
  } catch (const frametol::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
