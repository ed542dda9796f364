#include "frametol/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frametol/kernels.hpp"

namespace frametol {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
constexpr int max_solver_iterations = 200;

void check_domain(double d, double x) {
  if (!(d >= 1.0)) throw std::domain_error("dimension must satisfy d >= 1");
  if (!(x > 0.0) || !(x <= 0.25)) throw std::domain_error("x must lie in (0, 1/4]");
}

double log_f(double y) { return std::log1p(kernels::h_eval(y)); }
double log_g(double y) { return std::log1p(kernels::sinc_m1(y)); }

}  // namespace

namespace tolerance_detail {

double root_gap(double d, double rho, double x) {
  const double y = pi * x;
  return (std::expm1(d * log_f(y)) - rho) - std::expm1(d * log_g(y));
}

}  // namespace tolerance_detail

FrameRatio::FrameRatio(double a, double b) : A(a), B(b), rho(a / b), c(1.0 + a / b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a > 0.0) || !(a <= b))
    throw std::domain_error("frame constants must satisfy 0 < A <= B (rho in (0, 1])");
}

double D_eval(double d, double x) {
  check_domain(d, x);
  const double y = pi * x;
  return std::expm1(d * log_f(y)) - std::expm1(d * log_g(y));
}

double D_prime(double d, double x) {
  check_domain(d, x);
  const double y = pi * x;
  return d * pi * (std::exp((d - 1.0) * log_f(y)) * kernels::f_prime(y) -
                   std::exp((d - 1.0) * log_g(y)) * kernels::g_prime(y));
}

double D_second(double d, double x) {
  check_domain(d, x);
  const double y = pi * x;
  const double fp = kernels::f_prime(y);
  const double gp = kernels::g_prime(y);
  const double curvature = std::exp((d - 1.0) * log_f(y)) * kernels::f_second(y) -
                           std::exp((d - 1.0) * log_g(y)) * kernels::g_second(y);
  const double slope_sq = std::exp((d - 2.0) * log_f(y)) * fp * fp -
                          std::exp((d - 2.0) * log_g(y)) * gp * gp;
  return d * pi * pi * ((d - 1.0) * slope_sq + curvature);
}

double omega_d(double d, const FrameRatio& ratio) {
  if (!(d >= 1.0)) throw std::domain_error("dimension must satisfy d >= 1");
  return std::log1p(ratio.rho) / (pi * d);
}

double correction_term(double d, const FrameRatio& ratio) {
  if (!(d >= 1.0)) throw std::domain_error("dimension must satisfy d >= 1");
  const double l = std::log1p(ratio.rho);
  return l * l / (6.0 * pi * (1.0 + 1.0 / ratio.rho) * d * d);
}

ToleranceReport solve_x_d(double d, const FrameRatio& ratio, double tol) {
  if (!(d >= 1.0)) throw std::domain_error("dimension must satisfy d >= 1");
  if (!(tol >= 1e-14)) throw std::domain_error("solver tolerance must be >= 1e-14");

  const double rho = ratio.rho;
  const double omega = omega_d(d, ratio);
  const double corr = correction_term(d, ratio);
  const double residual_tol = tol * std::max(1.0, rho);
  const double x_tol = std::min(tol, corr * 1e-4);

  // D_d(eps) < rho <= D_d(1/4) and D_d is strictly increasing, so the
  // bracket stays valid throughout. Endpoints are never evaluated.
  double lo = std::numeric_limits<double>::epsilon();
  double hi = 0.25;
  double x = std::clamp(omega + corr, lo, hi);  // x_d = omega + corr + O(corr/d)

  for (int iteration = 1; iteration <= max_solver_iterations; ++iteration) {
    const double gap = tolerance_detail::root_gap(d, rho, x);
    const double slope = D_prime(d, x);
    const double step = gap / slope;
    // Second stop clause: step below a few ulp of x means the root is
    // resolved to machine precision even when corr*1e-4 underflows it.
    const bool located = std::abs(step) <= 0.5 * x_tol ||
                         std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * x;
    if (std::abs(gap) <= residual_tol && located) {
      return {d,   rho, x,       omega,   corr, (x - omega) / corr,
              std::abs(gap), hi - lo, iteration};
    }
    if (gap < 0.0)
      lo = x;
    else
      hi = x;
    double next = x - step;
    if (!std::isfinite(next) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw ConvergenceError("x_d solver did not converge within " +
                         std::to_string(max_solver_iterations) +
                         " iterations (d=" + std::to_string(d) +
                         ", rho=" + std::to_string(ratio.rho) + ", tol=" + std::to_string(tol) +
                         ")");
}

double asymptotic_ratio(double d, const FrameRatio& ratio, double tol) {
  return solve_x_d(d, ratio, tol).ratio;
}

MainpropDiagnostics mainprop_diagnostics(double d, const FrameRatio& ratio) {
  const double omega = omega_d(d, ratio);
  const ToleranceReport report = solve_x_d(d, ratio);
  return {-d * tolerance_detail::root_gap(d, ratio.rho, omega),
          D_prime(d, omega) / d,
          D_prime(d, report.x_d) / d};
}

ConvexWindow certify_convex_window(double d, double grid_step) {
  if (!(d >= 1.0)) throw std::domain_error("dimension must satisfy d >= 1");
  if (!(grid_step > 0.0) || !(grid_step <= 1e-4))
    throw std::domain_error("grid_step must lie in (0, 1e-4]");

  // First nonpositive D'' sample; a sample of exactly 0 already fails.
  double scan_end = 0.25;
  for (long k = 1;; ++k) {
    const double x = static_cast<double>(k) * grid_step;
    if (x > 0.25) break;
    if (!(D_second(d, x) > 0.0)) {
      scan_end = x;
      break;
    }
  }

  // First sign change of f''(pi x), bracketed on the grid and refined by
  // bisection. f''(0) = 2/3, so the scan starts positive.
  auto f2 = [](double x) { return kernels::f_second(pi * x); };
  double left = 0.0;
  double right = 0.25;
  for (long k = 1;; ++k) {
    const double x = static_cast<double>(k) * grid_step;
    if (x > 0.25) break;
    if (!(f2(x) > 0.0)) {
      right = x;
      break;
    }
    left = x;
  }
  for (int i = 0; i < 80 && right - left > 1e-15; ++i) {
    const double mid = 0.5 * (left + right);
    if (f2(mid) > 0.0)
      left = mid;
    else
      right = mid;
  }
  const double f_second_zero = 0.5 * (left + right);

  return {d, std::min(scan_end, f_second_zero), grid_step, f_second_zero, scan_end};
}

std::vector<std::pair<double, double>> corollary_check(const FrameRatio& ratio,
                                                       const std::vector<double>& d_list) {
  for (std::size_t i = 1; i < d_list.size(); ++i)
    if (!(d_list[i] > d_list[i - 1])) throw std::domain_error("d_list must be sorted increasing");
  std::vector<std::pair<double, double>> result;
  result.reserve(d_list.size());
  for (double d : d_list) result.emplace_back(d, solve_x_d(d, ratio).x_d);
  return result;
}

}  // namespace frametol
