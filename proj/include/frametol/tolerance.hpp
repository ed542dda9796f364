#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

// Perturbation tolerances for exponential frames on [-pi, pi]^d with
// frame constants 0 < A <= B. Two tolerances are computed and compared:
//
//   omega_d = ln(1 + A/B) / (pi d)            (explicit)
//   x_d     : root of D_d(x) = A/B in (0,1/4] (implicit), where
//   D_d(x)  = f(pi x)^d - g(pi x)^d
//
// with f, g from kernels.hpp. D_d is strictly increasing on (0, 1/4) and
// convex on a certified subinterval, which the solver and the
// diagnostics exploit. The difference x_d - omega_d shrinks like
// [ln(1+A/B)]^2 / (6 pi (1+B/A) d^2); `ratio` in ToleranceReport is the
// difference divided by that correction term and tends to 1 as d grows.

namespace frametol {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Frame-constant pair (A, B); rho = A/B in (0, 1] is the only parameter
// the tolerances depend on.
struct FrameRatio {
  double A;
  double B;
  double rho;  // A/B
  double c;    // 1 + rho

  FrameRatio(double a, double b);
  static FrameRatio from_rho(double rho) { return {rho, 1.0}; }
};

struct ToleranceReport {
  double d;
  double rho;
  double x_d;
  double omega_d;
  double correction;     // [ln(1+rho)]^2 / (6 pi (1+1/rho) d^2)
  double ratio;          // (x_d - omega_d) / correction
  double residual;       // |D_d(x_d) - rho| at the returned root
  double bracket_width;  // final solver bracket
  int iterations;
};

// Largest grid-certified window (0, delta) on which D_d'' stays
// positive. The binding constraint is the first sign change of
// f''(pi x); the raw scan endpoint is kept alongside it.
struct ConvexWindow {
  double d;
  double delta;
  double grid_step;
  double f_second_first_zero;      // first sign change of f''(pi x), refined
  double d_second_positive_until;  // first nonpositive D'' sample, or 1/4
};

// The three quantities whose d -> infinity limits are
// (rho/6)[ln(1+rho)]^2, pi(1+rho), pi(1+rho).
struct MainpropDiagnostics {
  double scaled_defect;   // d * (rho - D_d(omega_d))
  double slope_at_omega;  // D_d'(omega_d) / d
  double slope_at_root;   // D_d'(x_d) / d
};

// Domain for all three: d >= 1, x in (0, 1/4]. Values may saturate to
// +inf when d ln f(pi x) overflows; this preserves monotone semantics.
double D_eval(double d, double x);
double D_prime(double d, double x);
double D_second(double d, double x);

double omega_d(double d, const FrameRatio& ratio);
double correction_term(double d, const FrameRatio& ratio);

// Safeguarded Newton inside the bracket (eps, 1/4]. Stops once the
// residual is within tol*max(1, rho) and the root is located to
// min(tol, correction*1e-4) absolute, so the cancellation-prone ratio
// keeps at least four significant digits. Requires tol >= 1e-14.
ToleranceReport solve_x_d(double d, const FrameRatio& ratio, double tol = 1e-12);

double asymptotic_ratio(double d, const FrameRatio& ratio, double tol = 1e-12);

MainpropDiagnostics mainprop_diagnostics(double d, const FrameRatio& ratio);

// Scans D'' on a uniform grid from grid_step up to 1/4 and intersects
// with the f'' sign constraint. A sample that is exactly zero counts as
// a positivity failure. Requires 0 < grid_step <= 1e-4.
ConvexWindow certify_convex_window(double d, double grid_step = 1e-4);

// x_d for each d in an increasing list; the sequence decreases toward 0.
std::vector<std::pair<double, double>> corollary_check(const FrameRatio& ratio,
                                                       const std::vector<double>& d_list);

namespace tolerance_detail {
// D_d(x) - rho in the expm1 formulation; keeps ~2 ulp absolute accuracy
// even when both powers sit within 2^-40 of 1 (small x, large d).
double root_gap(double d, double rho, double x);
}

}  // namespace frametol
