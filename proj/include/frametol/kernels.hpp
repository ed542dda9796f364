#pragma once

// Scalar kernels underlying the exponential-frame tolerance functions:
//
//   g(y) = sinc(y) = sin(y)/y        (1 at y = 0)
//   f(y) = 1 - cos(y) + sin(y) + sinc(y)
//   h(y) = f(y) - 1
//
// and their first two derivatives. Everything downstream (the tolerance
// function D_d and the Gram builders) is assembled from these, so each
// kernel switches to a truncated series below a crossover |y| where the
// direct formula would hit 0/0 or catastrophic cancellation. Values are
// accurate to a few ulp across |y| <= pi; the direct formulas remain
// valid for any finite y.

namespace frametol::kernels {

// Crossover for sinc, g', g'' and h. A degree-8 even series keeps the
// truncation error below 1e-18 at this radius.
inline constexpr double series_cutoff = 1e-2;

// sinc(y) - 1 cancels badly up to moderate |y|, so its series band is
// wider (degree-16 even series, truncation ~1e-23 at the edge).
inline constexpr double sinc_m1_cutoff = 0.5;

double sinc(double y);
double sinc_m1(double y);   // sinc(y) - 1 without cancellation
double g_prime(double y);   // (y cos y - sin y)/y^2, 0 at y = 0
double g_second(double y);  // (2 sin y - 2 y cos y - y^2 sin y)/y^3, -1/3 at 0
double f_eval(double y);
double f_prime(double y);   // sin y + cos y + g'(y)
double f_second(double y);  // cos y - sin y + g''(y)
double h_eval(double y);    // evaluated directly, not as f - 1

// sinc(pi*u) with exact zeros at nonzero integers and exact 1 at 0.
// Argument-reduced, so it stays accurate for arbitrary node differences.
double sinc_pi(double u);

namespace detail {
// Both branches of each kernel, exposed so the crossover band can be
// cross-checked. The direct branches must not be called at y = 0.
double sinc_series(double y);
double sinc_direct(double y);
double sinc_m1_series(double y);
double sinc_m1_direct(double y);
double g_prime_series(double y);
double g_prime_direct(double y);
double g_second_series(double y);
double g_second_direct(double y);
double h_series(double y);
double h_direct(double y);
}  // namespace detail

}  // namespace frametol::kernels
