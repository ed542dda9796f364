#include "frametol/kernels.hpp"

#include <cmath>

namespace frametol::kernels {

namespace detail {

// sinc(y) = sum_k (-1)^k y^{2k} / (2k+1)!
double sinc_series(double y) {
  const double y2 = y * y;
  return 1.0 + y2 * (-1.0 / 6 + y2 * (1.0 / 120 + y2 * (-1.0 / 5040 + y2 * (1.0 / 362880))));
}

double sinc_direct(double y) { return std::sin(y) / y; }

double sinc_m1_series(double y) {
  const double y2 = y * y;
  double s = 1.0 / 355687428096000;  // 1/17!
  s = s * y2 - 1.0 / 1307674368000;
  s = s * y2 + 1.0 / 6227020800;
  s = s * y2 - 1.0 / 39916800;
  s = s * y2 + 1.0 / 362880;
  s = s * y2 - 1.0 / 5040;
  s = s * y2 + 1.0 / 120;
  s = s * y2 - 1.0 / 6;
  return s * y2;
}

double sinc_m1_direct(double y) { return std::sin(y) / y - 1.0; }

double g_prime_series(double y) {
  const double y2 = y * y;
  return y * (-1.0 / 3 + y2 * (1.0 / 30 + y2 * (-1.0 / 840 + y2 * (1.0 / 45360))));
}

double g_prime_direct(double y) { return (y * std::cos(y) - std::sin(y)) / (y * y); }

double g_second_series(double y) {
  const double y2 = y * y;
  return -1.0 / 3 + y2 * (1.0 / 10 + y2 * (-1.0 / 168 + y2 * (1.0 / 6480 + y2 * (-1.0 / 443520))));
}

double g_second_direct(double y) {
  return (2.0 * std::sin(y) - 2.0 * y * std::cos(y) - y * y * std::sin(y)) / (y * y * y);
}

// h(y) = y + y^2/3 - y^3/6 - y^4/30 + y^5/120 + y^6/840 - y^7/5040 - y^8/45360 + O(y^9)
double h_series(double y) {
  double s = -1.0 / 45360;
  s = s * y - 1.0 / 5040;
  s = s * y + 1.0 / 840;
  s = s * y + 1.0 / 120;
  s = s * y - 1.0 / 30;
  s = s * y - 1.0 / 6;
  s = s * y + 1.0 / 3;
  s = s * y + 1.0;
  return s * y;
}

double h_direct(double y) { return -std::cos(y) + std::sin(y) + sinc_direct(y); }

}  // namespace detail

double sinc(double y) {
  return std::abs(y) <= series_cutoff ? detail::sinc_series(y) : detail::sinc_direct(y);
}

double sinc_m1(double y) {
  return std::abs(y) <= sinc_m1_cutoff ? detail::sinc_m1_series(y) : detail::sinc_m1_direct(y);
}

double g_prime(double y) {
  return std::abs(y) <= series_cutoff ? detail::g_prime_series(y) : detail::g_prime_direct(y);
}

double g_second(double y) {
  return std::abs(y) <= series_cutoff ? detail::g_second_series(y) : detail::g_second_direct(y);
}

double h_eval(double y) {
  return std::abs(y) <= series_cutoff ? detail::h_series(y) : detail::h_direct(y);
}

double f_eval(double y) { return 1.0 + h_eval(y); }

double f_prime(double y) { return std::sin(y) + std::cos(y) + g_prime(y); }

double f_second(double y) { return std::cos(y) - std::sin(y) + g_second(y); }

double sinc_pi(double u) {
  const double k = std::nearbyint(u);
  const double r = u - k;  // exact: |r| <= 1/2 and u, k share scale
  if (r == 0.0) return k == 0.0 ? 1.0 : 0.0;
  constexpr double pi = 3.141592653589793238462643383279502884;
  const double v = std::sin(pi * r) / (pi * u);
  return std::fmod(k, 2.0) == 0.0 ? v : -v;
}

}  // namespace frametol::kernels
