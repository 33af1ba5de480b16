#pragma once

// Test-only reference for Bessel functions: direct quadrature of
//   J_n(x) = (1/pi) * integral_0^pi cos(n t - x sin t) dt.
// The integrand is even and 2*pi periodic, so the composite trapezoid rule on
// [0, pi] converges geometrically once the node count exceeds |x| + n.

#include <cmath>
#include <numbers>

namespace oracle {

inline double bessel_quadrature(int n, double x, int intervals = 512) {
  const double h = std::numbers::pi / intervals;
  double sum = 0.5 * (std::cos(0.0) + std::cos(n * std::numbers::pi));
  for (int i = 1; i < intervals; ++i) {
    const double t = i * h;
    sum += std::cos(n * t - x * std::sin(t));
  }
  return sum / intervals;
}

/// k-th positive zero of the quadrature J_n by scanning and bisection.
inline double bessel_zero_bisection(int n, int k, double scan_step = 0.05) {
  int found = 0;
  double lo = 0.05;
  double f_lo = bessel_quadrature(n, lo);
  while (true) {
    const double hi = lo + scan_step;
    const double f_hi = bessel_quadrature(n, hi);
    if ((f_lo < 0.0) != (f_hi < 0.0) && ++found == k) {
      double a = lo, b = hi, fa = f_lo;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = bessel_quadrature(n, m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    f_lo = f_hi;
  }
}

}  // namespace oracle
