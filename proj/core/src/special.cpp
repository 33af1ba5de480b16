#include "floquet_well/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "floquet_well/model.hpp"

namespace floquet_well::special {

namespace {

constexpr double kSeriesLimit = 8.0;

// Ascending series sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!).
double series(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= half / i;
  double sum = term;
  const double q = half * half;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > half) break;
  }
  return sum;
}

// Miller backward recurrence normalized with J0 + 2 sum_k J_2k = 1. x > 0.
double miller(int n, double x) {
  constexpr double kBig = 1e100;
  constexpr double kSmall = 1e-100;
  const double top = std::max(static_cast<double>(n), x);
  int m = static_cast<int>(top + 20.0 + std::sqrt(40.0 * top));
  m += m % 2;

  const double two_over_x = 2.0 / x;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-30; // J_k
  double result = 0.0;
  double norm_sum = 0.0;
  for (int k = m; k > 0; --k) {
    const double prev = k * two_over_x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > kBig) {
      cur *= kSmall;
      next *= kSmall;
      result *= kSmall;
      norm_sum *= kSmall;
    }
    // cur now holds J_{k-1}
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm_sum += cur;
    if (k - 1 == n) result = cur;
  }
  norm_sum = 2.0 * norm_sum + cur;
  return result / norm_sum;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) {
    throw std::domain_error("bessel_j: negative order " + std::to_string(n) +
                            " (use bessel_parity)");
  }
  if (!std::isfinite(x)) throw std::domain_error("bessel_j: non-finite x");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;

  const double sign = (x < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
  const double ax = std::abs(x);
  const double value = ax <= kSeriesLimit ? series(n, ax) : miller(n, ax);
  return sign * value;
}

double bessel_parity(int n, double x) {
  if (n >= 0) return bessel_j(n, x);
  const int m = -n;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * bessel_j(m, x);
}

namespace {

double bisect(int n, double lo, double hi) {
  double f_lo = bessel_j(n, lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = bessel_j(n, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool brackets(int n, double lo, double hi) {
  return (bessel_j(n, lo) < 0.0) != (bessel_j(n, hi) < 0.0);
}

}  // namespace

double bessel_zero(int n, int k) {
  if (n < 0 || n > 5 || k < 1 || k > 10) {
    throw std::domain_error("bessel_zero: supported range is n in [0,5], k in [1,10]");
  }
  // first zero: scan; the first zero of J_n lies above n
  constexpr double kScanStep = 0.25;
  double lo = std::max(static_cast<double>(n), 0.5);
  while (!brackets(n, lo, lo + kScanStep)) {
    lo += kScanStep;
    if (lo > 60.0) throw InternalError("bessel_zero: failed to bracket first zero");
  }
  double zero = bisect(n, lo, lo + kScanStep);

  // later zeros: spacing tends to pi and stays within [pi - 0.1, pi + 0.5]
  // for n <= 5
  for (int i = 2; i <= k; ++i) {
    double a = zero + std::numbers::pi - 0.1;
    double b = zero + std::numbers::pi + 0.5;
    if (!brackets(n, a, b)) {
      a = zero + 1.0;
      while (!brackets(n, a, a + kScanStep)) {
        a += kScanStep;
        if (a > zero + 6.0) throw InternalError("bessel_zero: failed to bracket zero");
      }
      b = a + kScanStep;
    }
    zero = bisect(n, a, b);
  }
  return zero;
}

}  // namespace floquet_well::special
