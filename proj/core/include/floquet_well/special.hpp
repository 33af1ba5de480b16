#pragma once

// Bessel functions of the first kind at integer order.

namespace floquet_well::special {

/// J_n(x) for n >= 0. Absolute accuracy ~1e-14 for |x| <= 50, n <= 5.
/// Throws std::domain_error for n < 0 or non-finite x.
double bessel_j(int n, double x);

/// J_n(x) for any integer n, using J_{-n}(x) = (-1)^n J_n(x).
double bessel_parity(int n, double x);

/// k-th positive zero of J_n, n in [0, 5], k in [1, 10]; accurate to ~1e-13.
/// Throws std::domain_error outside the supported range.
double bessel_zero(int n, int k);

}  // namespace floquet_well::special
