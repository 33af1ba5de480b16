#pragma once

// Adaptive Dormand-Prince 5(4) for the three-component complex state, with
// the 4th-order continuous extension for output between steps.

#include <algorithm>
#include <array>
#include <initializer_list>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include "floquet_well/model.hpp"

namespace floquet_well::ode {

struct Tolerance {
  double relative = 1e-10;
  double absolute = 1e-12;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace detail {

inline Amplitudes axpy(const Amplitudes& y, double h,
                       std::initializer_list<std::pair<double, const Amplitudes*>> terms) {
  Amplitudes out = y;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t j = 0; j < 3; ++j) out[j] += (h * coef) * (*k)[j];
  }
  return out;
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from t0 to exactly t1 without stepping past
/// t1. `observe(t, y)` is called for every entry of `samples` (ascending,
/// within [t0, t1]) using dense output. `step_hint` carries the step size
/// between calls; pass 0 to pick one automatically. Throws IntegrationError
/// on step-size underflow.
template <class Rhs, class Observer>
Amplitudes integrate(Rhs&& rhs, double t0, double t1, Amplitudes y,
                     std::span<const double> samples, Observer&& observe,
                     const Tolerance& tol, double& step_hint,
                     Stats* stats = nullptr) {
  // Butcher tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0,
                   d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0,
                   d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0,
                   d7 = 69997945.0 / 29380423.0;

  std::size_t next_sample = 0;
  auto emit_until = [&](double t_limit, auto&& value_at) {
    while (next_sample < samples.size() && samples[next_sample] <= t_limit) {
      const double ts = samples[next_sample];
      observe(ts, value_at(ts));
      ++next_sample;
    }
  };

  double t = t0;
  emit_until(t0, [&](double) { return y; });
  if (!(t1 > t0)) return y;

  Amplitudes k1 = rhs(t, y);
  std::size_t evaluations = 1;

  auto error_scale = [&](std::size_t j, const Amplitudes& a, const Amplitudes& b) {
    return tol.absolute + tol.relative * std::max(std::abs(a[j]), std::abs(b[j]));
  };

  double h_proposed = step_hint;
  if (!(h_proposed > 0.0)) {
    // Hairer's starting-step heuristic, first-order part only
    double d0 = 0.0, dd1 = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double sk = tol.absolute + tol.relative * std::abs(y[j]);
      d0 = std::max(d0, std::abs(y[j]) / sk);
      dd1 = std::max(dd1, std::abs(k1[j]) / sk);
    }
    h_proposed = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
  }

  constexpr std::size_t kMaxSteps = 200'000'000;
  std::size_t accepted = 0, rejected = 0;
  bool last_rejected = false;

  while (t < t1) {
    if (accepted + rejected > kMaxSteps) {
      throw IntegrationError("integrator exceeded the step budget at t = " +
                                 std::to_string(t), t);
    }
    if (h_proposed < 1e-14 * std::max(1.0, std::abs(t))) {
      throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
    }
    double h = h_proposed;
    bool final_step = false;
    if (t + 1.0000001 * h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    const Amplitudes k2 = rhs(t + c2 * h, detail::axpy(y, h, {{a21, &k1}}));
    const Amplitudes k3 = rhs(t + c3 * h, detail::axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const Amplitudes k4 =
        rhs(t + c4 * h, detail::axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Amplitudes k5 = rhs(
        t + c5 * h, detail::axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Amplitudes k6 = rhs(
        t + h, detail::axpy(y, h,
                            {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Amplitudes y_new = detail::axpy(
        y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const double t_new = final_step ? t1 : t + h;
    const Amplitudes k7 = rhs(t_new, y_new);
    evaluations += 6;

    double err = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const Complex e = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] +
                             e6 * k6[j] + e7 * k7[j]);
      const double r = std::abs(e) / error_scale(j, y, y_new);
      err += r * r;
    }
    err = std::sqrt(err / 3.0);

    if (err <= 1.0) {
      // continuous extension coefficients
      std::array<Amplitudes, 5> cont;
      for (std::size_t j = 0; j < 3; ++j) {
        const Complex diff = y_new[j] - y[j];
        const Complex bspl = h * k1[j] - diff;
        cont[0][j] = y[j];
        cont[1][j] = diff;
        cont[2][j] = bspl;
        cont[3][j] = diff - h * k7[j] - bspl;
        cont[4][j] = h * (d1 * k1[j] + d3 * k3[j] + d4 * k4[j] + d5 * k5[j] +
                          d6 * k6[j] + d7 * k7[j]);
      }
      const double t_old = t;
      const double h_used = h;
      emit_until(t_new, [&](double ts) {
        if (ts == t_new) return y_new;
        const double theta = (ts - t_old) / h_used;
        const double theta1 = 1.0 - theta;
        Amplitudes out{};
        for (std::size_t j = 0; j < 3; ++j) {
          out[j] = cont[0][j] +
                   theta * (cont[1][j] +
                            theta1 * (cont[2][j] +
                                      theta * (cont[3][j] + theta1 * cont[4][j])));
        }
        return out;
      });

      y = y_new;
      k1 = k7;
      t = t_new;
      ++accepted;

      double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      factor = std::clamp(factor, 0.2, 5.0);
      if (last_rejected) factor = std::min(factor, 1.0);
      last_rejected = false;
      // a step shortened to land on t1 says little about the natural size
      if (!final_step || h * factor < h_proposed) h_proposed = h * factor;
    } else {
      h_proposed = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
      ++rejected;
    }
  }

  // samples that sit on t1 up to rounding
  emit_until(t1 + 1e-12 * std::max(1.0, std::abs(t1)), [&](double) { return y; });

  step_hint = h_proposed;
  if (stats != nullptr) {
    stats->accepted += accepted;
    stats->rejected += rejected;
    stats->evaluations += evaluations;
  }
  return y;
}

}  // namespace floquet_well::ode
