#pragma once

// Numerical integration of the three-level Schroedinger equation
//   i da0/dt = (U - eps(t)) a0 + sqrt(2) gamma a1
//   i da1/dt = sqrt(2) gamma (a0 + a2)
//   i da2/dt = (U + eps(t)) a2 + sqrt(2) gamma a1
// with eps(t) = eps0 cos(omega t), plus one-period monodromy and numeric
// quasienergies.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "floquet_well/model.hpp"
#include "floquet_well/ode.hpp"

namespace floquet_well::propagate {

/// da/dt = -i H(t) a. With a schedule the amplitude is drive_value(t); the
/// cos(omega t) carrier is never re-phased.
Amplitudes exact_rhs(double t, const Amplitudes& a, const ModelParams& params,
                     const DrivingSchedule* schedule = nullptr);

/// da/dt for a fixed driving amplitude (the schedule already resolved).
Amplitudes exact_rhs_at(double t, const Amplitudes& a, const ModelParams& params,
                        double epsilon0);

/// Closed-form phases of the diagonal part of H on a stretch of constant
/// driving amplitude starting at t0:
///   theta_0,2(t) = U (t - t0) -/+ (eps0 / omega) (sin(omega t) - sin(omega t0)).
/// With c_0 = e^{i theta_0} a_0, c_1 = a_1, c_2 = e^{i theta_2} a_2 only the
/// tunneling terms remain, so the integrator no longer has to follow the
/// fast rotation at |U -/+ eps|. The map is unitary and exact.
class RotatingFrame {
 public:
  RotatingFrame(const ModelParams& params, double epsilon0, double t0)
      : interaction_(params.interaction()),
        omega_(params.omega()),
        ratio_(epsilon0 / params.omega()),
        t0_(t0),
        sin0_(std::sin(params.omega() * t0)),
        coupling_(std::sqrt(2.0) * params.gamma()) {}

  /// (e^{i theta_0(t)}, e^{i theta_2(t)})
  std::array<Complex, 2> phases(double t) const {
    const double base = interaction_ * (t - t0_);
    const double drive = ratio_ * (std::sin(omega_ * t) - sin0_);
    return {std::polar(1.0, base - drive), std::polar(1.0, base + drive)};
  }

  Amplitudes to_lab(double t, const Amplitudes& c) const {
    const auto p = phases(t);
    return {std::conj(p[0]) * c[0], c[1], std::conj(p[1]) * c[2]};
  }

  Amplitudes from_lab(double t, const Amplitudes& a) const {
    const auto p = phases(t);
    return {p[0] * a[0], a[1], p[1] * a[2]};
  }

  /// dc/dt in the rotating frame.
  Amplitudes rhs(double t, const Amplitudes& c) const {
    const auto p = phases(t);
    const Complex minus_ig(0.0, -coupling_);
    return {minus_ig * p[0] * c[1],
            minus_ig * (std::conj(p[0]) * c[0] + std::conj(p[1]) * c[2]),
            minus_ig * p[1] * c[1]};
  }

 private:
  double interaction_;
  double omega_;
  double ratio_;
  double t0_;
  double sin0_;
  double coupling_;
};

/// Advances the lab-frame amplitudes a(t0) to a(t1) under a constant driving
/// amplitude, integrating in the rotating frame. `observe(t, a)` receives
/// lab-frame amplitudes at each sample in [t0, t1].
template <class Observer>
Amplitudes evolve(const ModelParams& params, double epsilon0, double t0, double t1,
                  const Amplitudes& a, std::span<const double> samples,
                  Observer&& observe, const ode::Tolerance& tolerance,
                  double& step_hint, ode::Stats* stats = nullptr) {
  const RotatingFrame frame(params, epsilon0, t0);
  auto rhs = [&frame](double t, const Amplitudes& c) { return frame.rhs(t, c); };
  auto lab_observe = [&](double t, const Amplitudes& c) { observe(t, frame.to_lab(t, c)); };
  const Amplitudes c = ode::integrate(rhs, t0, t1, frame.from_lab(t0, a), samples,
                                      lab_observe, tolerance, step_hint, stats);
  return frame.to_lab(t1, c);
}

struct IntegrateOptions {
  ode::Tolerance tolerance{};
  bool keep_amplitudes = false;
};

/// Samples at k * sample_dt for k = 0, 1, ... and at t_end. Throws
/// ParameterError for t_end <= 0 or sample_dt <= 0.
std::vector<double> sample_grid(double t_end, double sample_dt);

/// Propagates from t = 0 to t_end. Steps never straddle a schedule boundary
/// and the state is not renormalized. Throws IntegrationError on failure.
TimeSeries integrate(const StateAmplitudes& initial, double t_end,
                     const ModelParams& params,
                     const std::optional<DrivingSchedule>& schedule,
                     double sample_dt, const IntegrateOptions& options = {});

/// Same, on an explicit ascending sample grid within [0, t_end].
TimeSeries integrate_on(const StateAmplitudes& initial, double t_end,
                        const ModelParams& params,
                        const std::optional<DrivingSchedule>& schedule,
                        const std::vector<double>& samples,
                        const IntegrateOptions& options = {});

struct Monodromy {
  Eigen::Matrix3cd matrix;
  ModelParams params;

  /// max |U^dagger U - I|
  double unitarity_defect() const;
};

Monodromy monodromy(const ModelParams& params,
                    const ode::Tolerance& tolerance = {});

struct NumericQuasienergies {
  /// Indexed by analytic label; folded into [-omega/2, omega/2).
  std::array<double, 3> energies{};
  /// |<eigenvector | analytic mode>|^2 for the assigned pairs.
  std::array<double, 3> overlaps{};
  /// Some labels were assigned by sorted value inside a degenerate group.
  bool sorted_within_degenerate_group = false;
};

/// Folds a quasienergy into [-omega/2, omega/2).
double fold_quasienergy(double energy, double omega);

/// Distance between quasienergies modulo omega.
double quasienergy_distance(double lhs, double rhs, double omega);

/// Eigenphases of the monodromy, labeled against the closed-form modes.
NumericQuasienergies numeric_quasienergies(const Monodromy& m,
                                           double degeneracy_tol = 1e-3);
NumericQuasienergies numeric_quasienergies(const ModelParams& params);

}  // namespace floquet_well::propagate
