#pragma once

// Parameter sweeps and protocol runners: quasienergy spectra and their
// crossings, tunneling times, frozen-population (CDT) checks and
// piecewise-driving switches.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "floquet_well/analytic.hpp"
#include "floquet_well/model.hpp"
#include "floquet_well/propagate.hpp"

namespace floquet_well::experiments {

/// Worker count for sweeps: FLOQUET_WELL_THREADS if set and > 0, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

struct SweepRequest {
  double interaction = 0.0;
  double omega = 50.0;
  double gamma = 0.5;
  double axis_min = 0.0;
  double axis_max = 6.0;
  double step = 0.05;
  /// Numeric quasienergies every `numeric_stride` axis points; 0 disables.
  std::size_t numeric_stride = 10;
  std::size_t workers = 0;  // 0: worker_count()
};

struct SpectrumSweep {
  double interaction = 0.0;
  double omega = 0.0;
  double gamma = 0.0;
  /// eps0 / omega values, strictly increasing.
  std::vector<double> axis;
  std::vector<std::array<double, 3>> analytic;
  std::vector<std::optional<std::array<double, 3>>> numeric;

  ModelParams params_at(std::size_t index) const;
};

/// Throws ParameterError for step <= 0 or an empty range.
SpectrumSweep sweep_spectrum(const SweepRequest& request);

enum class CrossingKind { kThreeLevel, kTwoLevel, kNone };

std::string to_string(CrossingKind kind);

struct CrossingReport {
  double location = 0.0;  // eps0 / omega
  CrossingKind kind = CrossingKind::kNone;
  double min_gap = 0.0;
  /// Labels whose pairwise gaps are within tolerance (all three for a
  /// three-level crossing, a pair for a two-level one, empty otherwise).
  std::vector<int> levels_involved;
};

/// Interior local minima of the analytic pairwise gaps, refined by golden
/// section and classified. Requires at least three axis points.
std::vector<CrossingReport> detect_crossings(const SpectrumSweep& sweep,
                                             double degeneracy_tol = 1e-3);

struct TunnelingResult {
  double time = 0.0;
  /// P2 reached the threshold.
  bool reached = false;
  /// Threshold never reached within the horizon; `time` is the P2 maximum.
  bool partial = false;
  /// J_n = 0 (|J_n| <= 1e-9): the pair never leaves |0,2>.
  bool no_tunneling = false;
  double peak_population = 0.0;
  double estimate = 0.0;
};

/// Starting from |0,2>: time of the P2 maximum inside the first excursion of
/// P2 above `threshold` (the excursion ends once P2 < 1/2). Horizon is four
/// times the closed-form estimate. threshold must lie in (0.5, 1).
TunnelingResult tunneling_time(const ModelParams& params, double threshold = 0.95);

struct CdtResult {
  bool is_cdt = false;
  double max_excursion = 0.0;
  Populations min_population{};
  Populations max_population{};
};

/// Numeric check that every P_j stays within flatness_tol of P_j(0) on
/// [0, horizon]. At t = 0 the full and slow amplitudes coincide.
CdtResult cdt_check(const ModelParams& params, const Amplitudes& initial_slow,
                    double horizon, double flatness_tol = 0.02,
                    double sample_dt = 0.01);

struct SwitchResult {
  TimeSeries numeric;
  TimeSeries analytic;
  /// Driving amplitude active at each sample.
  std::vector<double> active_epsilon0;
  double max_deviation = 0.0;
  /// Some segment strains the high-frequency assumption (u or gamma
  /// above omega/10).
  bool validity_warning = false;
};

/// Numeric path: one continuous integration honoring the schedule. Analytic
/// path: the Floquet superposition is refit at every boundary from the
/// physical amplitudes, so a(t) is continuous.
SwitchResult run_switch(const DrivingSchedule& schedule,
                        const ModelParams& params_base,
                        const StateAmplitudes& initial, double t_end,
                        double sample_dt);

/// Analytic path of run_switch on its own.
TimeSeries analytic_switch(const DrivingSchedule& schedule,
                           const ModelParams& params_base,
                           const StateAmplitudes& initial,
                           const std::vector<double>& samples);

enum class Engine { kAnalytic, kNumeric, kBoth };

struct PopulationRun {
  std::optional<TimeSeries> analytic;
  std::optional<TimeSeries> numeric;
  /// Only for Engine::kBoth.
  std::optional<double> max_deviation;
};

/// Analytic series uses |b'_j(t)|^2, numeric |a_j(t)|^2.
PopulationRun population_series(const ModelParams& params,
                                const Amplitudes& initial_slow, double t_end,
                                double sample_dt, Engine engine);

}  // namespace floquet_well::experiments
