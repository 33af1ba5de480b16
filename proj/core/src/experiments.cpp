#include "floquet_well/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "floquet_well/ode.hpp"

namespace floquet_well::experiments {

std::size_t worker_count() {
  if (const char* env = std::getenv("FLOQUET_WELL_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) {
      return static_cast<std::size_t>(value);
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ModelParams SpectrumSweep::params_at(std::size_t index) const {
  return ModelParams::make(axis.at(index) * omega, omega, gamma, interaction);
}

SpectrumSweep sweep_spectrum(const SweepRequest& request) {
  if (!(request.step > 0.0) || !std::isfinite(request.step)) {
    throw ParameterError("sweep step must be finite and > 0");
  }
  if (!(request.axis_max >= request.axis_min) || request.axis_min < 0.0) {
    throw ParameterError("sweep range must satisfy 0 <= axis_min <= axis_max");
  }
  // validates omega, gamma and the interaction once up front
  (void)ModelParams::make(request.axis_min * request.omega, request.omega,
                          request.gamma, request.interaction);

  SpectrumSweep sweep;
  sweep.interaction = request.interaction;
  sweep.omega = request.omega;
  sweep.gamma = request.gamma;
  const auto points = static_cast<std::size_t>(
      std::floor((request.axis_max - request.axis_min) / request.step + 1e-9)) + 1;
  sweep.axis.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    sweep.axis.push_back(request.axis_min + static_cast<double>(i) * request.step);
  }
  sweep.analytic.resize(points);
  sweep.numeric.resize(points);

  const std::size_t workers = request.workers > 0 ? request.workers : worker_count();
  parallel_for(points, workers, [&](std::size_t i) {
    const ModelParams params = sweep.params_at(i);
    sweep.analytic[i] = analytic::quasienergies(params);
    if (request.numeric_stride > 0 && i % request.numeric_stride == 0) {
      sweep.numeric[i] = propagate::numeric_quasienergies(params).energies;
    }
  });
  return sweep;
}

std::string to_string(CrossingKind kind) {
  switch (kind) {
    case CrossingKind::kThreeLevel: return "three-level";
    case CrossingKind::kTwoLevel: return "two-level";
    case CrossingKind::kNone: return "none";
  }
  return "none";
}

namespace {

constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

std::array<double, 3> pair_gaps(const std::array<double, 3>& e) {
  std::array<double, 3> gaps{};
  for (std::size_t p = 0; p < 3; ++p) {
    gaps[p] = std::abs(e[static_cast<std::size_t>(kPairs[p][0])] -
                       e[static_cast<std::size_t>(kPairs[p][1])]);
  }
  return gaps;
}

template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol = 1e-11) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<CrossingReport> detect_crossings(const SpectrumSweep& sweep,
                                             double degeneracy_tol) {
  const std::size_t points = sweep.axis.size();
  if (points < 3) throw ParameterError("detect_crossings needs at least 3 points");

  auto energies_at = [&](double x) {
    return analytic::quasienergies(
        ModelParams::make(x * sweep.omega, sweep.omega, sweep.gamma, sweep.interaction));
  };

  std::vector<double> candidates;
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<double> gap(points);
    for (std::size_t i = 0; i < points; ++i) gap[i] = pair_gaps(sweep.analytic[i])[p];
    for (std::size_t i = 1; i + 1 < points; ++i) {
      const bool local_min = gap[i] <= gap[i - 1] && gap[i] <= gap[i + 1] &&
                             (gap[i] < gap[i - 1] || gap[i] < gap[i + 1]);
      if (!local_min) continue;
      const double x = golden_section_min(
          [&](double v) { return pair_gaps(energies_at(v))[p]; }, sweep.axis[i - 1],
          sweep.axis[i + 1]);
      candidates.push_back(x);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  // minima of different pairs at the same spot describe one event
  const double merge = 2.0 * (sweep.axis[1] - sweep.axis[0]);
  std::vector<CrossingReport> reports;
  for (std::size_t i = 0; i < candidates.size();) {
    std::size_t j = i + 1;
    while (j < candidates.size() && candidates[j] - candidates[i] <= merge) ++j;

    // keep the candidate where the levels come closest
    double location = candidates[i];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = i; c < j; ++c) {
      const auto gaps = pair_gaps(energies_at(candidates[c]));
      const double smallest = *std::min_element(gaps.begin(), gaps.end());
      if (smallest < best) {
        best = smallest;
        location = candidates[c];
      }
    }

    const auto gaps = pair_gaps(energies_at(location));
    CrossingReport report;
    report.location = location;
    report.min_gap = *std::min_element(gaps.begin(), gaps.end());
    std::vector<std::size_t> close;
    for (std::size_t p = 0; p < 3; ++p) {
      if (gaps[p] <= degeneracy_tol) close.push_back(p);
    }
    if (close.size() == 3) {
      report.kind = CrossingKind::kThreeLevel;
      report.levels_involved = {0, 1, 2};
    } else if (close.size() == 1) {
      report.kind = CrossingKind::kTwoLevel;
      report.levels_involved = {kPairs[close[0]][0], kPairs[close[0]][1]};
    }
    reports.push_back(std::move(report));
    i = j;
  }
  return reports;
}

TunnelingResult tunneling_time(const ModelParams& params, double threshold) {
  if (!(threshold > 0.5 && threshold < 1.0)) {
    throw ParameterError("tunneling threshold must lie in (0.5, 1)");
  }
  TunnelingResult result;
  result.estimate = analytic::tunneling_time_estimate(params);
  // At a computed Bessel zero J_n is ~1e-17 rather than 0; any transfer
  // would take beyond ~1e9 time units, so treat it as frozen.
  constexpr double kFrozenCoupling = 1e-9;
  if (std::abs(analytic::renormalized_coupling(params).coupling) <= kFrozenCoupling ||
      !std::isfinite(result.estimate)) {
    result.no_tunneling = true;
    result.time = std::numeric_limits<double>::infinity();
    return result;
  }

  const double horizon = 4.0 * result.estimate;
  // resolve the driving period as well as the slow envelope
  const double dt = std::min(params.period() / 20.0, result.estimate / 2000.0);
  const double chunk = std::max(result.estimate / 8.0, 50.0 * dt);

  bool in_excursion = false;
  bool done = false;
  double global_max = -1.0;
  double global_max_time = 0.0;
  double peak = -1.0;
  double peak_time = 0.0;
  auto observe = [&](double t, const Amplitudes& a) {
    if (done) return;
    const double p2 = std::norm(a[2]);
    if (p2 > global_max) {
      global_max = p2;
      global_max_time = t;
    }
    if (!in_excursion && p2 >= threshold) in_excursion = true;
    if (in_excursion) {
      if (p2 > peak) {
        peak = p2;
        peak_time = t;
      }
      if (p2 < 0.5) done = true;
    }
  };

  Amplitudes state{1.0, 0.0, 0.0};
  double step_hint = 0.0;
  std::vector<double> samples;
  std::size_t index = 0;
  double t = 0.0;
  while (!done && t < horizon) {
    const double t_next = std::min(t + chunk, horizon);
    samples.clear();
    for (;; ++index) {
      const double ts = static_cast<double>(index) * dt;
      if (ts > t_next) break;
      samples.push_back(ts);
    }
    state = propagate::evolve(params, params.epsilon0(), t, t_next, state, samples, observe,
                              ode::Tolerance{}, step_hint);
    t = t_next;
  }

  if (in_excursion) {
    result.reached = true;
    result.time = peak_time;
    result.peak_population = peak;
  } else {
    result.partial = true;
    result.time = global_max_time;
    result.peak_population = global_max;
  }
  return result;
}

CdtResult cdt_check(const ModelParams& params, const Amplitudes& initial_slow,
                    double horizon, double flatness_tol, double sample_dt) {
  const StateAmplitudes initial(initial_slow);
  const TimeSeries series =
      propagate::integrate(initial, horizon, params, std::nullopt, sample_dt);

  CdtResult result;
  const Populations start = series.populations.front();
  result.min_population = start;
  result.max_population = start;
  for (const Populations& p : series.populations) {
    for (std::size_t j = 0; j < 3; ++j) {
      result.min_population[j] = std::min(result.min_population[j], p[j]);
      result.max_population[j] = std::max(result.max_population[j], p[j]);
      result.max_excursion = std::max(result.max_excursion, std::abs(p[j] - start[j]));
    }
  }
  result.is_cdt = result.max_excursion <= flatness_tol;
  return result;
}

TimeSeries analytic_switch(const DrivingSchedule& schedule,
                           const ModelParams& params_base,
                           const StateAmplitudes& initial,
                           const std::vector<double>& samples) {
  TimeSeries series;
  Amplitudes physical = initial.values();  // a(t) at the current segment start
  const auto& segments = schedule.segments();
  std::size_t next = 0;
  for (std::size_t i = 0; i < segments.size() && next < samples.size(); ++i) {
    const double start = segments[i].start_time;
    const double end = schedule.segment_end(i);
    const ModelParams params = params_base.with_epsilon0(segments[i].epsilon0);

    // refit from the physical state under this segment's phase convention
    const Amplitudes slow_start = analytic::full_to_slow(params, physical, start);
    const double norm = std::sqrt(squared_norm(slow_start));
    Amplitudes normalized = slow_start;
    for (Complex& c : normalized) c /= norm;
    const analytic::AnalyticSolution solution =
        analytic::fit_superposition(params, normalized);

    while (next < samples.size() && samples[next] < end) {
      const double t = samples[next];
      series.push(t, analytic::slow_amplitudes(solution, t - start), false);
      ++next;
    }
    if (std::isfinite(end)) {
      physical = analytic::slow_to_full(params, analytic::slow_amplitudes(solution, end - start),
                                        end);
    }
  }
  return series;
}

SwitchResult run_switch(const DrivingSchedule& schedule,
                        const ModelParams& params_base,
                        const StateAmplitudes& initial, double t_end,
                        double sample_dt) {
  const std::vector<double> samples = propagate::sample_grid(t_end, sample_dt);

  SwitchResult result;
  result.numeric = propagate::integrate_on(initial, t_end, params_base, schedule, samples);
  result.analytic = analytic_switch(schedule, params_base, initial, samples);
  result.max_deviation = max_population_deviation(result.numeric, result.analytic);
  result.active_epsilon0.reserve(samples.size());
  for (double t : samples) result.active_epsilon0.push_back(schedule.drive_value(t));

  const double limit = params_base.omega() / 10.0;
  result.validity_warning =
      params_base.high_frequency_strained() || params_base.gamma() > limit;
  return result;
}

PopulationRun population_series(const ModelParams& params,
                                const Amplitudes& initial_slow, double t_end,
                                double sample_dt, Engine engine) {
  const StateAmplitudes initial(initial_slow);
  const std::vector<double> samples = propagate::sample_grid(t_end, sample_dt);

  PopulationRun run;
  if (engine != Engine::kNumeric) {
    const analytic::AnalyticSolution solution =
        analytic::fit_superposition(params, initial.values());
    TimeSeries series;
    series.times.reserve(samples.size());
    series.populations.reserve(samples.size());
    for (double t : samples) series.push(t, analytic::slow_amplitudes(solution, t), false);
    run.analytic = std::move(series);
  }
  if (engine != Engine::kAnalytic) {
    run.numeric = propagate::integrate_on(initial, t_end, params, std::nullopt, samples);
  }
  if (engine == Engine::kBoth) {
    run.max_deviation = max_population_deviation(*run.analytic, *run.numeric);
  }
  return run;
}

}  // namespace floquet_well::experiments
