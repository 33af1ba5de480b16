#include "floquet_well/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>

#include "floquet_well/analytic.hpp"

namespace floquet_well::propagate {

Amplitudes exact_rhs_at(double t, const Amplitudes& a, const ModelParams& params,
                        double epsilon0) {
  const double eps = epsilon0 * std::cos(params.omega() * t);
  const double coupling = std::numbers::sqrt2 * params.gamma();
  const double U = params.interaction();
  const Complex minus_i(0.0, -1.0);
  return {minus_i * ((U - eps) * a[0] + coupling * a[1]),
          minus_i * (coupling * (a[0] + a[2])),
          minus_i * ((U + eps) * a[2] + coupling * a[1])};
}

Amplitudes exact_rhs(double t, const Amplitudes& a, const ModelParams& params,
                     const DrivingSchedule* schedule) {
  const double amplitude =
      schedule != nullptr ? schedule->drive_value(t) : params.epsilon0();
  return exact_rhs_at(t, a, params, amplitude);
}

std::vector<double> sample_grid(double t_end, double sample_dt) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw ParameterError("t_end must be finite and > 0");
  }
  if (!(sample_dt > 0.0) || !std::isfinite(sample_dt)) {
    throw ParameterError("sample_dt must be finite and > 0");
  }
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor(t_end / sample_dt + 1e-9));
  grid.reserve(count + 2);
  for (std::size_t k = 0; k <= count; ++k) {
    grid.push_back(std::min(static_cast<double>(k) * sample_dt, t_end));
  }
  if (t_end - grid.back() > 1e-9 * sample_dt) grid.push_back(t_end);
  return grid;
}

TimeSeries integrate_on(const StateAmplitudes& initial, double t_end,
                        const ModelParams& params,
                        const std::optional<DrivingSchedule>& schedule,
                        const std::vector<double>& samples,
                        const IntegrateOptions& options) {
  if (!(t_end > 0.0)) throw ParameterError("t_end must be > 0");
  if (!std::is_sorted(samples.begin(), samples.end()) ||
      (!samples.empty() && (samples.front() < 0.0 || samples.back() > t_end))) {
    throw ParameterError("samples must be ascending and within [0, t_end]");
  }

  const DrivingSchedule active =
      schedule.value_or(DrivingSchedule::constant(params.epsilon0()));

  TimeSeries series;
  series.times.reserve(samples.size());
  series.populations.reserve(samples.size());
  auto observe = [&](double t, const Amplitudes& a) {
    series.push(t, a, options.keep_amplitudes);
  };

  Amplitudes state = initial.values();
  double step_hint = 0.0;
  std::span<const double> pending(samples);
  const auto& segments = active.segments();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double start = segments[i].start_time;
    if (start >= t_end) break;
    const double end = std::min(active.segment_end(i), t_end);
    const bool last = end >= t_end;

    // a boundary sample belongs to the later segment; the state is continuous
    const auto stop = last ? std::upper_bound(pending.begin(), pending.end(), end)
                           : std::lower_bound(pending.begin(), pending.end(), end);
    const auto take = static_cast<std::size_t>(std::distance(pending.begin(), stop));
    state = evolve(params, segments[i].epsilon0, start, end, state, pending.first(take),
                   observe, options.tolerance, step_hint);
    pending = pending.subspan(take);
  }
  return series;
}

TimeSeries integrate(const StateAmplitudes& initial, double t_end,
                     const ModelParams& params,
                     const std::optional<DrivingSchedule>& schedule,
                     double sample_dt, const IntegrateOptions& options) {
  return integrate_on(initial, t_end, params, schedule,
                      sample_grid(t_end, sample_dt), options);
}

double Monodromy::unitarity_defect() const {
  return (matrix.adjoint() * matrix - Eigen::Matrix3cd::Identity())
      .cwiseAbs()
      .maxCoeff();
}

Monodromy monodromy(const ModelParams& params, const ode::Tolerance& tolerance) {
  const double period = params.period();
  Eigen::Matrix3cd matrix;
  double step_hint = 0.0;
  auto ignore = [](double, const Amplitudes&) {};
  for (int column = 0; column < 3; ++column) {
    Amplitudes basis{};
    basis[static_cast<std::size_t>(column)] = 1.0;
    const Amplitudes out =
        evolve(params, params.epsilon0(), 0.0, period, basis, {}, ignore, tolerance, step_hint);
    for (int row = 0; row < 3; ++row) matrix(row, column) = out[static_cast<std::size_t>(row)];
  }
  return Monodromy{matrix, params};
}

double fold_quasienergy(double energy, double omega) {
  const double folded = energy - omega * std::floor(energy / omega + 0.5);
  // floor rounding can leave exactly +omega/2
  return folded >= 0.5 * omega ? folded - omega : folded;
}

double quasienergy_distance(double lhs, double rhs, double omega) {
  return std::abs(fold_quasienergy(lhs - rhs, omega));
}

NumericQuasienergies numeric_quasienergies(const Monodromy& m,
                                           double degeneracy_tol) {
  const Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(m.matrix);
  if (solver.info() != Eigen::Success) {
    throw InternalError("monodromy eigendecomposition failed");
  }
  const double period = m.params.period();
  const double omega = m.params.omega();
  std::array<double, 3> values{};
  Eigen::Matrix3cd vectors = solver.eigenvectors();
  for (int i = 0; i < 3; ++i) {
    values[static_cast<std::size_t>(i)] =
        fold_quasienergy(-std::arg(solver.eigenvalues()(i)) / period, omega);
    vectors.col(i).normalize();
  }

  const analytic::FloquetBasis basis = analytic::floquet_modes(m.params);
  Eigen::Matrix3d overlap;  // (eigenvector i, label l)
  for (int i = 0; i < 3; ++i) {
    for (int l = 0; l < 3; ++l) {
      Complex dot = 0.0;
      for (int j = 0; j < 3; ++j) {
        dot += std::conj(vectors(j, i)) * basis.modes[static_cast<std::size_t>(l)].coeff[static_cast<std::size_t>(j)];
      }
      overlap(i, l) = std::norm(dot);
    }
  }

  // label -> eigenvector, best of the 3! assignments
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int l = 0; l < 3; ++l) score += overlap(perm[static_cast<std::size_t>(l)], l);
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  NumericQuasienergies result;
  for (std::size_t l = 0; l < 3; ++l) {
    result.energies[l] = values[static_cast<std::size_t>(best[l])];
    result.overlaps[l] = overlap(best[l], static_cast<int>(l));
  }

  // Inside a group of degenerate analytic levels the eigenvectors are
  // arbitrary; hand out the numeric values in sorted order instead.
  std::array<double, 3> analytic_e{};
  for (std::size_t l = 0; l < 3; ++l) analytic_e[l] = basis.modes[l].quasienergy;
  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return analytic_e[a] < analytic_e[b]; });
  std::size_t begin = 0;
  while (begin < 3) {
    std::size_t end = begin + 1;
    while (end < 3 && analytic_e[order[end]] - analytic_e[order[end - 1]] <= degeneracy_tol) {
      ++end;
    }
    if (end - begin > 1) {
      std::vector<double> group;
      for (std::size_t g = begin; g < end; ++g) group.push_back(result.energies[order[g]]);
      // sort relative to the group's analytic centre so folding does not scramble it
      const double centre = analytic_e[order[begin]];
      std::sort(group.begin(), group.end(), [&](double a, double b) {
        return fold_quasienergy(a - centre, omega) < fold_quasienergy(b - centre, omega);
      });
      for (std::size_t g = begin; g < end; ++g) result.energies[order[g]] = group[g - begin];
      result.sorted_within_degenerate_group = true;
    }
    begin = end;
  }
  return result;
}

NumericQuasienergies numeric_quasienergies(const ModelParams& params) {
  return numeric_quasienergies(monodromy(params));
}

}  // namespace floquet_well::propagate
