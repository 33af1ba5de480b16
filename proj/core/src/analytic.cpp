#include "floquet_well/analytic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "floquet_well/special.hpp"

namespace floquet_well::analytic {

namespace {

constexpr double kDegenerateK = 1e-12;

}  // namespace

RenormalizedCoupling renormalized_coupling(const ModelParams& params) {
  const double bessel =
      special::bessel_j(params.photon_index(), params.drive_ratio());
  RenormalizedCoupling rc;
  rc.coupling = std::numbers::sqrt2 * params.gamma() * bessel;
  const double u = params.reduced_interaction();
  rc.k = std::sqrt(8.0 * rc.coupling * rc.coupling + u * u);
  return rc;
}

std::array<double, 3> quasienergies(const ModelParams& params) {
  const double u = params.reduced_interaction();
  const double k = renormalized_coupling(params).k;
  return {u, 0.5 * (u - k), 0.5 * (u + k)};
}

FloquetBasis floquet_modes(const ModelParams& params) {
  const RenormalizedCoupling rc = renormalized_coupling(params);
  const double u = params.reduced_interaction();
  const double s = params.parity_sign();
  const double J = rc.coupling;
  const double k = rc.k;
  const auto energies = quasienergies(params);
  const double h = 1.0 / std::numbers::sqrt2;

  FloquetBasis basis;
  basis.modes[0] = {0, energies[0], {h, 0.0, -s * h}};

  if (k <= kDegenerateK) {
    basis.fully_degenerate = true;
    basis.modes[1] = {1, energies[1], {0.0, 1.0, 0.0}};
    basis.modes[2] = {2, energies[2], {h, 0.0, s * h}};
    return basis;
  }

  // u + k > 0 here, so mode 1 needs no special handling.
  const double n1 = std::sqrt(8.0 * J * J + (u + k) * (u + k));
  basis.modes[1] = {1, energies[1], {2.0 * J / n1, -(u + k) / n1, s * 2.0 * J / n1}};

  // Mode 2 divided through by 2|J| with k - u = 8 J^2 / (k + u); finite as J -> 0.
  const double r = 4.0 * std::abs(J) / (k + u);
  const double n2 = std::sqrt(2.0 + r * r);
  const double sign_j = J < 0.0 ? -1.0 : 1.0;
  basis.modes[2] = {2, energies[2], {sign_j / n2, r / n2, s * sign_j / n2}};
  return basis;
}

std::array<std::array<double, 3>, 3> averaged_matrix(const ModelParams& params) {
  const double u = params.reduced_interaction();
  const double J = renormalized_coupling(params).coupling;
  const double sJ = params.parity_sign() * J;
  return {{{u, J, 0.0}, {J, 0.0, sJ}, {0.0, sJ, u}}};
}

Amplitudes averaged_rhs(const ModelParams& params, const Amplitudes& b) {
  const auto m = averaged_matrix(params);
  const Complex minus_i(0.0, -1.0);
  Amplitudes out{};
  for (std::size_t i = 0; i < 3; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < 3; ++j) acc += m[i][j] * b[j];
    out[i] = minus_i * acc;
  }
  return out;
}

AnalyticSolution fit_superposition(const ModelParams& params,
                                   const Amplitudes& initial_slow) {
  if (std::abs(squared_norm(initial_slow) - 1.0) > kNormTolerance) {
    throw ParameterError("fit_superposition: initial state is not normalized");
  }
  const FloquetBasis basis = floquet_modes(params);

  Eigen::Matrix3cd modes;
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) modes(j, l) = basis.modes[l].coeff[j];
  }
  const Eigen::Vector3cd rhs(initial_slow[0], initial_slow[1], initial_slow[2]);
  const Eigen::FullPivLU<Eigen::Matrix3cd> lu(modes);
  if (!lu.isInvertible()) {
    throw InternalError("fit_superposition: Floquet mode matrix is singular");
  }
  const Eigen::Vector3cd c = lu.solve(rhs);
  if ((modes * c - rhs).cwiseAbs().maxCoeff() > 1e-10) {
    throw InternalError("fit_superposition: reconstruction residual too large");
  }
  return AnalyticSolution{params, basis.modes, {c(0), c(1), c(2)},
                          basis.fully_degenerate};
}

Amplitudes slow_amplitudes(const AnalyticSolution& solution, double t) {
  Amplitudes b{};
  for (const FloquetMode& mode : solution.modes) {
    const Complex weight = solution.coefficients[mode.label] *
                           std::polar(1.0, -mode.quasienergy * t);
    for (std::size_t j = 0; j < 3; ++j) b[j] += weight * mode.coeff[j];
  }
  return b;
}

Complex rapid_phase(const ModelParams& params, double t, int sign) {
  const double omega = params.omega();
  const double phase = sign * params.drive_ratio() * std::sin(omega * t) -
                       params.photon_index() * omega * t;
  return std::polar(1.0, phase);
}

Amplitudes slow_to_full(const ModelParams& params, const Amplitudes& slow,
                        double t) {
  return {slow[0] * rapid_phase(params, t, +1), slow[1],
          slow[2] * rapid_phase(params, t, -1)};
}

Amplitudes full_to_slow(const ModelParams& params, const Amplitudes& full,
                        double t) {
  return {full[0] * std::conj(rapid_phase(params, t, +1)), full[1],
          full[2] * std::conj(rapid_phase(params, t, -1))};
}

Amplitudes full_amplitudes(const AnalyticSolution& solution, double t) {
  return slow_to_full(solution.params, slow_amplitudes(solution, t), t);
}

double tunneling_time_estimate(const ModelParams& params) {
  const RenormalizedCoupling rc = renormalized_coupling(params);
  const double u = params.reduced_interaction();
  if (u == 0.0) {
    return rc.k > 0.0 ? 2.0 * std::numbers::pi / rc.k
                      : std::numeric_limits<double>::infinity();
  }
  if (rc.coupling == 0.0) return std::numeric_limits<double>::infinity();
  return std::numbers::pi * u / (2.0 * rc.coupling * rc.coupling);
}

}  // namespace floquet_well::analytic
