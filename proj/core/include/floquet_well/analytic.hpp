#pragma once

// Leading-order high-frequency theory.
//
// With U = n*omega + u and the slow amplitudes b_j defined through
//   a0 = b0 exp(+i (eps0/omega) sin(omega t) - i n omega t)
//   a1 = b1
//   a2 = b2 exp(-i (eps0/omega) sin(omega t) - i n omega t)
// the time-averaged dynamics is i db/dt = M b with the real symmetric matrix
//   M = [[u, J, 0], [J, 0, s J], [0, s J, u]],  s = (-1)^n,
// where J = sqrt(2) gamma J_n(eps0/omega) is the renormalized coupling.

#include <array>

#include "floquet_well/model.hpp"

namespace floquet_well::analytic {

struct RenormalizedCoupling {
  double coupling = 0.0;  // J_n
  double k = 0.0;         // sqrt(8 J_n^2 + u^2)
};

RenormalizedCoupling renormalized_coupling(const ModelParams& params);

/// (E0, E1, E2) = (u, (u - k)/2, (u + k)/2).
std::array<double, 3> quasienergies(const ModelParams& params);

struct FloquetBasis {
  std::array<FloquetMode, 3> modes;
  /// J_n = 0 and u = 0: every vector is an eigenvector; the canonical
  /// triple is returned. Marks a three-level crossing.
  bool fully_degenerate = false;
};

/// Closed-form Floquet modes (labels 0, 1, 2), finite at J_n -> 0.
FloquetBasis floquet_modes(const ModelParams& params);

/// Averaged matrix M above, row-major.
std::array<std::array<double, 3>, 3> averaged_matrix(const ModelParams& params);

/// db/dt = -i M b.
Amplitudes averaged_rhs(const ModelParams& params, const Amplitudes& b);

struct AnalyticSolution {
  ModelParams params;
  std::array<FloquetMode, 3> modes;
  /// Superposition weights c_l.
  Amplitudes coefficients{};
  bool fully_degenerate = false;
};

/// Solves b(0) = sum_l c_l (A_l, B_l, C_l) for c. Throws ParameterError for an
/// unnormalized initial triple and InternalError for a singular mode matrix.
AnalyticSolution fit_superposition(const ModelParams& params,
                                   const Amplitudes& initial_slow);

/// b'(t) = sum_l c_l mode_l exp(-i E_l t).
Amplitudes slow_amplitudes(const AnalyticSolution& solution, double t);

/// Lab-frame amplitudes a(t) from the slow ones.
Amplitudes full_amplitudes(const AnalyticSolution& solution, double t);

/// exp(+i (eps0/omega) sin(omega t) - i n omega t), the phase carried by a0.
/// a2 carries the same expression with the sine term negated.
Complex rapid_phase(const ModelParams& params, double t, int sign);

Amplitudes slow_to_full(const ModelParams& params, const Amplitudes& slow,
                        double t);
Amplitudes full_to_slow(const ModelParams& params, const Amplitudes& full,
                        double t);

/// Time for full pair transfer from |0,2>: 2 pi / k_n when u = 0 and
/// pi u / (2 J_n^2) otherwise. Returns +infinity when J_n = 0.
double tunneling_time_estimate(const ModelParams& params);

}  // namespace floquet_well::analytic
