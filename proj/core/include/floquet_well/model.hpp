#pragma once

// Domain types for two bosons in a driven double well.
//
// Units: energies, frequencies and rates are in units of the reference
// frequency w0 (= 100 1/s); times are in units of 1/w0. Fock basis ordering
// is {|0,2>, |1,1>, |2,0>}, i.e. index j counts the bosons in the left well.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace floquet_well {

using Complex = std::complex<double>;

/// Complex amplitude triple over the Fock basis.
using Amplitudes = std::array<Complex, 3>;

/// Occupation probabilities (P0, P1, P2).
using Populations = std::array<double, 3>;

/// Invalid physical parameters or malformed inputs.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical integration failed (step-size underflow and similar).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double at_time)
      : std::runtime_error(what), time_(at_time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Internal invariant violated (failed bracketing, singular systems, ...).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kNormTolerance = 1e-9;

double squared_norm(const Amplitudes& a) noexcept;
Populations populations(const Amplitudes& a) noexcept;

/// Result of splitting U = n*omega + u.
struct InteractionSplit {
  int n = 0;
  double u = 0.0;
  /// u > omega/10: the averaging assumption u << omega is strained.
  bool strained = false;
};

/// n = floor(U/omega), u = U - n*omega in [0, omega).
InteractionSplit reduce_interaction(double interaction, double omega);

class ModelParams {
 public:
  /// Validates and derives (n, u). Throws ParameterError.
  static ModelParams make(double epsilon0, double omega, double gamma,
                          double interaction);

  double epsilon0() const noexcept { return epsilon0_; }
  double omega() const noexcept { return omega_; }
  double gamma() const noexcept { return gamma_; }
  double interaction() const noexcept { return interaction_; }
  int photon_index() const noexcept { return n_; }
  double reduced_interaction() const noexcept { return u_; }
  bool high_frequency_strained() const noexcept { return strained_; }

  double drive_ratio() const noexcept { return epsilon0_ / omega_; }
  double period() const noexcept;
  /// (-1)^n
  double parity_sign() const noexcept { return (n_ % 2 == 0) ? 1.0 : -1.0; }

  /// Same system with a different driving amplitude.
  ModelParams with_epsilon0(double epsilon0) const;

 private:
  ModelParams() = default;

  double epsilon0_ = 0.0;
  double omega_ = 1.0;
  double gamma_ = 0.0;
  double interaction_ = 0.0;
  int n_ = 0;
  double u_ = 0.0;
  bool strained_ = false;
};

class StateAmplitudes {
 public:
  /// Throws ParameterError unless |a0|^2+|a1|^2+|a2|^2 = 1 within `tolerance`.
  explicit StateAmplitudes(const Amplitudes& a,
                           double tolerance = kNormTolerance);
  StateAmplitudes(Complex a0, Complex a1, Complex a2);

  /// |0,2>: both bosons in the right well.
  static StateAmplitudes pair_right();
  /// |2,0>: both bosons in the left well.
  static StateAmplitudes pair_left();
  /// (|0,2> - |2,0>)/sqrt(2)
  static StateAmplitudes noon();

  const Amplitudes& values() const noexcept { return a_; }
  const Complex& operator[](std::size_t j) const { return a_.at(j); }
  Populations populations() const noexcept;

 private:
  Amplitudes a_;
};

struct FloquetMode {
  int label = 0;
  double quasienergy = 0.0;
  /// (A, B, C) weights on |0,2>, |1,1>, |2,0>.
  std::array<double, 3> coeff{};
};

struct ScheduleSegment {
  double start_time = 0.0;
  double epsilon0 = 0.0;
};

/// Piecewise-constant driving amplitude. A boundary time belongs to the
/// segment that starts there.
class DrivingSchedule {
 public:
  /// Throws ParameterError unless the first start is 0, starts strictly
  /// increase and every amplitude is finite and >= 0.
  explicit DrivingSchedule(std::vector<ScheduleSegment> segments);

  static DrivingSchedule constant(double epsilon0);

  /// Parses "t0:eps0,t1:eps1,...". Throws ParameterError on malformed input.
  static DrivingSchedule parse(const std::string& text);

  const std::vector<ScheduleSegment>& segments() const noexcept {
    return segments_;
  }

  /// Index of the segment active at time t (t >= 0).
  std::size_t segment_index(double t) const;
  /// Throws std::domain_error for t < 0.
  double drive_value(double t) const;

  /// Segment end (start of the next one) or +infinity for the last.
  double segment_end(std::size_t index) const;

 private:
  std::vector<ScheduleSegment> segments_;
};

double drive_value(const DrivingSchedule& schedule, double t);

struct TimeSeries {
  std::vector<double> times;
  std::vector<Populations> populations;
  /// Filled only when amplitudes were requested.
  std::vector<Amplitudes> amplitudes;

  std::size_t size() const noexcept { return times.size(); }
  bool has_amplitudes() const noexcept { return !amplitudes.empty(); }
  void push(double t, const Amplitudes& a, bool keep_amplitudes);
};

/// Largest |P_j(t) - Q_j(t)| over matching samples. Throws ParameterError when
/// the time grids differ.
double max_population_deviation(const TimeSeries& lhs, const TimeSeries& rhs);

}  // namespace floquet_well
