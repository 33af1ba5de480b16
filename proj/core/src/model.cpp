#include "floquet_well/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>

namespace floquet_well {

double squared_norm(const Amplitudes& a) noexcept {
  return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]);
}

Populations populations(const Amplitudes& a) noexcept {
  return {std::norm(a[0]), std::norm(a[1]), std::norm(a[2])};
}

InteractionSplit reduce_interaction(double interaction, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ParameterError("driving frequency must be finite and > 0");
  }
  if (!(interaction >= 0.0) || !std::isfinite(interaction)) {
    throw ParameterError("interaction strength must be finite and >= 0");
  }
  InteractionSplit split;
  split.n = static_cast<int>(std::floor(interaction / omega));
  split.u = interaction - split.n * omega;
  // floor of a rounded quotient can be off by one at exact multiples
  if (split.u >= omega) {
    ++split.n;
    split.u -= omega;
  } else if (split.u < 0.0) {
    --split.n;
    split.u += omega;
  }
  split.u = std::max(split.u, 0.0);
  split.strained = split.u > omega / 10.0;
  return split;
}

ModelParams ModelParams::make(double epsilon0, double omega, double gamma,
                              double interaction) {
  if (!(epsilon0 >= 0.0) || !std::isfinite(epsilon0)) {
    throw ParameterError("driving amplitude must be finite and >= 0");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("tunneling coefficient must be finite and >= 0");
  }
  const InteractionSplit split = reduce_interaction(interaction, omega);

  ModelParams p;
  p.epsilon0_ = epsilon0;
  p.omega_ = omega;
  p.gamma_ = gamma;
  p.interaction_ = interaction;
  p.n_ = split.n;
  p.u_ = split.u;
  p.strained_ = split.strained;
  return p;
}

double ModelParams::period() const noexcept {
  return 2.0 * std::numbers::pi / omega_;
}

ModelParams ModelParams::with_epsilon0(double epsilon0) const {
  return make(epsilon0, omega_, gamma_, interaction_);
}

StateAmplitudes::StateAmplitudes(const Amplitudes& a, double tolerance)
    : a_(a) {
  for (const Complex& c : a_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw ParameterError("state amplitudes must be finite");
    }
  }
  if (std::abs(squared_norm(a_) - 1.0) > tolerance) {
    throw ParameterError("state amplitudes are not normalized");
  }
}

StateAmplitudes::StateAmplitudes(Complex a0, Complex a1, Complex a2)
    : StateAmplitudes(Amplitudes{a0, a1, a2}) {}

StateAmplitudes StateAmplitudes::pair_right() { return {1.0, 0.0, 0.0}; }

StateAmplitudes StateAmplitudes::pair_left() { return {0.0, 0.0, 1.0}; }

StateAmplitudes StateAmplitudes::noon() {
  const double h = 1.0 / std::numbers::sqrt2;
  return {h, 0.0, -h};
}

Populations StateAmplitudes::populations() const noexcept {
  return floquet_well::populations(a_);
}

DrivingSchedule::DrivingSchedule(std::vector<ScheduleSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw ParameterError("schedule needs at least one segment");
  }
  if (segments_.front().start_time != 0.0) {
    throw ParameterError("first schedule segment must start at t = 0");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.start_time) || !std::isfinite(s.epsilon0) ||
        s.epsilon0 < 0.0) {
      throw ParameterError("schedule segment " + std::to_string(i) +
                           " has an invalid time or amplitude");
    }
    if (i > 0 && !(s.start_time > segments_[i - 1].start_time)) {
      throw ParameterError("schedule start times must strictly increase");
    }
  }
}

DrivingSchedule DrivingSchedule::constant(double epsilon0) {
  return DrivingSchedule({{0.0, epsilon0}});
}

namespace {

double parse_number(std::string_view text, const std::string& context) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw ParameterError("malformed number '" + std::string(text) + "' in " +
                         context);
  }
  return value;
}

}  // namespace

DrivingSchedule DrivingSchedule::parse(const std::string& text) {
  std::vector<ScheduleSegment> segments;
  std::string_view rest(text);
  if (rest.empty()) throw ParameterError("empty schedule");
  while (true) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ParameterError("schedule entry '" + std::string(item) +
                           "' is not of the form time:amplitude");
    }
    segments.push_back({parse_number(item.substr(0, colon), "schedule time"),
                        parse_number(item.substr(colon + 1),
                                     "schedule amplitude")});
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return DrivingSchedule(std::move(segments));
}

std::size_t DrivingSchedule::segment_index(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("schedule queried at t < 0");
  const auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double time, const ScheduleSegment& s) { return time < s.start_time; });
  return static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
}

double DrivingSchedule::drive_value(double t) const {
  return segments_[segment_index(t)].epsilon0;
}

double DrivingSchedule::segment_end(std::size_t index) const {
  if (index + 1 < segments_.size()) return segments_[index + 1].start_time;
  return std::numeric_limits<double>::infinity();
}

double drive_value(const DrivingSchedule& schedule, double t) {
  return schedule.drive_value(t);
}

void TimeSeries::push(double t, const Amplitudes& a, bool keep_amplitudes) {
  times.push_back(t);
  populations.push_back(floquet_well::populations(a));
  if (keep_amplitudes) amplitudes.push_back(a);
}

double max_population_deviation(const TimeSeries& lhs, const TimeSeries& rhs) {
  if (lhs.size() != rhs.size()) {
    throw ParameterError("time series have different lengths");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (std::abs(lhs.times[i] - rhs.times[i]) > 1e-9) {
      throw ParameterError("time series are sampled on different grids");
    }
    for (std::size_t j = 0; j < 3; ++j) {
      worst = std::max(worst, std::abs(lhs.populations[i][j] -
                                       rhs.populations[i][j]));
    }
  }
  return worst;
}

}  // namespace floquet_well
