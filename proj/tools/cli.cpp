#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string_view>

#include "floquet_well/analytic.hpp"
#include "floquet_well/experiments.hpp"
#include "floquet_well/model.hpp"
#include "floquet_well/propagate.hpp"
#include "floquet_well/special.hpp"

namespace floquet_well::cli {

namespace {

/// Bad flag values detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference frequency w0 in 1/s; only used to print times in seconds.
constexpr double kReferenceFrequency = 100.0;

std::string num(double value) { return fmt::format("{:.9g}", value); }

struct SystemFlags {
  double omega = 50.0;
  double gamma = 0.5;
  double interaction = 0.0;
};

void add_system_flags(CLI::App& cmd, SystemFlags& flags) {
  cmd.add_option("--omega", flags.omega, "Driving frequency (units of w0)")
      ->capture_default_str();
  cmd.add_option("--gamma", flags.gamma, "Tunneling coefficient (units of w0)")
      ->capture_default_str();
  cmd.add_option("--interaction", flags.interaction,
                 "Two-body interaction U (units of w0)")
      ->capture_default_str();
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

// Accepts "a", "a+bi", "a-bi", "bi", "i", "-i".
Complex parse_complex(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw UsageError("empty complex literal");
  if (text.back() != 'i') return {parse_real(text), 0.0};

  const std::string_view body = text.substr(0, text.size() - 1);
  // split at the last sign that is not the leading one or part of an exponent
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imaginary = [&](std::string_view part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_real(part.front() == '+' ? part.substr(1) : part);
  };
  if (split == std::string_view::npos) return {0.0, imaginary(body)};
  return {parse_real(body.substr(0, split)), imaginary(body.substr(split))};
}

Amplitudes parse_initial(const std::string& text) {
  if (text == "pair-right") return StateAmplitudes::pair_right().values();
  if (text == "pair-left") return StateAmplitudes::pair_left().values();
  if (text == "noon") return StateAmplitudes::noon().values();

  Amplitudes a{};
  std::string_view rest(text);
  for (std::size_t j = 0; j < 3; ++j) {
    const std::size_t comma = rest.find(',');
    if ((j < 2) == (comma == std::string_view::npos)) {
      throw UsageError("--initial expects pair-right, pair-left, noon or three "
                       "comma-separated complex amplitudes");
    }
    a[j] = parse_complex(rest.substr(0, comma));
    if (j < 2) rest.remove_prefix(comma + 1);
  }
  const double norm2 = squared_norm(a);
  if (std::abs(norm2 - 1.0) > 1e-6) {
    throw UsageError(fmt::format("initial state is not normalized (|a|^2 = {})", num(norm2)));
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (Complex& c : a) c *= scale;
  return a;
}

experiments::Engine parse_engine(const std::string& name) {
  if (name == "analytic") return experiments::Engine::kAnalytic;
  if (name == "numeric") return experiments::Engine::kNumeric;
  if (name == "both") return experiments::Engine::kBoth;
  throw UsageError("unknown engine '" + name + "'");
}

ModelParams make_params(double eps0, const SystemFlags& sys) {
  try {
    return ModelParams::make(eps0, sys.omega, sys.gamma, sys.interaction);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
}

void require_positive(double value, const char* flag) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw UsageError(std::string(flag) + " must be > 0");
  }
}

/// Owns the --out file when one is given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

double display_time(double t, bool seconds) {
  return seconds ? t / kReferenceFrequency : t;
}

// ---------------------------------------------------------------------------

struct SpectrumFlags {
  SystemFlags sys;
  double axis_min = 0.0;
  double axis_max = 6.0;
  double step = 0.05;
  std::size_t numeric_stride = 10;
  std::string out;
};

void cmd_spectrum(const SpectrumFlags& f, std::ostream& fallback) {
  require_positive(f.step, "--step");
  if (f.axis_min < 0.0 || f.axis_max < f.axis_min) {
    throw UsageError("--axis-min/--axis-max must satisfy 0 <= min <= max");
  }
  (void)make_params(f.axis_min * f.sys.omega, f.sys);

  experiments::SweepRequest request;
  request.interaction = f.sys.interaction;
  request.omega = f.sys.omega;
  request.gamma = f.sys.gamma;
  request.axis_min = f.axis_min;
  request.axis_max = f.axis_max;
  request.step = f.step;
  request.numeric_stride = f.numeric_stride;
  const experiments::SpectrumSweep sweep = experiments::sweep_spectrum(request);

  Sink sink(f.out, fallback);
  std::ostream& out = sink.get();
  out << "eps_over_omega,E0_analytic,E1_analytic,E2_analytic,E0_numeric,E1_numeric,"
         "E2_numeric\n";
  for (std::size_t i = 0; i < sweep.axis.size(); ++i) {
    const auto& a = sweep.analytic[i];
    out << num(sweep.axis[i]) << ',' << num(a[0]) << ',' << num(a[1]) << ','
        << num(a[2]);
    if (const auto& n = sweep.numeric[i]) {
      out << ',' << num((*n)[0]) << ',' << num((*n)[1]) << ',' << num((*n)[2]);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

struct EvolveFlags {
  SystemFlags sys;
  double eps0 = 100.0;
  std::string initial = "pair-right";
  double t_end = 150.0;
  double dt = 0.05;
  std::string engine = "numeric";
  bool seconds = false;
  std::string out;
};

void write_populations(std::ostream& out, const Populations& p) {
  out << ',' << num(p[0]) << ',' << num(p[1]) << ',' << num(p[2]);
}

void cmd_evolve(const EvolveFlags& f, std::ostream& fallback) {
  require_positive(f.t_end, "--t-end");
  require_positive(f.dt, "--dt");
  if (f.eps0 < 0.0) throw UsageError("--eps0 must be >= 0");
  const ModelParams params = make_params(f.eps0, f.sys);
  const Amplitudes initial = parse_initial(f.initial);
  const experiments::Engine engine = parse_engine(f.engine);

  const experiments::PopulationRun run =
      experiments::population_series(params, initial, f.t_end, f.dt, engine);

  Sink sink(f.out, fallback);
  std::ostream& out = sink.get();
  if (engine == experiments::Engine::kBoth) {
    out << "t,P0_analytic,P1_analytic,P2_analytic,P0_numeric,P1_numeric,P2_numeric,"
           "deviation\n";
    const TimeSeries& a = *run.analytic;
    const TimeSeries& n = *run.numeric;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double deviation = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        deviation = std::max(deviation, std::abs(a.populations[i][j] - n.populations[i][j]));
      }
      out << num(display_time(a.times[i], f.seconds));
      write_populations(out, a.populations[i]);
      write_populations(out, n.populations[i]);
      out << ',' << num(deviation) << '\n';
    }
    return;
  }
  const TimeSeries& series = run.analytic ? *run.analytic : *run.numeric;
  out << "t,P0,P1,P2\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << num(display_time(series.times[i], f.seconds));
    write_populations(out, series.populations[i]);
    out << '\n';
  }
}

struct SwitchFlags {
  SystemFlags sys;
  std::string schedule;
  std::string initial = "pair-right";
  double t_end = 200.0;
  double dt = 0.05;
  std::string engine = "numeric";
  bool seconds = false;
  std::string out;
};

void cmd_switch(const SwitchFlags& f, std::ostream& fallback, std::ostream& err) {
  require_positive(f.t_end, "--t-end");
  require_positive(f.dt, "--dt");
  const std::optional<DrivingSchedule> schedule = [&] {
    try {
      return std::optional<DrivingSchedule>(DrivingSchedule::parse(f.schedule));
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
  }();
  const ModelParams base = make_params(schedule->segments().front().epsilon0, f.sys);
  const StateAmplitudes initial(parse_initial(f.initial));
  if (f.engine != "numeric" && f.engine != "analytic") {
    throw UsageError("--engine for switch is numeric or analytic");
  }

  const std::vector<double> samples = propagate::sample_grid(f.t_end, f.dt);
  const TimeSeries series =
      f.engine == "numeric"
          ? propagate::integrate_on(initial, f.t_end, base, schedule, samples)
          : experiments::analytic_switch(*schedule, base, initial, samples);
  if (base.high_frequency_strained() || base.gamma() > base.omega() / 10.0) {
    err << "warning: parameters strain the high-frequency assumption (u, gamma << omega)\n";
  }

  Sink sink(f.out, fallback);
  std::ostream& out = sink.get();
  out << "t,eps0_active,P0,P1,P2\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << num(display_time(series.times[i], f.seconds)) << ','
        << num(schedule->drive_value(series.times[i]));
    write_populations(out, series.populations[i]);
    out << '\n';
  }
}

struct BesselFlags {
  int order = 0;
  std::optional<double> x;
  std::optional<int> zero;
};

void cmd_bessel(const BesselFlags& f, std::ostream& out) {
  if (f.x.has_value() == f.zero.has_value()) {
    throw UsageError("bessel needs exactly one of --x or --zero");
  }
  if (f.x) {
    if (!std::isfinite(*f.x)) throw UsageError("--x must be finite");
    out << num(special::bessel_parity(f.order, *f.x)) << '\n';
    return;
  }
  if (f.order < 0 || f.order > 5 || *f.zero < 1 || *f.zero > 10) {
    throw UsageError("--zero supports --order 0..5 and k = 1..10");
  }
  out << num(special::bessel_zero(f.order, *f.zero)) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two driven bosons in a double well: Floquet spectra, dynamics and "
               "tunneling control",
               "floquet-well"};
  app.require_subcommand(1);

  SpectrumFlags spectrum;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Quasienergy spectrum vs eps0/omega (CSV)");
  add_system_flags(*spectrum_cmd, spectrum.sys);
  spectrum_cmd->add_option("--axis-min", spectrum.axis_min, "First eps0/omega")->capture_default_str();
  spectrum_cmd->add_option("--axis-max", spectrum.axis_max, "Last eps0/omega")->capture_default_str();
  spectrum_cmd->add_option("--step", spectrum.step, "Axis step")->capture_default_str();
  spectrum_cmd->add_option("--numeric-stride", spectrum.numeric_stride,
                           "Numeric quasienergies every N points (0: none)")
      ->capture_default_str();
  spectrum_cmd->add_option("--out", spectrum.out, "Write CSV to this file");

  EvolveFlags evolve;
  auto* evolve_cmd = app.add_subcommand("evolve", "Population dynamics at constant driving (CSV)");
  add_system_flags(*evolve_cmd, evolve.sys);
  evolve_cmd->add_option("--eps0", evolve.eps0, "Driving amplitude")->capture_default_str();
  evolve_cmd->add_option("--initial", evolve.initial,
                         "pair-right | pair-left | noon | 'a0,a1,a2' (complex literals)")
      ->capture_default_str();
  evolve_cmd->add_option("--t-end", evolve.t_end, "End time (units of 1/w0)")->capture_default_str();
  evolve_cmd->add_option("--dt", evolve.dt, "Sample spacing")->capture_default_str();
  evolve_cmd->add_option("--engine", evolve.engine, "analytic | numeric | both")
      ->capture_default_str();
  evolve_cmd->add_flag("--seconds", evolve.seconds, "Print t in seconds (w0 = 100 1/s)");
  evolve_cmd->add_option("--out", evolve.out, "Write CSV to this file");

  SwitchFlags sw;
  auto* switch_cmd = app.add_subcommand("switch", "Piecewise driving schedule (CSV)");
  add_system_flags(*switch_cmd, sw.sys);
  switch_cmd->add_option("--schedule", sw.schedule, "t0:eps0,t1:eps1,... with t0 = 0")
      ->required();
  switch_cmd->add_option("--initial", sw.initial, "As for evolve")->capture_default_str();
  switch_cmd->add_option("--t-end", sw.t_end, "End time")->capture_default_str();
  switch_cmd->add_option("--dt", sw.dt, "Sample spacing")->capture_default_str();
  switch_cmd->add_option("--engine", sw.engine, "numeric | analytic")->capture_default_str();
  switch_cmd->add_flag("--seconds", sw.seconds, "Print t in seconds (w0 = 100 1/s)");
  switch_cmd->add_option("--out", sw.out, "Write CSV to this file");

  BesselFlags bessel;
  double bessel_x = 0.0;
  int bessel_zero = 0;
  auto* bessel_cmd = app.add_subcommand("bessel", "Bessel function J_n(x) or its k-th zero");
  bessel_cmd->add_option("--order", bessel.order, "Integer order n")->required();
  auto* x_opt = bessel_cmd->add_option("--x", bessel_x, "Argument x");
  auto* zero_opt = bessel_cmd->add_option("--zero", bessel_zero, "Zero index k >= 1");
  x_opt->excludes(zero_opt);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }
  if (x_opt->count() > 0) bessel.x = bessel_x;
  if (zero_opt->count() > 0) bessel.zero = bessel_zero;

  try {
    if (spectrum_cmd->parsed()) cmd_spectrum(spectrum, out);
    else if (evolve_cmd->parsed()) cmd_evolve(evolve, out);
    else if (switch_cmd->parsed()) cmd_switch(sw, out, err);
    else if (bessel_cmd->parsed()) cmd_bessel(bessel, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputeFailure;
  }
  return kExitOk;
}

}  // namespace floquet_well::cli
