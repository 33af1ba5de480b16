#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "floquet_well/analytic.hpp"
#include "floquet_well/propagate.hpp"
#include "floquet_well/special.hpp"

using namespace floquet_well;
namespace pr = floquet_well::propagate;
namespace an = floquet_well::analytic;

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

double max_abs_diff(const Amplitudes& a, const Amplitudes& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

pr::IntegrateOptions with_amplitudes() {
  pr::IntegrateOptions o;
  o.keep_amplitudes = true;
  return o;
}

}  // namespace

TEST_CASE("exact_rhs examples") {
  const auto p = ModelParams::make(100.0, 50.0, 0.5, 0.0);
  const double g = std::numbers::sqrt2 * 0.5;

  const auto d0 = pr::exact_rhs(0.0, {1.0, 0.0, 0.0}, p);
  CHECK(std::abs(d0[0] - Complex(0.0, 100.0)) <= 1e-12);
  CHECK(std::abs(d0[1] - Complex(0.0, -g)) <= 1e-12);
  CHECK(std::abs(d0[2]) == 0.0);

  const double quarter = std::numbers::pi / 100.0;  // cos(omega t) = 0
  const auto d1 = pr::exact_rhs(quarter, {0.0, 1.0, 0.0}, p);
  CHECK(std::abs(d1[0] - Complex(0.0, -g)) <= 1e-12);
  CHECK(std::abs(d1[1]) == 0.0);
  CHECK(std::abs(d1[2] - Complex(0.0, -g)) <= 1e-12);

  // a schedule overrides the fixed amplitude
  const auto schedule = DrivingSchedule::parse("0:0,1:100");
  const auto before = pr::exact_rhs(0.5, {1.0, 0.0, 0.0}, p, &schedule);
  CHECK(std::abs(before[0]) <= 1e-12);
  // the carrier keeps the global phase cos(omega t)
  const auto after = pr::exact_rhs(1.5, {1.0, 0.0, 0.0}, p, &schedule);
  CHECK(std::abs(after[0] - Complex(0.0, 100.0 * std::cos(75.0))) <= 1e-12);
}

TEST_CASE("sample_grid") {
  const auto g = pr::sample_grid(1.0, 0.25);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  const auto h = pr::sample_grid(1.0, 0.3);
  REQUIRE(h.size() == 5);
  CHECK(h.back() == 1.0);
  CHECK_THROWS_AS(pr::sample_grid(0.0, 0.1), ParameterError);
  CHECK_THROWS_AS(pr::sample_grid(1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(pr::sample_grid(1.0, -1.0), ParameterError);
}

TEST_CASE("gamma = 0 reproduces the closed-form phases") {
  const double eps0 = 100.0, omega = 50.0, U = 3.0;
  const auto p = ModelParams::make(eps0, omega, 0.0, U);
  const StateAmplitudes init(Complex(0.6, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.8));
  const auto series = pr::integrate(init, 20.0, p, std::nullopt, 0.37, with_amplitudes());
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    const double drive = (eps0 / omega) * std::sin(omega * t);
    const Amplitudes expected{0.6 * std::polar(1.0, -(U * t - drive)), 0.0,
                              Complex(0.0, 0.8) * std::polar(1.0, -(U * t + drive))};
    CHECK(std::abs(std::abs(series.amplitudes[i][0]) - 0.6) <= 1e-8);
    CHECK(max_abs_diff(series.amplitudes[i], expected) <= 1e-7);
  }
}

TEST_CASE("norm drift stays below 1e-8") {
  for (double U : {0.0, 2.0, 50.0, 52.0}) {
    const auto p = ModelParams::make(100.0, 50.0, 0.5, U);
    const auto series = pr::integrate(StateAmplitudes::pair_right(), 500.0, p, std::nullopt,
                                      1.0, with_amplitudes());
    double drift = 0.0;
    for (const auto& a : series.amplitudes) drift = std::max(drift, std::abs(squared_norm(a) - 1.0));
    CHECK(drift <= 1e-8);
  }
}

TEST_CASE("results do not depend on the sampling grid") {
  const auto p = ModelParams::make(100.0, 50.0, 0.5, 2.0);
  const auto coarse = pr::integrate(StateAmplitudes::pair_right(), 100.0, p, std::nullopt, 0.5,
                                    with_amplitudes());
  const auto fine = pr::integrate(StateAmplitudes::pair_right(), 100.0, p, std::nullopt, 0.01,
                                  with_amplitudes());
  REQUIRE(coarse.times.size() == 201);
  for (std::size_t i = 0; i < coarse.times.size(); ++i) {
    CHECK(fine.times[50 * i] == doctest::Approx(coarse.times[i]).epsilon(1e-14));
    CHECK(max_abs_diff(fine.amplitudes[50 * i], coarse.amplitudes[i]) <= 1e-8);
  }
}

TEST_CASE("integrate validates its arguments") {
  const auto p = ModelParams::make(100.0, 50.0, 0.5, 0.0);
  CHECK_THROWS_AS(pr::integrate(StateAmplitudes::pair_right(), -1.0, p, std::nullopt, 0.1),
                  ParameterError);
  CHECK_THROWS_AS(pr::integrate_on(StateAmplitudes::pair_right(), 1.0, p, std::nullopt,
                                   {0.5, 0.2}),
                  ParameterError);
  CHECK_THROWS_AS(pr::integrate_on(StateAmplitudes::pair_right(), 1.0, p, std::nullopt,
                                   {0.5, 2.0}),
                  ParameterError);
}

TEST_CASE("monodromy examples") {
  SUBCASE("undriven, gamma = 0: diagonal phases") {
    const auto p = ModelParams::make(0.0, 50.0, 0.0, 3.0);
    const auto m = pr::monodromy(p);
    const double T = p.period();
    CHECK(std::abs(m.matrix(0, 0) - std::polar(1.0, -3.0 * T)) <= 1e-9);
    CHECK(std::abs(m.matrix(1, 1) - 1.0) <= 1e-9);
    CHECK(std::abs(m.matrix(2, 2) - std::polar(1.0, -3.0 * T)) <= 1e-9);
    CHECK(std::abs(m.matrix(0, 1)) <= 1e-12);
  }
  SUBCASE("unitary with unit-modulus determinant") {
    for (double U : {0.0, 2.0, 50.0, 52.0, 101.0}) {
      for (double x : {0.5, 2.0, 2.4048, 3.8317}) {
        const auto m = pr::monodromy(ModelParams::make(50.0 * x, 50.0, 0.5, U));
        CHECK(m.unitarity_defect() <= 1e-8);
        CHECK(std::abs(std::abs(m.matrix.determinant()) - 1.0) <= 1e-8);
      }
    }
  }
}

TEST_CASE("fold_quasienergy") {
  CHECK(pr::fold_quasienergy(0.0, 50.0) == 0.0);
  CHECK(pr::fold_quasienergy(26.0, 50.0) == doctest::Approx(-24.0));
  CHECK(pr::fold_quasienergy(-25.0, 50.0) == doctest::Approx(-25.0));
  CHECK(pr::fold_quasienergy(25.0, 50.0) == doctest::Approx(-25.0));
  CHECK(pr::fold_quasienergy(52.0, 50.0) == doctest::Approx(2.0));
  CHECK(pr::quasienergy_distance(24.9, -24.9, 50.0) == doctest::Approx(0.2));
}

TEST_CASE("numeric quasienergy examples") {
  SUBCASE("undriven reference") {
    const auto q = pr::numeric_quasienergies(ModelParams::make(0.0, 50.0, 0.5, 0.0));
    CHECK(q.energies[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(std::abs(q.energies[0]) <= 1e-8);
    CHECK(q.energies[1] == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(q.energies[2] == doctest::Approx(1.0).epsilon(1e-8));
    for (double o : q.overlaps) CHECK(o >= 0.999999);
  }
  SUBCASE("driven, non-interacting: close to the averaged levels") {
    const auto p = ModelParams::make(100.0, 50.0, 0.5, 0.0);
    const auto q = pr::numeric_quasienergies(p);
    const auto e = an::quasienergies(p);
    for (std::size_t l = 0; l < 3; ++l) CHECK(std::abs(q.energies[l] - e[l]) <= 0.01);
  }
  SUBCASE("three-level crossing") {
    const auto p = ModelParams::make(50.0 * special::bessel_zero(0, 1), 50.0, 0.5, 0.0);
    const auto q = pr::numeric_quasienergies(p);
    CHECK(q.sorted_within_degenerate_group);
    for (double e : q.energies) CHECK(std::abs(e) <= 1e-3);
  }
  SUBCASE("analytic agreement over the sweep") {
    for (double U : {0.0, 2.0, 50.0, 52.0}) {
      for (int i = 0; i <= 120; ++i) {
        const auto p = ModelParams::make(50.0 * 0.05 * i, 50.0, 0.5, U);
        const auto q = pr::numeric_quasienergies(p);
        const auto e = an::quasienergies(p);
        for (std::size_t l = 0; l < 3; ++l) {
          CHECK(pr::quasienergy_distance(q.energies[l], e[l], 50.0) <= 0.05);
        }
      }
    }
  }
}

TEST_CASE("schedule boundaries keep the state continuous") {
  const auto p = ModelParams::make(100.0, 50.0, 0.5, 0.0);
  const auto schedule = DrivingSchedule::parse("0:100,10:120.24,20:100");
  // left limit: stop exactly at the boundary inside the first segment
  const auto left = pr::integrate(StateAmplitudes::pair_right(), 10.0, p,
                                  DrivingSchedule::parse("0:100"), 0.5, with_amplitudes());
  // right limit: the boundary sample of the full run belongs to the later segment
  const auto full = pr::integrate(StateAmplitudes::pair_right(), 30.0, p, schedule, 0.5,
                                  with_amplitudes());
  REQUIRE(left.times.back() == 10.0);
  REQUIRE(full.times[20] == 10.0);
  CHECK(max_abs_diff(left.amplitudes.back(), full.amplitudes[20]) <= 1e-9);
  CHECK(schedule.drive_value(10.0) == 120.24);

  // a single-segment schedule is the constant drive
  const auto constant = pr::integrate(StateAmplitudes::pair_right(), 30.0, p,
                                      DrivingSchedule::parse("0:100"), 0.5, with_amplitudes());
  const auto plain = pr::integrate(StateAmplitudes::pair_right(), 30.0, p, std::nullopt, 0.5,
                                   with_amplitudes());
  for (std::size_t i = 0; i < plain.times.size(); ++i) {
    CHECK(max_abs_diff(constant.amplitudes[i], plain.amplitudes[i]) == 0.0);
  }
}

TEST_CASE("analytic and numeric populations agree in the high-frequency regime") {
  for (double U : {0.0, 2.0, 50.0}) {
    const auto p = ModelParams::make(100.0, 50.0, 0.5, U);
    const auto series = pr::integrate(StateAmplitudes::pair_right(), 150.0, p, std::nullopt, 0.05);
    const auto sol = an::fit_superposition(p, {1.0, 0.0, 0.0});
    double worst = 0.0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
      const auto pa = populations(an::slow_amplitudes(sol, series.times[i]));
      for (std::size_t j = 0; j < 3; ++j) {
        worst = std::max(worst, std::abs(pa[j] - series.populations[i][j]));
      }
    }
    CHECK(worst <= 0.05);
  }
}

TEST_CASE("NOON start is stationary up to small ripples at u = 0") {
  const auto p = ModelParams::make(100.0, 50.0, 0.5, 0.0);
  const auto series = pr::integrate(StateAmplitudes::noon(), 100.0, p, std::nullopt, 0.1);
  for (const auto& pop : series.populations) {
    CHECK(std::abs(pop[0] - 0.5) <= 0.01);
    CHECK(pop[1] <= 0.01);
  }
  CHECK(kInvSqrt2 == doctest::Approx(StateAmplitudes::noon()[0].real()));
}

TEST_CASE("rotating-frame stepping agrees with lab-frame integration") {
  const auto p = ModelParams::make(100.0, 50.0, 0.5, 52.0);
  const pr::RotatingFrame frame(p, p.epsilon0(), 0.3);
  const Amplitudes a{Complex(0.6, 0.1), Complex(0.0, 0.7), Complex(-0.3, 0.2)};
  CHECK(max_abs_diff(frame.to_lab(1.7, frame.from_lab(1.7, a)), a) <= 1e-15);
  CHECK(max_abs_diff(frame.from_lab(0.3, a), a) <= 1e-15);

  const Amplitudes start{1.0, 0.0, 0.0};
  const ode::Tolerance tight{1e-13, 1e-15};
  double hint_lab = 0.0, hint_rot = 0.0;
  auto lab_rhs = [&](double t, const Amplitudes& y) { return pr::exact_rhs(t, y, p); };
  auto ignore = [](double, const Amplitudes&) {};
  const Amplitudes lab = ode::integrate(lab_rhs, 0.0, 5.0, start, {}, ignore, tight, hint_lab);
  const Amplitudes rot = pr::evolve(p, p.epsilon0(), 0.0, 5.0, start, {}, ignore, tight, hint_rot);
  CHECK(max_abs_diff(lab, rot) <= 1e-9);
}
