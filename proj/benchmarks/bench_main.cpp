#include <benchmark/benchmark.h>

#include "floquet_well/analytic.hpp"
#include "floquet_well/experiments.hpp"
#include "floquet_well/propagate.hpp"
#include "floquet_well/special.hpp"

namespace fw = floquet_well;

static void BM_BesselJ(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fw::special::bessel_j(order, x));
    x = x > 49.0 ? 0.1 : x + 0.37;
  }
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(1)->Arg(5);

static void BM_BesselZero(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fw::special::bessel_zero(1, 10));
}
BENCHMARK(BM_BesselZero);

static void BM_FitSuperposition(benchmark::State& state) {
  const auto params = fw::ModelParams::make(100.0, 50.0, 0.5, 2.0);
  const fw::Amplitudes initial{1.0, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fw::analytic::fit_superposition(params, initial));
  }
}
BENCHMARK(BM_FitSuperposition);

static void BM_Monodromy(benchmark::State& state) {
  const auto params = fw::ModelParams::make(120.0, 50.0, 0.5, 52.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fw::propagate::numeric_quasienergies(params));
  }
}
BENCHMARK(BM_Monodromy)->Unit(benchmark::kMicrosecond);

static void BM_IntegratePairTransfer(benchmark::State& state) {
  const auto params = fw::ModelParams::make(100.0, 50.0, 0.5, 0.0);
  const double t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fw::propagate::integrate(
        fw::StateAmplitudes::pair_right(), t_end, params, std::nullopt, 0.1));
  }
}
BENCHMARK(BM_IntegratePairTransfer)->Arg(15)->Arg(150)->Unit(benchmark::kMillisecond);

static void BM_SpectrumSweep(benchmark::State& state) {
  fw::experiments::SweepRequest request;
  request.interaction = 52.0;
  request.numeric_stride = 1;
  request.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fw::experiments::sweep_spectrum(request));
}
BENCHMARK(BM_SpectrumSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
