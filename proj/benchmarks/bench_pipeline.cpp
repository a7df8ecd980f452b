#include <benchmark/benchmark.h>

#include "tempsep/contfrac.hpp"
#include "tempsep/moment_engine.hpp"
#include "tempsep/transport.hpp"

namespace {

using namespace tempsep;

const InitialSpectrum& spectrum_for(int which) {
  static const InitialSpectrum mono = InitialSpectrum::monoenergetic();
  static const InitialSpectrum brems = InitialSpectrum::bremsstrahlung();
  return which == 0 ? mono : brems;
}

void BM_DerivativesComptonization(benchmark::State& state) {
  const auto& s = spectrum_for(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(moments::theta_derivatives_comptonization(s, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_DerivativesComptonization)->Args({12, 0})->Args({24, 0})->Args({24, 1})->Unit(benchmark::kMillisecond);

void BM_DerivativesGeneral(benchmark::State& state) {
  const auto params = TransportParams::comptonization();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        moments::theta_derivatives_general(params, spectrum_for(0), static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_DerivativesGeneral)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ContinuedFraction(benchmark::State& state) {
  const auto table = moments::theta_derivatives_comptonization(spectrum_for(0), 24);
  for (auto _ : state) benchmark::DoNotOptimize(contfrac::cf_coefficients(table));
}
BENCHMARK(BM_ContinuedFraction)->Unit(benchmark::kMillisecond);

void BM_SelectApproximant(benchmark::State& state) {
  const auto table = moments::theta_derivatives_comptonization(spectrum_for(0), 24);
  const auto cf = contfrac::cf_coefficients(table);
  contfrac::SelectionOptions options;
  options.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(contfrac::select_approximant(cf, 2.0, 4.0 / 3.0, options));
}
BENCHMARK(BM_SelectApproximant)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SolveTransport(benchmark::State& state) {
  const auto table = moments::theta_derivatives_comptonization(spectrum_for(0), 24);
  const auto theta = transport::TemperatureFn::continued_fraction(contfrac::cf_coefficients(table), 24);
  const auto grid = transport::make_log_grid(1e-3, 50.0, static_cast<int>(state.range(0)), 2.0, 21);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transport::solve_transport(TransportParams::comptonization(), spectrum_for(0),
                                                        theta, grid));
  }
}
BENCHMARK(BM_SolveTransport)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
