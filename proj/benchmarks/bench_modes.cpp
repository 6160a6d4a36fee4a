#include <benchmark/benchmark.h>

#include "sqzmode/modes.hpp"
#include "sqzmode/special_functions.hpp"

using namespace sqzmode;

static void BM_BesselJ(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(n, x));
    x = x > 50.0 ? 0.0 : x + 0.173;
  }
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(2)->Arg(8);

static void BM_EvaluateMode(benchmark::State& state) {
  const GridSpec grid = GridSpec::square(1024, 8 * 1.32e-3 / 1024);
  const ModeSpec spec = state.range(0) == 0 ? ModeSpec{LaguerreGauss{3, 2, 1.32e-3}} : ModeSpec{bessel_gauss(1, 1.32e-3)};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_mode(spec, grid, 1558e-9));
}
BENCHMARK(BM_EvaluateMode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
