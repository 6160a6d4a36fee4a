#include <benchmark/benchmark.h>

#include "sqzmode/modes.hpp"
#include "sqzmode/propagation.hpp"

using namespace sqzmode;

static void BM_AngularSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ComplexField field = evaluate_mode(Gauss{1.32e-3}, GridSpec::square(n, 8 * 1.32e-3 / static_cast<double>(n)), 1558e-9);
  optics::PropagationPlan plan;
  for (auto _ : state) benchmark::DoNotOptimize(optics::angular_spectrum(field, plan));
}
BENCHMARK(BM_AngularSpectrum)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
