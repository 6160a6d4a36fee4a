#include <benchmark/benchmark.h>

#include "sqzmode/hologram.hpp"

using namespace sqzmode;

static void BM_Compose(benchmark::State& state) {
  const holo::SlmGeometry geo{};
  const auto mode = holo::mode_phase_pattern(LaguerreGauss{1, 1, 1.7e-4}, geo, holo::TargetPlane::fourier);
  const auto grating = holo::blazed_grating(35, geo);
  const auto lens = holo::lens_phase(0.45, geo);
  const auto mask = holo::circular_aperture(540.0, geo);
  for (auto _ : state) benchmark::DoNotOptimize(holo::compose(mode, grating, lens, mask));
}
BENCHMARK(BM_Compose)->Unit(benchmark::kMillisecond);

static void BM_ModePhasePattern(benchmark::State& state) {
  const holo::SlmGeometry geo{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(holo::mode_phase_pattern(LaguerreGauss{2, 1, 1.7e-4}, geo, holo::TargetPlane::fourier));
  }
}
BENCHMARK(BM_ModePhasePattern)->Unit(benchmark::kMillisecond);
