#include <benchmark/benchmark.h>

#include "nfloc/harness.hpp"

using namespace nfloc;

namespace {

Observation observation(std::size_t n_subcarriers, std::size_t tiles, std::size_t frames) {
  ExperimentConfig cfg;
  cfg.waveform.n_subcarriers = n_subcarriers;
  cfg.layout.k = tiles;
  cfg.waveform.l_frames = frames;
  return observe(cfg, draw_trial(cfg, trial_seed(1, 0)));
}

void BM_Spectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Observation obs = observation(n, 16, 8);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_2d(obs.frames, 4));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(4 * n * 8));
}
BENCHMARK(BM_Spectrum)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNLogN);

void BM_SpectrumDense(benchmark::State& state) {
  const Observation obs = observation(static_cast<std::size_t>(state.range(0)), 16, 8);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_2d(obs.frames, 4, SpectrumMethod::dense));
}
BENCHMARK(BM_SpectrumDense)->Arg(64)->Arg(256);

void BM_Extract(benchmark::State& state) {
  const Observation obs = observation(256, static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(extract_toas(obs.spectrum, obs.assignment));
}
BENCHMARK(BM_Extract)->Arg(16)->Arg(32)->Arg(64);

void BM_Spl(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  ExperimentConfig cfg;
  cfg.layout.k = k;
  cfg.waveform.l_frames = std::max<std::size_t>(k / 2, 6);
  const Observation obs = observe(cfg, draw_trial(cfg, trial_seed(1, 0)));
  const Scene known = receiver_view(cfg, obs.scene);
  const SplOptions opt = spl_options(cfg);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(run_spl(obs.groups, known, opt));
    } catch (const EstimationError&) {
    }
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(k));
}
BENCHMARK(BM_Spl)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_Trial(benchmark::State& state) {
  ExperimentConfig cfg;
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial_pair(cfg, trial_seed(1, i++)));
}
BENCHMARK(BM_Trial);

}  // namespace

BENCHMARK_MAIN();
