#include "repx/alignment.hpp"
#include "repx/attribution.hpp"
#include "repx/pipeline.hpp"
#include "repx/scorer.hpp"
#include "repx/synth_data.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

repx::Samples noise(Eigen::Index rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  repx::Samples x(rows, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  return x;
}

void BM_Dtw(benchmark::State& state) {
  const auto s = noise(state.range(0), 1);
  const auto t = noise(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(repx::dtw_dist_path_multi(s, t).total_cost);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared);

void BM_MicroSegmentation(benchmark::State& state) {
  const auto s = noise(state.range(0), 3);
  const auto t = noise(state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(repx::micro_segmentation(s, t).anchors.data());
}
BENCHMARK(BM_MicroSegmentation)->Arg(250);

void BM_IntegratedGradients(benchmark::State& state) {
  const repx::SurrogateScorer f;
  const repx::MotionSeries x(noise(250, 5));
  const repx::MotionSeries a(noise(250, 6));
  const auto base = repx::sample_baseline(a, 250, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(repx::integrated_gradients(f, x, a, base, static_cast<int>(state.range(0))).values.data());
  }
}
BENCHMARK(BM_IntegratedGradients)->Arg(50)->Arg(200);

void BM_AnalyzePair(benchmark::State& state) {
  const repx::PipelineConfig cfg;
  const auto scorer = repx::make_scorer(cfg);
  const auto templates = repx::make_templates(cfg);
  repx::ExerciseSpec s, a;
  s.rom_deg = 60;
  s.jitter_std = 0.05;
  a.jitter_std = 0.05;
  a.seed = 1;
  const auto signal = repx::generate(s);
  const auto anchor = repx::generate(a);
  for (auto _ : state) {
    benchmark::DoNotOptimize(repx::analyze_pair(signal, anchor, *scorer, templates, cfg).report.similarity);
  }
}
BENCHMARK(BM_AnalyzePair)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
