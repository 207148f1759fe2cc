#include <benchmark/benchmark.h>

#include "segconf/pipeline.hpp"
#include "segconf/synth.hpp"

using namespace segconf;

static void BM_FullAssessment(benchmark::State& state) {
  SceneSpec spec;
  spec.seed = 42;
  spec.height = static_cast<int>(state.range(0));
  spec.width = static_cast<int>(state.range(0));
  spec.q = 8;
  spec.n_seeds = std::max(8, static_cast<int>(state.range(0)) / 4);
  spec.error_rate = 0.2;
  spec.confusion_pairs = {{1, 2}};
  const Scene scene = generate(spec);
  const PipelineConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_assessment(scene.cube, nullptr, &scene.gt, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_FullAssessment)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_SceneGeneration(benchmark::State& state) {
  SceneSpec spec;
  spec.seed = 42;
  spec.height = static_cast<int>(state.range(0));
  spec.width = static_cast<int>(state.range(0));
  spec.q = 8;
  spec.n_seeds = std::max(8, static_cast<int>(state.range(0)) / 4);
  spec.error_rate = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_SceneGeneration)->Arg(512)->Unit(benchmark::kMillisecond);
