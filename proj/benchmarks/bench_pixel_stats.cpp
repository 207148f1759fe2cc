#include <benchmark/benchmark.h>

#include "segconf/pixel_stats.hpp"
#include "segconf/synth.hpp"

using namespace segconf;

namespace {

Scene bench_scene(int side) {
  SceneSpec spec;
  spec.seed = 77;
  spec.height = side;
  spec.width = side;
  spec.q = 11;
  spec.n_seeds = std::max(8, side / 4);
  spec.error_rate = 0.2;
  return generate(spec);
}

}  // namespace

static void BM_Predict(benchmark::State& state) {
  const Scene scene = bench_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(predict(scene.cube));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Predict)->Arg(256)->Arg(512);

static void BM_Margin(benchmark::State& state) {
  const Scene scene = bench_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(margin(scene.cube));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Margin)->Arg(512);

static void BM_NegEntropy(benchmark::State& state) {
  const Scene scene = bench_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(neg_entropy(scene.cube));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_NegEntropy)->Arg(512);

static void BM_GradientStat(benchmark::State& state) {
  const Scene scene = bench_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gradient_stat(scene.cube, &scene.features));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_GradientStat)->Arg(512);
