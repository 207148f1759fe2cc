#include <benchmark/benchmark.h>

#include "segconf/components.hpp"
#include "segconf/pixel_stats.hpp"
#include "segconf/synth.hpp"

using namespace segconf;

namespace {

LabelRaster bench_labels(int side) {
  SceneSpec spec;
  spec.seed = 1234;
  spec.height = side;
  spec.width = side;
  spec.q = 8;
  spec.n_seeds = std::max(8, side / 4);
  spec.error_rate = 0.2;
  spec.confusion_pairs = {{1, 2}};
  return predict(generate(spec).cube);
}

}  // namespace

static void BM_ConnectedComponents(benchmark::State& state) {
  const LabelRaster labels = bench_labels(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(connected_components(labels));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_ConnectedComponents)->Arg(128)->Arg(512)->Arg(1024);

static void BM_ConnectedComponents8(benchmark::State& state) {
  const LabelRaster labels = bench_labels(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(connected_components(labels, Connectivity::eight));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_ConnectedComponents8)->Arg(512);

static void BM_InnerBoundarySplit(benchmark::State& state) {
  const LabelRaster labels = bench_labels(static_cast<int>(state.range(0)));
  const SegmentMap segmap = connected_components(labels);
  for (auto _ : state) {
    SegmentMap copy = segmap;
    benchmark::DoNotOptimize(inner_boundary_split(std::move(copy)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_InnerBoundarySplit)->Arg(512);
