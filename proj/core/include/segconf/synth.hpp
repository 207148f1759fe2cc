#pragma once

#include <cstdint>
#include <utility>

#include "segconf/pipeline.hpp"
#include "segconf/raster.hpp"

namespace segconf {

// Counter-based generator: splitmix64 finalizer applied to (seed, stream,
// index). Every draw is addressed, never sequenced, so outputs are
// reproducible bit-exactly on any platform and in any evaluation order.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t word(uint64_t stream, uint64_t index) const {
    uint64_t z = mix(seed_ + kGamma * (stream + 1));
    return mix(z + kGamma * (index + 1));
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform(uint64_t stream, uint64_t index) const {
    return static_cast<double>(word(stream, index) >> 11) * 0x1.0p-53;
  }

  double uniform(uint64_t stream, uint64_t index, double lo, double hi) const {
    return lo + (hi - lo) * uniform(stream, index);
  }

  uint64_t below(uint64_t stream, uint64_t index, uint64_t n) const {
    return word(stream, index) % n;
  }

 private:
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
};

// Deterministic synthetic scene: a Voronoi ground truth, a probability cube
// whose argmax disagrees with the truth on ~error_rate of the pixels (errors
// biased toward interiors of confusion-pair classes), and a feature cube.
// With informative_confidence the erroneous pixels draw flatter, near-class
// distributions (low margin, high entropy, top probability rarely above eta),
// so the fused metric has signal to find; without it errors are sampled from
// the same confidence law as correct pixels.
struct SceneSpec {
  uint64_t seed = 1;
  int height = 256;
  int width = 256;
  int q = 8;
  int n_seeds = 48;  // Voronoi site count
  double error_rate = 0.2;
  std::vector<std::pair<int, int>> confusion_pairs;
  // Inverse softmax temperature applied to the constructed distributions.
  // Integer values are applied with exact arithmetic; the default 1.0 keeps
  // the generator free of libm calls entirely.
  double sharpness = 1.0;
  bool informative_confidence = true;
  int feature_depth = 8;
};

struct Scene {
  LabelRaster gt;
  ProbCube cube;
  FeatureCube features;
};

Scene generate(const SceneSpec& spec);

struct SweepRow {
  SceneSpec spec;
  PipelineConfig config;
  EvalReport report;
};

// One report per (scene, config) pair, in grid order.
std::vector<SweepRow> sweep(const std::vector<SceneSpec>& scenes,
                            const std::vector<PipelineConfig>& configs);

}  // namespace segconf
