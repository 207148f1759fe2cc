#pragma once

#include "segconf/raster.hpp"

namespace segconf {

// Per-pixel argmax prediction; ties resolve to the lowest class index.
LabelRaster predict(const ProbCube& cube);

// Top-1 minus top-2 class probability, in [0,1].
StatRaster margin(const ProbCube& cube);

// Sum of p*ln(p) over classes with 0*ln(0) := 0, in [-ln q, 0].
StatRaster neg_entropy(const ProbCube& cube);

// Norm of the probability-weighted last-layer gradient: ||phi_z|| * (1 - p_top).
// Without features this degrades to an all-zero raster with the omitted flag set.
StatRaster gradient_stat(const ProbCube& cube, const FeatureCube* features);

// Top class probability per pixel (the softmax-only baseline score).
StatRaster max_prob(const ProbCube& cube);

// Softmax conversion for models that export logits instead of probabilities.
// `inv_temperature` scales the logits before the softmax; any positive value
// leaves the per-pixel ranking unchanged.
ProbCube prob_cube_from_logits(int height, int width, ClassSet classes,
                               const std::vector<float>& logits,
                               double inv_temperature = 1.0);

}  // namespace segconf
