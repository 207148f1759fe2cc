#pragma once

#include <optional>

#include "segconf/evaluation.hpp"

namespace segconf {

// One assessment/evaluation configuration. Defaults reproduce the headline
// setup: eta = 0.9, tau = 0.2, 4-connectivity, mean over the segment interior,
// segment-mode refinement, 100 histogram bins.
struct PipelineConfig {
  double eta = 0.9;
  double tau = 0.2;
  Connectivity connectivity = Connectivity::four;
  Aggregation agg = Aggregation::mean;
  Region region = Region::inner;
  RefineMode refine_mode = RefineMode::segment;
  int bins = 100;
  // Softmax-only baseline: pixel confidence is the top probability, no
  // normalization/fusion and no refinement.
  bool baseline_softmax = false;
  bool use_gradient = true;
  bool adjusted_seg_iou = true;
  bool rank_correlation = false;
  BorderPolicy border_policy = BorderPolicy::outside;
};

struct AssessmentResult {
  LabelRaster prediction;      // argmax labels, nodata-masked when gt is given
  SegmentMap segmap;           // inner/boundary split applied
  StatRaster margin_stat;
  StatRaster entropy_stat;
  StatRaster gradient_stat;    // omitted-flagged when no features were supplied
  SegmentStatTable table;      // coverage plus per-segment aggregates
  NormalizationSpec norm;      // empty in baseline mode
  ConfidenceResult confidence;
  LabelRaster refined;         // equals prediction when refinement is off
};

// Full assessment chain: predict, segment, pixel statistics, coverage,
// normalization fit (on the scene itself unless `preset_norm` is given),
// fusion, segment confidence, abstention refinement.
AssessmentResult run_assessment(const ProbCube& cube, const FeatureCube* features,
                                const LabelRaster* gt, const PipelineConfig& cfg,
                                const NormalizationSpec* preset_norm = nullptr);

struct EvalOutput {
  EvalReport report;
  Histogram histogram;
  std::map<uint32_t, double> seg_ious;
};

// Both evaluation tiers against the ground truth. Segment-level metrics use
// the refined labels and, under segment-mode refinement, restrict the
// confidence-IoU correlation to retained segments; pixel-level metrics always
// score the unrefined prediction.
EvalOutput evaluate_scene(const AssessmentResult& assessment, const LabelRaster& gt,
                          const PipelineConfig& cfg);

}  // namespace segconf
