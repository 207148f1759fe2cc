#include "segconf/pipeline.hpp"

#include <limits>

#include "segconf/errors.hpp"
#include "segconf/pixel_stats.hpp"

namespace segconf {

AssessmentResult run_assessment(const ProbCube& cube, const FeatureCube* features,
                                const LabelRaster* gt, const PipelineConfig& cfg,
                                const NormalizationSpec* preset_norm) {
  LabelRaster prediction = predict(cube);
  if (gt != nullptr) {
    validate_alignment(cube, *gt);
    prediction = mask_nodata(prediction, *gt);
  }

  SegmentMap segmap = inner_boundary_split(connected_components(prediction, cfg.connectivity),
                                           cfg.border_policy);

  StatRaster margin_stat = margin(cube);
  StatRaster entropy_stat = neg_entropy(cube);
  StatRaster grad_stat = gradient_stat(cube, cfg.use_gradient ? features : nullptr);
  SegmentStatTable table = coverage(cube, segmap, cfg.eta);

  if (cfg.baseline_softmax) {
    StatRaster conf = max_prob(cube);
    ConfidenceResult result = segment_confidence(conf, segmap, cfg.agg, cfg.region, cfg.tau);
    // The base model abstains from nothing.
    LabelRaster refined = prediction;
    table.merge(aggregate(conf, segmap, cfg.agg, cfg.region));
    return AssessmentResult{std::move(prediction), std::move(segmap), std::move(margin_stat),
                            std::move(entropy_stat), std::move(grad_stat), std::move(table),
                            NormalizationSpec{}, std::move(result), std::move(refined)};
  }

  const StatRaster coverage_stat = broadcast_coverage(table, segmap);
  NormalizationSpec norm;
  if (preset_norm != nullptr) {
    norm = *preset_norm;
  } else {
    // Calibrate on the pixels that belong to a segment (nodata carries none).
    std::vector<uint8_t> mask(segmap.ids().size(), 0);
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = segmap.ids()[i] != kNoSegmentId ? 1 : 0;
    norm = fit_normalizer({&margin_stat, &entropy_stat, &grad_stat, &coverage_stat}, mask);
  }

  StatRaster pixel_conf = combine(margin_stat, entropy_stat, &grad_stat, table, segmap, norm);
  ConfidenceResult result = segment_confidence(pixel_conf, segmap, cfg.agg, cfg.region, cfg.tau);
  LabelRaster refined = refine(prediction, result, segmap, cfg.refine_mode);

  table.merge(aggregate(margin_stat, segmap, cfg.agg, cfg.region));
  table.merge(aggregate(entropy_stat, segmap, cfg.agg, cfg.region));
  if (!grad_stat.omitted()) table.merge(aggregate(grad_stat, segmap, cfg.agg, cfg.region));
  table.merge(aggregate(pixel_conf, segmap, cfg.agg, cfg.region));

  return AssessmentResult{std::move(prediction), std::move(segmap), std::move(margin_stat),
                          std::move(entropy_stat), std::move(grad_stat), std::move(table),
                          std::move(norm), std::move(result), std::move(refined)};
}

EvalOutput evaluate_scene(const AssessmentResult& assessment, const LabelRaster& gt,
                          const PipelineConfig& cfg) {
  EvalOutput out;
  const bool refined_eval = !cfg.baseline_softmax && cfg.refine_mode != RefineMode::off;
  const LabelRaster& labels = refined_eval ? assessment.refined : assessment.prediction;

  const IoUResult iou_result = iou(labels, gt);
  out.report.macro_iou = iou_result.macro;
  out.report.per_class_iou = iou_result.per_class;

  // The confidence-IoU correlation is threshold-independent: all predicted
  // segments are scored with the unrefined per-segment IoU. Scenes without
  // variance (e.g. error-free) report no correlation rather than failing.
  out.seg_ious = segment_iou(assessment.segmap, gt, cfg.adjusted_seg_iou);
  try {
    out.report.pearson_r =
        confidence_iou_correlation(assessment.confidence, out.seg_ious, cfg.rank_correlation);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateVariance) throw;
    out.report.pearson_r = std::numeric_limits<double>::quiet_NaN();
  }
  out.report.n_segments_scored = static_cast<int>(out.seg_ious.size());

  const StatRaster& conf = assessment.confidence.pixel_conf;
  out.histogram = build_histograms(conf, assessment.prediction, gt, cfg.bins);
  try {
    out.report.density_metrics = distribution_metrics(out.histogram);
    out.report.count_metrics = distribution_metrics_counts(out.histogram);
    out.report.auroc = auroc(conf, assessment.prediction, gt);
  } catch (const Error& e) {
    // One empty population (e.g. an error-free scene) leaves the separability
    // metrics undefined, not the whole report.
    if (e.kind() != ErrorKind::EmptyPopulation) throw;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.report.density_metrics = {nan, nan, nan, nan, nan, nan};
    out.report.count_metrics = {nan, nan, nan, nan, nan, nan};
    out.report.auroc = nan;
  }
  out.report.counts = count_pixels(labels, gt);
  return out;
}

}  // namespace segconf
