#pragma once

#include <map>

#include "segconf/components.hpp"
#include "segconf/fusion.hpp"
#include "segconf/raster.hpp"

namespace segconf {

struct IoUResult {
  double macro = 0.0;
  std::map<int, double> per_class;  // classes present in the ground truth
};

// Per-class and macro IoU. Abstained and nodata pixels (either raster) are
// excluded from numerator and denominator alike.
IoUResult iou(const LabelRaster& pred, const LabelRaster& gt);

// Adjusted per-segment IoU: ground-truth components of the segment's class
// that intersect the segment contribute their outside pixels as false
// negatives. `adjusted=false` gives plain pixel accuracy within the segment.
// Segments without any valid (non-nodata) ground-truth pixel are skipped.
// When `refined` is given, abstained pixels are excluded from the false
// negatives, mirroring the abstention rule of the global IoU.
std::map<uint32_t, double> segment_iou(const SegmentMap& segmap, const LabelRaster& gt,
                                       bool adjusted = true,
                                       const LabelRaster* refined = nullptr);

// Sample Pearson correlation; requires n >= 2 and nonzero variance in both.
double pearson(const std::vector<double>& x, const std::vector<double>& y);
// Rank correlation (average ranks on ties), exposed for the ablation surface.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Correlation between segment confidence and per-segment IoU over the
// segments present in `seg_ious`.
double confidence_iou_correlation(const ConfidenceResult& result,
                                  const std::map<uint32_t, double>& seg_ious,
                                  bool rank_correlation = false);

struct Histogram {
  int bin_count = 0;
  std::vector<int64_t> counts_correct;
  std::vector<int64_t> counts_incorrect;
  std::vector<double> density_correct;    // per-bin probability mass
  std::vector<double> density_incorrect;
  int64_t total_correct = 0;
  int64_t total_incorrect = 0;

  double bin_lo(int i) const { return static_cast<double>(i) / bin_count; }
  double bin_hi(int i) const { return static_cast<double>(i + 1) / bin_count; }
};

// Confidence histograms of correct vs incorrect pixels on a uniform [0,1]
// grid, last bin right-inclusive. Abstained/nodata pixels are excluded.
Histogram build_histograms(const StatRaster& conf, const LabelRaster& pred,
                           const LabelRaster& gt, int bins);

struct DistributionMetrics {
  double wasserstein = 0.0;
  double js = 0.0;
  double kl_fwd = 0.0;  // KL(correct || incorrect), eps-smoothed
  double kl_rev = 0.0;
  double overlap_pct = 0.0;
  double euclidean = 0.0;
};

// Separation metrics on the density histograms (the primary suite).
DistributionMetrics distribution_metrics(const Histogram& h);
// Same formulas applied verbatim to raw bin counts, reported for reference
// against differently-scaled histogram conventions.
DistributionMetrics distribution_metrics_counts(const Histogram& h);

// Rank-statistic AUROC with ties counted one half.
double auroc(const std::vector<double>& scores, const std::vector<uint8_t>& is_positive);
double auroc(const StatRaster& conf, const LabelRaster& pred, const LabelRaster& gt);

struct PixelCounts {
  int64_t n_correct = 0;
  int64_t n_incorrect = 0;
  int64_t n_abstained = 0;
  int64_t n_nodata = 0;
};

// Partition of all pixels into correct / incorrect / abstained / nodata.
PixelCounts count_pixels(const LabelRaster& pred, const LabelRaster& gt);

struct EvalReport {
  double macro_iou = 0.0;
  std::map<int, double> per_class_iou;
  double pearson_r = 0.0;
  double auroc = 0.0;
  DistributionMetrics density_metrics;
  DistributionMetrics count_metrics;
  PixelCounts counts;
  int n_segments_scored = 0;
};

}  // namespace segconf
