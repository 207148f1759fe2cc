#pragma once

#include <filesystem>
#include <map>

#include "segconf/segment_stats.hpp"

namespace segconf {

struct StatBounds {
  double lo = 0.0;  // 1st percentile over the calibration set
  double hi = 1.0;  // 99th percentile
  bool operator==(const StatBounds&) const = default;
};

// Robust-affine normalization bringing heterogeneous statistics onto a
// comparable scale before fusion. Serializes to JSON bit-exactly.
class NormalizationSpec {
 public:
  NormalizationSpec() = default;

  void set(StatKind kind, StatBounds bounds) { bounds_[kind] = bounds; }
  bool has(StatKind kind) const { return bounds_.count(kind) != 0; }
  const StatBounds& get(StatKind kind) const;
  const std::map<StatKind, StatBounds>& all() const { return bounds_; }
  const std::string& version() const { return version_; }

  // Clamped (v - lo) / (hi - lo) in [0,1].
  double normalize(StatKind kind, double v) const;

  void save(const std::filesystem::path& path) const;
  static NormalizationSpec load(const std::filesystem::path& path);

  bool operator==(const NormalizationSpec&) const = default;

 private:
  std::map<StatKind, StatBounds> bounds_;
  std::string version_ = "segconf-norm-1";
};

constexpr int64_t kMinCalibrationPixels = 1000;

// Fits 1st/99th percentile bounds per statistic over the calibration pixels
// (all valid pixels when `calibration_mask` is empty). Rasters flagged as
// omitted are skipped. Zero spread is an error.
NormalizationSpec fit_normalizer(const std::vector<const StatRaster*>& stats,
                                 const std::vector<uint8_t>& calibration_mask = {});

// Per-pixel raster carrying each pixel's segment coverage; pixels outside any
// segment are invalid.
StatRaster broadcast_coverage(const SegmentStatTable& table, const SegmentMap& segmap);

// The fused confidence metric: each active statistic is normalized to [0,1],
// mapped to [-1,1], summed with equal weights, rescaled by 4/m, and squashed
// through the logistic function. Result lies in (sigma(-4), sigma(4)).
StatRaster combine(const StatRaster& margin_stat, const StatRaster& neg_entropy_stat,
                   const StatRaster* gradient_stat_raster,
                   const SegmentStatTable& coverage_table, const SegmentMap& segmap,
                   const NormalizationSpec& norm);

enum class SegmentFlag : uint8_t { predicted_correct = 0, predicted_incorrect = 1 };

struct ConfidenceResult {
  StatRaster pixel_conf;                // T_z
  std::vector<double> segment_conf;     // indexed by segment id
  std::vector<SegmentFlag> flags;       // predicted_incorrect iff conf < tau
  std::vector<Region> region_used;      // region actually aggregated per segment
  double tau = 0.2;
  std::vector<uint8_t> abstain_mask;    // pixel-level rule: T_z < tau
};

// Aggregates T over each segment (default semantics: mean over the interior,
// falling back to the whole segment when the interior is empty) and flags
// segments strictly below tau.
ConfidenceResult segment_confidence(const StatRaster& pixel_conf, const SegmentMap& segmap,
                                    Aggregation agg, Region region, double tau);

enum class RefineMode { off, pixel, segment };

// Abstention refinement: low-confidence pixels (pixel mode) or all pixels of
// flagged segments (segment mode) become the abstain sentinel.
LabelRaster refine(const LabelRaster& pred, const ConfidenceResult& result,
                   const SegmentMap& segmap, RefineMode mode);

double logistic(double x);

}  // namespace segconf
