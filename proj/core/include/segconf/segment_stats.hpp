#pragma once

#include <limits>
#include <map>

#include "segconf/components.hpp"
#include "segconf/raster.hpp"

namespace segconf {

enum class Aggregation { mean, median };

struct SegmentStatRow {
  uint32_t id = 0;
  double coverage = std::numeric_limits<double>::quiet_NaN();
  std::map<StatKind, double> aggregates;
  Region region_used = Region::whole;
  uint32_t n_pixels_used = 0;
};

// One row per segment: coverage plus aggregates of pixel statistics.
class SegmentStatTable {
 public:
  explicit SegmentStatTable(uint32_t segment_count)
      : rows_(segment_count), has_coverage_(false), eta_(0.0) {
    for (uint32_t i = 0; i < segment_count; ++i) rows_[i].id = i;
  }

  uint32_t segment_count() const { return static_cast<uint32_t>(rows_.size()); }
  const SegmentStatRow& row(uint32_t id) const;
  SegmentStatRow& row(uint32_t id);
  const std::vector<SegmentStatRow>& rows() const { return rows_; }

  bool has_coverage() const { return has_coverage_; }
  double eta() const { return eta_; }
  void set_coverage_meta(double eta) { has_coverage_ = true; eta_ = eta; }

  // Column-wise union; the other table must describe the same segments.
  void merge(const SegmentStatTable& other);

 private:
  std::vector<SegmentStatRow> rows_;
  bool has_coverage_;
  double eta_;
};

// Fraction of each segment's pixels whose top probability exceeds eta,
// computed over the whole segment.
SegmentStatTable coverage(const ProbCube& cube, const SegmentMap& segmap, double eta);

// Mean or median of a pixel statistic over the chosen region of each segment.
// Median of an even-size sample is the lower-middle order statistic. If the
// inner region is empty the whole segment is used and region_used records it.
SegmentStatTable aggregate(const StatRaster& stat, const SegmentMap& segmap,
                           Aggregation agg, Region region);

const char* region_name(Region region);
const char* aggregation_name(Aggregation agg);

}  // namespace segconf
