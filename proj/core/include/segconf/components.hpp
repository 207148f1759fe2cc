#pragma once

#include <cstdint>
#include <vector>

#include "segconf/raster.hpp"

namespace segconf {

enum class Connectivity { four = 4, eight = 8 };

// Image-border handling for the inner/boundary split: out-of-image neighbors
// either count as outside the segment (border pixels are always boundary) or
// are ignored (border pixels can be inner).
enum class BorderPolicy { outside, ignore };

constexpr uint32_t kNoSegmentId = 0xFFFFFFFFu;

struct SegmentRecord {
  uint32_t id = 0;
  int class_index = 0;
  uint32_t size = 0;
  uint32_t inner_size = 0;  // populated by inner_boundary_split
  int row0 = 0, col0 = 0, row1 = 0, col1 = 0;  // inclusive bounding box
};

enum class Region { whole, inner, boundary };

// Partition of the non-sentinel pixels of a label raster into maximal
// same-class connected components. Ids are dense 0..S-1 in first-encounter
// row-major order; sentinel pixels carry kNoSegmentId.
class SegmentMap {
 public:
  SegmentMap(int height, int width, std::vector<uint32_t> ids,
             std::vector<SegmentRecord> segments, Connectivity connectivity);

  int height() const { return height_; }
  int width() const { return width_; }
  Connectivity connectivity() const { return connectivity_; }

  uint32_t segment_count() const { return static_cast<uint32_t>(segments_.size()); }
  const std::vector<SegmentRecord>& segments() const { return segments_; }
  const SegmentRecord& segment(uint32_t id) const;

  uint32_t id_at(int row, int col) const {
    return ids_[static_cast<size_t>(row) * width_ + col];
  }
  const std::vector<uint32_t>& ids() const { return ids_; }

  bool split_done() const { return !inner_.empty(); }
  bool is_inner(int row, int col) const {
    return !inner_.empty() && inner_[static_cast<size_t>(row) * width_ + col] != 0;
  }
  const std::vector<uint8_t>& inner_mask() const { return inner_; }

 private:
  friend SegmentMap inner_boundary_split(SegmentMap segmap, BorderPolicy policy);

  int height_;
  int width_;
  Connectivity connectivity_;
  std::vector<uint32_t> ids_;
  std::vector<SegmentRecord> segments_;
  std::vector<uint8_t> inner_;  // empty until the split runs
};

// Two-pass union-find labeling, strip-parallel with a deterministic merge:
// the result is identical for any worker count.
SegmentMap connected_components(const LabelRaster& labels,
                                Connectivity connectivity = Connectivity::four);

// Marks each pixel inner iff all its 4-adjacent neighbors (per `policy` for
// the image border) belong to the same segment; fills SegmentRecord::inner_size.
SegmentMap inner_boundary_split(SegmentMap segmap, BorderPolicy policy = BorderPolicy::outside);

// Row-major coordinates of the requested region of one segment.
std::vector<Pixel> segment_pixels(const SegmentMap& segmap, uint32_t id, Region region);

}  // namespace segconf
