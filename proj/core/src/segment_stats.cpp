#include "segconf/segment_stats.hpp"

#include <algorithm>

#include "segconf/errors.hpp"
#include "segconf/parallel.hpp"
#include "segconf/pixel_stats.hpp"

namespace segconf {

const SegmentStatRow& SegmentStatTable::row(uint32_t id) const {
  if (id >= rows_.size())
    raise(ErrorKind::UnknownSegment, "segment id " + std::to_string(id) + " out of range");
  return rows_[id];
}

SegmentStatRow& SegmentStatTable::row(uint32_t id) {
  if (id >= rows_.size())
    raise(ErrorKind::UnknownSegment, "segment id " + std::to_string(id) + " out of range");
  return rows_[id];
}

void SegmentStatTable::merge(const SegmentStatTable& other) {
  if (other.segment_count() != segment_count())
    raise(ErrorKind::DimensionMismatch, "segment stat tables describe different segment counts");
  for (uint32_t i = 0; i < segment_count(); ++i) {
    const auto& src = other.rows_[i];
    auto& dst = rows_[i];
    for (const auto& [kind, value] : src.aggregates) dst.aggregates[kind] = value;
    if (other.has_coverage_) dst.coverage = src.coverage;
    if (!src.aggregates.empty()) {
      dst.region_used = src.region_used;
      dst.n_pixels_used = src.n_pixels_used;
    }
  }
  if (other.has_coverage_) {
    has_coverage_ = true;
    eta_ = other.eta_;
  }
}

SegmentStatTable coverage(const ProbCube& cube, const SegmentMap& segmap, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) raise(ErrorKind::InvalidSpec, "eta must lie in (0,1)");
  require_same_shape(cube.height(), cube.width(), segmap.height(), segmap.width(),
                     "cube/segment map shape");
  SegmentStatTable table(segmap.segment_count());
  table.set_coverage_meta(eta);
  if (segmap.segment_count() == 0) return table;

  const StatRaster top = max_prob(cube);
  std::vector<uint32_t> above(segmap.segment_count(), 0);
  const auto& ids = segmap.ids();
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == kNoSegmentId) continue;
    const int r = static_cast<int>(i / static_cast<size_t>(cube.width()));
    const int c = static_cast<int>(i % static_cast<size_t>(cube.width()));
    if (top.at(r, c) > eta) above[ids[i]] += 1;
  }
  for (uint32_t id = 0; id < segmap.segment_count(); ++id) {
    table.row(id).coverage =
        static_cast<double>(above[id]) / static_cast<double>(segmap.segment(id).size);
  }
  return table;
}

SegmentStatTable aggregate(const StatRaster& stat, const SegmentMap& segmap,
                           Aggregation agg, Region region) {
  require_same_shape(stat.height(), stat.width(), segmap.height(), segmap.width(),
                     "stat/segment map shape");
  if (region == Region::boundary)
    raise(ErrorKind::InvalidSpec, "aggregation region must be whole or inner");
  if (region == Region::inner && !segmap.split_done())
    raise(ErrorKind::InvalidSpec, "inner aggregation requires inner_boundary_split");

  const uint32_t n_segments = segmap.segment_count();
  SegmentStatTable table(n_segments);
  if (n_segments == 0) return table;

  // Row-major gather keeps per-segment value order fixed.
  std::vector<std::vector<double>> whole_vals(n_segments);
  std::vector<std::vector<double>> inner_vals(region == Region::inner ? n_segments : 0);
  const auto& ids = segmap.ids();
  const int w = segmap.width();
  for (size_t i = 0; i < ids.size(); ++i) {
    const uint32_t id = ids[i];
    if (id == kNoSegmentId) continue;
    const int r = static_cast<int>(i / static_cast<size_t>(w));
    const int c = static_cast<int>(i % static_cast<size_t>(w));
    if (!stat.valid(r, c)) continue;
    const double v = stat.at(r, c);
    whole_vals[id].push_back(v);
    if (region == Region::inner && segmap.is_inner(r, c)) inner_vals[id].push_back(v);
  }

  for (uint32_t id = 0; id < n_segments; ++id) {
    if (whole_vals[id].empty())
      raise(ErrorKind::NoValidPixels,
            "segment " + std::to_string(id) + " has no valid pixels to aggregate");
  }

  parallel_chunks(n_segments, [&](int64_t begin, int64_t end) {
    for (int64_t id = begin; id < end; ++id) {
      auto& row = table.row(static_cast<uint32_t>(id));
      const std::vector<double>* vals = &whole_vals[static_cast<size_t>(id)];
      row.region_used = Region::whole;
      if (region == Region::inner && !inner_vals[static_cast<size_t>(id)].empty()) {
        vals = &inner_vals[static_cast<size_t>(id)];
        row.region_used = Region::inner;
      }
      row.n_pixels_used = static_cast<uint32_t>(vals->size());
      double out;
      if (agg == Aggregation::mean) {
        double sum = 0.0;
        for (double v : *vals) sum += v;
        out = sum / static_cast<double>(vals->size());
      } else {
        std::vector<double> sorted(*vals);
        std::sort(sorted.begin(), sorted.end());
        out = sorted[(sorted.size() - 1) / 2];  // lower-middle for even counts
      }
      row.aggregates[stat.kind()] = out;
    }
  });
  return table;
}

const char* region_name(Region region) {
  switch (region) {
    case Region::whole: return "whole";
    case Region::inner: return "inner";
    case Region::boundary: return "boundary";
  }
  return "whole";
}

const char* aggregation_name(Aggregation agg) {
  return agg == Aggregation::mean ? "mean" : "median";
}

}  // namespace segconf
