#include "segconf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "segconf/errors.hpp"
#include "segconf/manifest.hpp"
#include "segconf/parallel.hpp"

namespace segconf {

using nlohmann::json;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

const StatBounds& NormalizationSpec::get(StatKind kind) const {
  auto it = bounds_.find(kind);
  if (it == bounds_.end())
    raise(ErrorKind::MissingStatistic,
          std::string("normalization spec has no bounds for '") + stat_kind_name(kind) + "'");
  return it->second;
}

double NormalizationSpec::normalize(StatKind kind, double v) const {
  const StatBounds& b = get(kind);
  const double u = (v - b.lo) / (b.hi - b.lo);
  return std::clamp(u, 0.0, 1.0);
}

void NormalizationSpec::save(const std::filesystem::path& path) const {
  json stats = json::object();
  for (const auto& [kind, b] : bounds_) {
    stats[stat_kind_name(kind)] = {{"lo", b.lo}, {"hi", b.hi}};
  }
  json j;
  j["version"] = version_;
  j["stats"] = stats;
  write_text_file(path, j.dump(2) + "\n");
}

NormalizationSpec NormalizationSpec::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    raise(ErrorKind::MissingFile, "normalization spec not found: " + path.string());
  std::ifstream in(path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("stats") || !j.contains("version"))
    raise(ErrorKind::BadManifest, "malformed normalization spec: " + path.string());
  NormalizationSpec spec;
  spec.version_ = j["version"].get<std::string>();
  for (const auto& [name, b] : j["stats"].items()) {
    spec.set(stat_kind_from_name(name), StatBounds{b["lo"].get<double>(), b["hi"].get<double>()});
  }
  return spec;
}

namespace {

// Linear-interpolation quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double rank = p * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(rank);
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

NormalizationSpec fit_normalizer(const std::vector<const StatRaster*>& stats,
                                 const std::vector<uint8_t>& calibration_mask) {
  if (stats.empty()) raise(ErrorKind::MissingStatistic, "no statistics to fit");
  NormalizationSpec spec;
  for (const StatRaster* stat : stats) {
    if (stat == nullptr || stat->omitted()) continue;
    const size_t n = stat->values().size();
    if (!calibration_mask.empty() && calibration_mask.size() != n)
      raise(ErrorKind::DimensionMismatch, "calibration mask does not match the raster shape");
    std::vector<double> sample;
    sample.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      if (!stat->valid_mask()[i]) continue;
      if (!calibration_mask.empty() && !calibration_mask[i]) continue;
      sample.push_back(stat->values()[i]);
    }
    if (static_cast<int64_t>(sample.size()) < kMinCalibrationPixels)
      raise(ErrorKind::TooFewPixels,
            std::string("calibration set for '") + stat_kind_name(stat->kind()) + "' has " +
                std::to_string(sample.size()) + " pixels, need " +
                std::to_string(kMinCalibrationPixels));
    std::sort(sample.begin(), sample.end());
    const double lo = quantile_sorted(sample, 0.01);
    const double hi = quantile_sorted(sample, 0.99);
    if (lo == hi)
      raise(ErrorKind::DegenerateStatistic,
            std::string("statistic '") + stat_kind_name(stat->kind()) + "' has zero spread");
    spec.set(stat->kind(), StatBounds{lo, hi});
  }
  if (spec.all().empty()) raise(ErrorKind::MissingStatistic, "no statistics to fit");
  return spec;
}

StatRaster broadcast_coverage(const SegmentStatTable& table, const SegmentMap& segmap) {
  if (!table.has_coverage()) raise(ErrorKind::MissingStatistic, "table carries no coverage");
  if (table.segment_count() != segmap.segment_count())
    raise(ErrorKind::DimensionMismatch, "coverage table does not match the segment map");
  StatRaster out(segmap.height(), segmap.width(), StatKind::coverage);
  const auto& ids = segmap.ids();
  const int w = segmap.width();
  parallel_chunks(static_cast<int64_t>(ids.size()), [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = static_cast<int>(i / w);
      const int c = static_cast<int>(i % w);
      const uint32_t id = ids[static_cast<size_t>(i)];
      if (id == kNoSegmentId) out.invalidate(r, c);
      else out.set(r, c, table.row(id).coverage);
    }
  });
  return out;
}

StatRaster combine(const StatRaster& margin_stat, const StatRaster& neg_entropy_stat,
                   const StatRaster* gradient_stat_raster,
                   const SegmentStatTable& coverage_table, const SegmentMap& segmap,
                   const NormalizationSpec& norm) {
  require_same_shape(margin_stat.height(), margin_stat.width(), neg_entropy_stat.height(),
                     neg_entropy_stat.width(), "margin/entropy shape");
  require_same_shape(margin_stat.height(), margin_stat.width(), segmap.height(), segmap.width(),
                     "stat/segment map shape");
  const StatRaster coverage_stat = broadcast_coverage(coverage_table, segmap);

  std::vector<const StatRaster*> active = {&margin_stat, &neg_entropy_stat, &coverage_stat};
  if (gradient_stat_raster != nullptr && !gradient_stat_raster->omitted()) {
    require_same_shape(margin_stat.height(), margin_stat.width(), gradient_stat_raster->height(),
                       gradient_stat_raster->width(), "margin/gradient shape");
    active.push_back(gradient_stat_raster);
  }
  for (const StatRaster* stat : active) {
    if (!norm.has(stat->kind()))
      raise(ErrorKind::MissingStatistic,
            std::string("normalization spec lacks '") + stat_kind_name(stat->kind()) + "'");
  }

  const double rescale = 4.0 / static_cast<double>(active.size());
  StatRaster out(margin_stat.height(), margin_stat.width(), StatKind::confidence);
  const int w = margin_stat.width();
  parallel_chunks(static_cast<int64_t>(margin_stat.height()) * w,
                  [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = static_cast<int>(i / w);
      const int c = static_cast<int>(i % w);
      bool ok = true;
      double sum = 0.0;
      for (const StatRaster* stat : active) {
        if (!stat->valid(r, c)) { ok = false; break; }
        sum += 2.0 * norm.normalize(stat->kind(), stat->at(r, c)) - 1.0;
      }
      if (ok) out.set(r, c, logistic(rescale * sum));
      else out.invalidate(r, c);
    }
  });
  return out;
}

ConfidenceResult segment_confidence(const StatRaster& pixel_conf, const SegmentMap& segmap,
                                    Aggregation agg, Region region, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) raise(ErrorKind::InvalidSpec, "tau must lie in [0,1]");
  const SegmentStatTable table = aggregate(pixel_conf, segmap, agg, region);

  ConfidenceResult result{pixel_conf, {}, {}, {}, tau, {}};
  const uint32_t n = segmap.segment_count();
  result.segment_conf.resize(n);
  result.flags.resize(n);
  result.region_used.resize(n);
  for (uint32_t id = 0; id < n; ++id) {
    const auto& row = table.row(id);
    const double conf = row.aggregates.at(pixel_conf.kind());
    result.segment_conf[id] = conf;
    result.flags[id] =
        conf < tau ? SegmentFlag::predicted_incorrect : SegmentFlag::predicted_correct;
    result.region_used[id] = row.region_used;
  }

  result.abstain_mask.assign(pixel_conf.values().size(), 0);
  const int w = pixel_conf.width();
  for (size_t i = 0; i < result.abstain_mask.size(); ++i) {
    const int r = static_cast<int>(i / static_cast<size_t>(w));
    const int c = static_cast<int>(i % static_cast<size_t>(w));
    if (pixel_conf.valid(r, c) && pixel_conf.at(r, c) < tau) result.abstain_mask[i] = 1;
  }
  return result;
}

LabelRaster refine(const LabelRaster& pred, const ConfidenceResult& result,
                   const SegmentMap& segmap, RefineMode mode) {
  if (mode == RefineMode::off) return pred;
  require_same_shape(pred.height(), pred.width(), segmap.height(), segmap.width(),
                     "labels/segment map shape");
  std::vector<uint8_t> values = pred.values();
  const uint8_t abstain = static_cast<uint8_t>(pred.classes().abstain_index());
  const auto& ids = segmap.ids();
  for (size_t i = 0; i < values.size(); ++i) {
    if (!pred.classes().is_class(values[i])) continue;  // sentinels stay put
    if (mode == RefineMode::pixel) {
      if (i < result.abstain_mask.size() && result.abstain_mask[i]) values[i] = abstain;
    } else {
      const uint32_t id = ids[i];
      if (id != kNoSegmentId && result.flags[id] == SegmentFlag::predicted_incorrect)
        values[i] = abstain;
    }
  }
  return LabelRaster(pred.height(), pred.width(), pred.classes(), std::move(values));
}

}  // namespace segconf
