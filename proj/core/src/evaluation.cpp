#include "segconf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "segconf/errors.hpp"

namespace segconf {

namespace {

bool scored(const LabelRaster& pred, const LabelRaster& gt, size_t i) {
  const int p = pred.values()[i];
  const int g = gt.values()[i];
  return pred.classes().is_class(p) && gt.classes().is_class(g);
}

constexpr double kKlEpsilon = 1e-12;

double kl_smoothed(const std::vector<double>& a, const std::vector<double>& b, bool renormalize) {
  std::vector<double> p(a), q(b);
  double ps = 0.0, qs = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] += kKlEpsilon;
    q[i] += kKlEpsilon;
    ps += p[i];
    qs += q[i];
  }
  if (renormalize) {
    for (size_t i = 0; i < p.size(); ++i) {
      p[i] /= ps;
      q[i] /= qs;
    }
  }
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) kl += p[i] * std::log(p[i] / q[i]);
  return kl;
}

double js_smoothed(const std::vector<double>& a, const std::vector<double>& b, bool renormalize) {
  std::vector<double> p(a), q(b);
  double ps = 0.0, qs = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] += kKlEpsilon;
    q[i] += kKlEpsilon;
    ps += p[i];
    qs += q[i];
  }
  if (renormalize) {
    for (size_t i = 0; i < p.size(); ++i) {
      p[i] /= ps;
      q[i] /= qs;
    }
  }
  double js = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    js += 0.5 * p[i] * std::log(p[i] / m) + 0.5 * q[i] * std::log(q[i] / m);
  }
  return js;
}

DistributionMetrics metrics_from_vectors(const std::vector<double>& p, const std::vector<double>& q,
                                         int bins, bool renormalize_kl) {
  DistributionMetrics m;
  const double bin_width = 1.0 / bins;
  double cp = 0.0, cq = 0.0;
  for (int i = 0; i < bins; ++i) {
    cp += p[static_cast<size_t>(i)];
    cq += q[static_cast<size_t>(i)];
    m.wasserstein += std::abs(cp - cq) * bin_width;
  }
  double sq = 0.0, ov = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double d = p[static_cast<size_t>(i)] - q[static_cast<size_t>(i)];
    sq += d * d;
    ov += std::min(p[static_cast<size_t>(i)], q[static_cast<size_t>(i)]);
  }
  m.euclidean = std::sqrt(sq);
  m.overlap_pct = 100.0 * ov;
  m.kl_fwd = kl_smoothed(p, q, renormalize_kl);
  m.kl_rev = kl_smoothed(q, p, renormalize_kl);
  m.js = js_smoothed(p, q, renormalize_kl);
  return m;
}

std::vector<double> average_ranks(const std::vector<double>& scores) {
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return a < b;
  });
  std::vector<double> rank(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j + 1);  // 1-based tie-average
    for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

}  // namespace

IoUResult iou(const LabelRaster& pred, const LabelRaster& gt) {
  validate_alignment(pred, gt);
  const int q = gt.classes().count();
  std::vector<int64_t> inter(static_cast<size_t>(q), 0);
  std::vector<int64_t> pred_count(static_cast<size_t>(q), 0);
  std::vector<int64_t> gt_count(static_cast<size_t>(q), 0);
  int64_t n_valid = 0;
  for (size_t i = 0; i < gt.values().size(); ++i) {
    if (!scored(pred, gt, i)) continue;
    ++n_valid;
    const int p = pred.values()[i];
    const int g = gt.values()[i];
    pred_count[static_cast<size_t>(p)] += 1;
    gt_count[static_cast<size_t>(g)] += 1;
    if (p == g) inter[static_cast<size_t>(p)] += 1;
  }
  if (n_valid == 0) raise(ErrorKind::NoValidPixels, "no jointly valid pixels to score");

  IoUResult result;
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < q; ++c) {
    if (gt_count[static_cast<size_t>(c)] == 0) continue;
    const int64_t uni = pred_count[static_cast<size_t>(c)] + gt_count[static_cast<size_t>(c)] -
                        inter[static_cast<size_t>(c)];
    const double v = static_cast<double>(inter[static_cast<size_t>(c)]) / static_cast<double>(uni);
    result.per_class[c] = v;
    sum += v;
    ++present;
  }
  result.macro = sum / static_cast<double>(present);
  return result;
}

std::map<uint32_t, double> segment_iou(const SegmentMap& segmap, const LabelRaster& gt,
                                       bool adjusted, const LabelRaster* refined) {
  require_same_shape(segmap.height(), segmap.width(), gt.height(), gt.width(),
                     "segment map/gt shape");
  if (refined != nullptr) validate_alignment(*refined, gt);
  const SegmentMap gtmap = connected_components(gt, segmap.connectivity());

  const size_t n = gt.values().size();
  std::vector<int64_t> tp(segmap.segment_count(), 0);
  std::vector<int64_t> valid_size(segmap.segment_count(), 0);
  // Non-abstained pixel count per ground-truth component.
  std::vector<int64_t> gt_live(gtmap.segment_count(), 0);
  const int abstain = gt.classes().abstain_index();
  for (size_t i = 0; i < n; ++i) {
    const uint32_t gid = gtmap.ids()[i];
    if (gid == kNoSegmentId) continue;
    if (refined == nullptr || refined->values()[i] != abstain) gt_live[gid] += 1;
  }
  // Overlap counts between a predicted segment and the ground-truth components
  // of its own class. Abstained pixels are invisible throughout.
  std::unordered_map<uint64_t, int64_t> overlap;
  for (size_t i = 0; i < n; ++i) {
    const uint32_t kid = segmap.ids()[i];
    if (kid == kNoSegmentId) continue;
    if (refined != nullptr && refined->values()[i] == abstain) continue;
    const int g = gt.values()[i];
    if (!gt.classes().is_class(g)) continue;  // nodata under the segment
    valid_size[kid] += 1;
    if (g == segmap.segment(kid).class_index) {
      tp[kid] += 1;
      overlap[(static_cast<uint64_t>(kid) << 32) | gtmap.ids()[i]] += 1;
    }
  }

  std::vector<int64_t> fn(segmap.segment_count(), 0);
  for (const auto& [key, count] : overlap) {
    const uint32_t kid = static_cast<uint32_t>(key >> 32);
    const uint32_t gid = static_cast<uint32_t>(key & 0xFFFFFFFFu);
    fn[kid] += gt_live[gid] - count;
  }

  std::map<uint32_t, double> result;
  for (uint32_t kid = 0; kid < segmap.segment_count(); ++kid) {
    if (valid_size[kid] == 0) continue;
    const int64_t fp = valid_size[kid] - tp[kid];
    if (adjusted) {
      const int64_t denom = tp[kid] + fp + fn[kid];
      result[kid] = denom > 0 ? static_cast<double>(tp[kid]) / static_cast<double>(denom) : 0.0;
    } else {
      result[kid] = static_cast<double>(tp[kid]) / static_cast<double>(valid_size[kid]);
    }
  }
  return result;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) raise(ErrorKind::DimensionMismatch, "correlation series lengths differ");
  const size_t n = x.size();
  if (n < 2) raise(ErrorKind::DegenerateVariance, "need at least 2 pairs for a correlation");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    raise(ErrorKind::DegenerateVariance, "a correlation series has zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) raise(ErrorKind::DimensionMismatch, "correlation series lengths differ");
  return pearson(average_ranks(x), average_ranks(y));
}

double confidence_iou_correlation(const ConfidenceResult& result,
                                  const std::map<uint32_t, double>& seg_ious,
                                  bool rank_correlation) {
  std::vector<double> conf, ious;
  conf.reserve(seg_ious.size());
  ious.reserve(seg_ious.size());
  for (const auto& [id, v] : seg_ious) {
    if (id >= result.segment_conf.size())
      raise(ErrorKind::UnknownSegment, "segment id " + std::to_string(id) + " not in result");
    conf.push_back(result.segment_conf[id]);
    ious.push_back(v);
  }
  return rank_correlation ? spearman(conf, ious) : pearson(conf, ious);
}

Histogram build_histograms(const StatRaster& conf, const LabelRaster& pred,
                           const LabelRaster& gt, int bins) {
  if (bins < 2) raise(ErrorKind::InvalidSpec, "need at least 2 histogram bins");
  validate_alignment(pred, gt);
  require_same_shape(conf.height(), conf.width(), gt.height(), gt.width(), "conf/gt shape");

  Histogram h;
  h.bin_count = bins;
  h.counts_correct.assign(static_cast<size_t>(bins), 0);
  h.counts_incorrect.assign(static_cast<size_t>(bins), 0);
  const int w = conf.width();
  for (size_t i = 0; i < gt.values().size(); ++i) {
    if (!scored(pred, gt, i)) continue;
    const int r = static_cast<int>(i / static_cast<size_t>(w));
    const int c = static_cast<int>(i % static_cast<size_t>(w));
    if (!conf.valid(r, c)) continue;
    const double t = conf.at(r, c);
    int bin = static_cast<int>(t * bins);
    bin = std::clamp(bin, 0, bins - 1);  // last bin right-inclusive
    if (pred.values()[i] == gt.values()[i]) h.counts_correct[static_cast<size_t>(bin)] += 1;
    else h.counts_incorrect[static_cast<size_t>(bin)] += 1;
  }
  for (int64_t v : h.counts_correct) h.total_correct += v;
  for (int64_t v : h.counts_incorrect) h.total_incorrect += v;
  if (h.total_correct + h.total_incorrect == 0)
    raise(ErrorKind::NoValidPixels, "no valid pixels to histogram");

  h.density_correct.assign(static_cast<size_t>(bins), 0.0);
  h.density_incorrect.assign(static_cast<size_t>(bins), 0.0);
  for (int i = 0; i < bins; ++i) {
    if (h.total_correct > 0)
      h.density_correct[static_cast<size_t>(i)] =
          static_cast<double>(h.counts_correct[static_cast<size_t>(i)]) /
          static_cast<double>(h.total_correct);
    if (h.total_incorrect > 0)
      h.density_incorrect[static_cast<size_t>(i)] =
          static_cast<double>(h.counts_incorrect[static_cast<size_t>(i)]) /
          static_cast<double>(h.total_incorrect);
  }
  return h;
}

DistributionMetrics distribution_metrics(const Histogram& h) {
  if (h.total_correct == 0 || h.total_incorrect == 0)
    raise(ErrorKind::EmptyPopulation, "both populations must be nonempty");
  return metrics_from_vectors(h.density_correct, h.density_incorrect, h.bin_count, true);
}

DistributionMetrics distribution_metrics_counts(const Histogram& h) {
  if (h.total_correct == 0 || h.total_incorrect == 0)
    raise(ErrorKind::EmptyPopulation, "both populations must be nonempty");
  std::vector<double> p(h.counts_correct.begin(), h.counts_correct.end());
  std::vector<double> q(h.counts_incorrect.begin(), h.counts_incorrect.end());
  return metrics_from_vectors(p, q, h.bin_count, false);
}

double auroc(const std::vector<double>& scores, const std::vector<uint8_t>& is_positive) {
  if (scores.size() != is_positive.size())
    raise(ErrorKind::DimensionMismatch, "scores and labels differ in length");
  int64_t n_pos = 0, n_neg = 0;
  for (uint8_t v : is_positive) (v ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    raise(ErrorKind::EmptyPopulation, "AUROC needs both populations");
  const std::vector<double> rank = average_ranks(scores);
  double rank_sum_pos = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (is_positive[i]) rank_sum_pos += rank[i];
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auroc(const StatRaster& conf, const LabelRaster& pred, const LabelRaster& gt) {
  validate_alignment(pred, gt);
  require_same_shape(conf.height(), conf.width(), gt.height(), gt.width(), "conf/gt shape");
  std::vector<double> scores;
  std::vector<uint8_t> labels;
  const int w = conf.width();
  for (size_t i = 0; i < gt.values().size(); ++i) {
    if (!scored(pred, gt, i)) continue;
    const int r = static_cast<int>(i / static_cast<size_t>(w));
    const int c = static_cast<int>(i % static_cast<size_t>(w));
    if (!conf.valid(r, c)) continue;
    scores.push_back(conf.at(r, c));
    labels.push_back(pred.values()[i] == gt.values()[i] ? 1 : 0);
  }
  return auroc(scores, labels);
}

PixelCounts count_pixels(const LabelRaster& pred, const LabelRaster& gt) {
  validate_alignment(pred, gt);
  PixelCounts counts;
  for (size_t i = 0; i < gt.values().size(); ++i) {
    const int g = gt.values()[i];
    const int p = pred.values()[i];
    if (!gt.classes().is_class(g) || p == pred.classes().nodata_index()) {
      counts.n_nodata += 1;
    } else if (p == pred.classes().abstain_index()) {
      counts.n_abstained += 1;
    } else if (p == g) {
      counts.n_correct += 1;
    } else {
      counts.n_incorrect += 1;
    }
  }
  return counts;
}

}  // namespace segconf
