#include "segconf/synth.hpp"

#include <algorithm>
#include <cmath>

#include "segconf/errors.hpp"

namespace segconf {

namespace {

enum Stream : uint64_t {
  kSites = 1,
  kSiteDifficulty,
  kErrorDraw,
  kErrorTarget,
  kTopProb,
  kRunnerGap,
  kShareJitter,
  kFeatures,
  kPartnerPick,
  kConfidentSpike,
  kBlobSeed,
};

constexpr int kDrawSlots = 4;  // per-pixel slots within a stream

struct PartnerTable {
  std::vector<std::vector<int>> partners;
  explicit PartnerTable(int q) : partners(static_cast<size_t>(q)) {}
  bool in_pair(int c) const { return !partners[static_cast<size_t>(c)].empty(); }
};

void validate(const SceneSpec& spec) {
  if (spec.height < 1 || spec.width < 1) raise(ErrorKind::InvalidSpec, "scene must be at least 1x1");
  if (spec.q < 2) raise(ErrorKind::InvalidSpec, "need at least 2 classes");
  if (spec.q > 250) raise(ErrorKind::InvalidSpec, "class count exceeds the u8 payload range");
  if (spec.n_seeds < 1) raise(ErrorKind::InvalidSpec, "need at least one Voronoi site");
  if (!(spec.error_rate >= 0.0 && spec.error_rate <= 1.0))
    raise(ErrorKind::InvalidSpec, "error_rate must lie in [0,1]");
  if (!(spec.sharpness > 0.0)) raise(ErrorKind::InvalidSpec, "sharpness must be positive");
  if (spec.feature_depth < 1) raise(ErrorKind::InvalidSpec, "feature depth must be positive");
  for (const auto& [a, b] : spec.confusion_pairs) {
    if (a < 0 || a >= spec.q || b < 0 || b >= spec.q || a == b)
      raise(ErrorKind::InvalidSpec, "confusion pair indices must be distinct classes");
  }
}

// Raises p to an integer power exactly; falls back to std::pow otherwise.
double power(double p, double s) {
  const int si = static_cast<int>(s);
  if (static_cast<double>(si) == s && si >= 1 && si <= 64) {
    double out = 1.0;
    for (int i = 0; i < si; ++i) out *= p;
    return out;
  }
  return std::pow(p, s);
}

}  // namespace

Scene generate(const SceneSpec& spec) {
  validate(spec);
  const CounterRng rng(spec.seed);
  const int h = spec.height;
  const int w = spec.width;
  const int q = spec.q;
  const size_t n = static_cast<size_t>(h) * w;

  // Voronoi ground truth: nearest site wins, ties to the lowest site index.
  std::vector<int> site_row(static_cast<size_t>(spec.n_seeds));
  std::vector<int> site_col(static_cast<size_t>(spec.n_seeds));
  std::vector<int> site_class(static_cast<size_t>(spec.n_seeds));
  for (int s = 0; s < spec.n_seeds; ++s) {
    site_row[static_cast<size_t>(s)] = static_cast<int>(rng.below(kSites, 3 * static_cast<uint64_t>(s), static_cast<uint64_t>(h)));
    site_col[static_cast<size_t>(s)] = static_cast<int>(rng.below(kSites, 3 * static_cast<uint64_t>(s) + 1, static_cast<uint64_t>(w)));
    site_class[static_cast<size_t>(s)] = static_cast<int>(rng.below(kSites, 3 * static_cast<uint64_t>(s) + 2, static_cast<uint64_t>(q)));
  }
  // Each cell also carries a latent difficulty: regions where the sensor view
  // is ambiguous. Confidence and (when informative) error placement both
  // follow it, which is what gives segment confidence a quality gradient.
  // Squaring skews the mix toward easy cells.
  std::vector<double> site_difficulty(static_cast<size_t>(spec.n_seeds));
  for (int s = 0; s < spec.n_seeds; ++s) {
    const double u = rng.uniform(kSiteDifficulty, static_cast<uint64_t>(s));
    site_difficulty[static_cast<size_t>(s)] = u * u;
  }

  std::vector<uint8_t> gt_vals(n);
  std::vector<float> pixel_difficulty(n);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int64_t best = -1;
      int best_site = 0;
      for (int s = 0; s < spec.n_seeds; ++s) {
        const int64_t dr = r - site_row[static_cast<size_t>(s)];
        const int64_t dc = c - site_col[static_cast<size_t>(s)];
        const int64_t d2 = dr * dr + dc * dc;
        if (best < 0 || d2 < best) {
          best = d2;
          best_site = s;
        }
      }
      gt_vals[static_cast<size_t>(r) * w + c] =
          static_cast<uint8_t>(site_class[static_cast<size_t>(best_site)]);
      pixel_difficulty[static_cast<size_t>(r) * w + c] =
          static_cast<float>(site_difficulty[static_cast<size_t>(best_site)]);
    }
  }

  PartnerTable partners(q);
  for (const auto& [a, b] : spec.confusion_pairs) {
    partners.partners[static_cast<size_t>(a)].push_back(b);
    partners.partners[static_cast<size_t>(b)].push_back(a);
  }

  auto gt_at = [&](int r, int c) { return static_cast<int>(gt_vals[static_cast<size_t>(r) * w + c]); };
  auto is_border = [&](int r, int c) {
    const int g = gt_at(r, c);
    if (r > 0 && gt_at(r - 1, c) != g) return true;
    if (r + 1 < h && gt_at(r + 1, c) != g) return true;
    if (c > 0 && gt_at(r, c - 1) != g) return true;
    if (c + 1 < w && gt_at(r, c + 1) != g) return true;
    return false;
  };

  // Error placement: interiors of confusion-pair classes carry more weight,
  // and (when confidence is informative) difficult cells err more often. The
  // bias is blended out as error_rate -> 1 so extreme rates stay exact.
  std::vector<double> weight(n, 1.0);
  double weight_sum = 0.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double v = 1.0;
      if (partners.in_pair(gt_at(r, c))) v = is_border(r, c) ? 1.5 : 3.0;
      if (spec.informative_confidence)
        v *= 0.25 + 1.75 * pixel_difficulty[static_cast<size_t>(r) * w + c];
      v = 1.0 + (1.0 - spec.error_rate) * (v - 1.0);
      weight[static_cast<size_t>(r) * w + c] = v;
      weight_sum += v;
    }
  }
  const double mean_weight = weight_sum / static_cast<double>(n);

  // Pass 1: error placement and predicted classes. Model mistakes come in
  // contiguous misread patches, so most of the error budget is spent on a
  // Boolean disc model (one wrong class per blob), the rest on lone pixels.
  std::vector<uint8_t> is_error(n, 0);
  std::vector<uint8_t> target_class(n);
  for (size_t z = 0; z < n; ++z) target_class[z] = gt_vals[z];

  auto pick_wrong_class = [&](int truth, uint64_t slot) {
    if (partners.in_pair(truth) && rng.uniform(kErrorTarget, slot) < 0.75) {
      const auto& ps = partners.partners[static_cast<size_t>(truth)];
      return ps[rng.below(kPartnerPick, slot, ps.size())];
    }
    const int other =
        static_cast<int>(rng.below(kErrorTarget, slot + 1, static_cast<uint64_t>(q - 1)));
    return other >= truth ? other + 1 : other;
  };

  if (spec.error_rate >= 1.0) {
    for (size_t z = 0; z < n; ++z) {
      is_error[z] = 1;
      target_class[z] =
          static_cast<uint8_t>(pick_wrong_class(static_cast<int>(gt_vals[z]), z * kDrawSlots));
    }
  } else if (spec.error_rate > 0.0) {
    double w_max = 0.0;
    for (size_t z = 0; z < n; ++z) w_max = std::max(w_max, weight[z]);

    // Lone-pixel component: 15% of the budget.
    const double iid_budget = 0.15 * spec.error_rate;
    for (size_t z = 0; z < n; ++z) {
      const double p = std::clamp(iid_budget * weight[z] / mean_weight, 0.0, 1.0);
      if (rng.uniform(kErrorDraw, z) < p) {
        is_error[z] = 1;
        target_class[z] = static_cast<uint8_t>(
            pick_wrong_class(static_cast<int>(gt_vals[z]), z * kDrawSlots));
      }
    }

    // Blob component: discs of radius 1..3 seeded with intensity proportional
    // to the local weight. The -ln(1-p) form corrects for blob overlap and the
    // trailing factor for mass lost to border clipping and same-class spill.
    const double blob_budget = 0.85 * spec.error_rate;
    const double mean_disc_area = 47.0 / 3.0;  // radii 1,2,3 -> 5,13,29 pixels
    const double lambda = -std::log(1.0 - blob_budget) / mean_disc_area * 1.12;
    const uint64_t candidates = static_cast<uint64_t>(
        std::ceil(lambda * (w_max / mean_weight) * static_cast<double>(n)));
    for (uint64_t k = 0; k < candidates; ++k) {
      const uint64_t slot = k * 6;
      const int r0 = static_cast<int>(rng.below(kBlobSeed, slot, static_cast<uint64_t>(h)));
      const int c0 = static_cast<int>(rng.below(kBlobSeed, slot + 1, static_cast<uint64_t>(w)));
      const size_t center = static_cast<size_t>(r0) * w + c0;
      if (rng.uniform(kBlobSeed, slot + 2) >= weight[center] / w_max) continue;
      const int radius = 1 + static_cast<int>(rng.below(kBlobSeed, slot + 3, 3));
      const int blob_target =
          pick_wrong_class(static_cast<int>(gt_vals[center]), (n + k) * kDrawSlots);
      for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
          if (dr * dr + dc * dc > radius * radius) continue;
          const int nr = r0 + dr;
          const int nc = c0 + dc;
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          const size_t i = static_cast<size_t>(nr) * w + nc;
          if (gt_vals[i] == blob_target) continue;  // spill onto the target's own region
          is_error[i] = 1;
          target_class[i] = static_cast<uint8_t>(blob_target);
        }
      }
    }
  }

  // Pass 2: per-pixel class distributions. Model outputs are spatially
  // smooth, so correct pixels next to an error inherit part of the doubt.
  std::vector<float> probs(n * static_cast<size_t>(q), 0.0f);
  std::vector<float> feats(n * static_cast<size_t>(spec.feature_depth));
  std::vector<double> shares(static_cast<size_t>(q));
  // Contagion around error holes of the pixel's own region. The immediate
  // ring lands on the segment boundary, so deeper rings are what inner-region
  // aggregates actually see.
  auto error_within = [&](int r, int c, int radius) {
    const uint8_t own = gt_vals[static_cast<size_t>(r) * w + c];
    for (int dr = -radius; dr <= radius; ++dr) {
      for (int dc = -radius; dc <= radius; ++dc) {
        if (dr == 0 && dc == 0) continue;
        if (std::abs(dr) + std::abs(dc) > radius) continue;
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        const size_t nb = static_cast<size_t>(nr) * w + nc;
        if (is_error[nb] && gt_vals[nb] == own) return true;
      }
    }
    return false;
  };

  for (size_t z = 0; z < n; ++z) {
    const int r = static_cast<int>(z / static_cast<size_t>(w));
    const int c = static_cast<int>(z % static_cast<size_t>(w));
    const int truth = gt_at(r, c);
    const int target = static_cast<int>(target_class[z]);
    const bool border = is_border(r, c);
    const bool error_law = is_error[z] != 0 && spec.informative_confidence;
    for (int y = 0; y < q; ++y) shares[static_cast<size_t>(y)] = 0.0;

    if (error_law) {
      // A near-class race against the true class, with a diffuse flat tail.
      double top = rng.uniform(kTopProb, z, 0.36, 0.50);
      if (q == 2) top = 0.502 + 0.34 * (top - 0.36);
      const double gap = rng.uniform(kRunnerGap, z, 0.04, 0.18);
      const double runner = top * (1.0 - gap);
      shares[static_cast<size_t>(target)] = top;
      if (q == 2) {
        shares[static_cast<size_t>(truth)] = 1.0 - top;
      } else {
        shares[static_cast<size_t>(truth)] = runner;
        double rest_weight = 0.0;
        for (int y = 0; y < q; ++y) {
          if (y == target || y == truth) continue;
          const double u = rng.uniform(
              kShareJitter, z * static_cast<size_t>(q) + static_cast<size_t>(y), 0.6, 1.0);
          shares[static_cast<size_t>(y)] = u;
          rest_weight += u;
        }
        const double rest_mass = 1.0 - top - runner;
        for (int y = 0; y < q; ++y) {
          if (y == target || y == truth) continue;
          shares[static_cast<size_t>(y)] *= rest_mass / rest_weight;
        }
      }
    } else {
      // Confidence tracks the cell difficulty: easy cells peak hard, hard
      // cells sit closer to a near-class race even when correct.
      double d = pixel_difficulty[z];
      if (border) d = std::min(0.95, d + 0.35);
      if (spec.informative_confidence) {
        if (error_within(r, c, 2)) d = std::min(0.95, d + 0.30);
        else if (error_within(r, c, 3)) d = std::min(0.95, d + 0.22);
      }
      // A thin locked-in slice spikes high regardless of difficulty, so even
      // hard regions keep nonzero coverage while error islands never do.
      double top;
      if (!border && rng.uniform(kConfidentSpike, z) < 0.05) {
        top = rng.uniform(kTopProb, z, 0.90, 0.985);
      } else {
        const double lo = 0.37 + 0.07 * (1.0 - d);
        const double hi = 0.97 - 0.30 * d;
        top = rng.uniform(kTopProb, z, lo, hi);
      }
      if (q == 2) top = std::max(top, 0.52);
      shares[static_cast<size_t>(target)] = top;
      int rival_class = -1;
      if (border) {
        if (r > 0 && gt_at(r - 1, c) != truth) rival_class = gt_at(r - 1, c);
        else if (r + 1 < h && gt_at(r + 1, c) != truth) rival_class = gt_at(r + 1, c);
        else if (c > 0 && gt_at(r, c - 1) != truth) rival_class = gt_at(r, c - 1);
        else rival_class = gt_at(r, c + 1);
      } else if (partners.in_pair(truth)) {
        rival_class = partners.partners[static_cast<size_t>(truth)][0];
      } else {
        rival_class = static_cast<int>(rng.below(kPartnerPick, z, static_cast<uint64_t>(q - 1)));
        if (rival_class >= truth) ++rival_class;
      }
      // Most of the non-top mass goes to one rival; the remaining tail is
      // thin, so correct pixels stay less entropic than true errors.
      const double rest_mass = 1.0 - top;
      if (q == 2 || rival_class == target) {
        double rest_weight = 0.0;
        for (int y = 0; y < q; ++y) {
          if (y == target) continue;
          const double u = rng.uniform(
              kShareJitter, z * static_cast<size_t>(q) + static_cast<size_t>(y), 0.2, 1.0);
          shares[static_cast<size_t>(y)] = u;
          rest_weight += u;
        }
        for (int y = 0; y < q; ++y) {
          if (y == target) continue;
          shares[static_cast<size_t>(y)] *= rest_mass / rest_weight;
        }
      } else {
        const double rival_share = rng.uniform(kRunnerGap, z, 0.45, 0.72);
        shares[static_cast<size_t>(rival_class)] = rest_mass * rival_share;
        double rest_weight = 0.0;
        for (int y = 0; y < q; ++y) {
          if (y == target || y == rival_class) continue;
          const double u = rng.uniform(
              kShareJitter, z * static_cast<size_t>(q) + static_cast<size_t>(y), 0.2, 1.0);
          shares[static_cast<size_t>(y)] = u;
          rest_weight += u;
        }
        const double tail_mass = rest_mass * (1.0 - rival_share);
        for (int y = 0; y < q; ++y) {
          if (y == target || y == rival_class) continue;
          shares[static_cast<size_t>(y)] *= tail_mass / rest_weight;
        }
      }
      // Guard the argmax: cap every other class at 92% of the top mass and
      // hand the trimmed mass back to the winner.
      double trimmed = 0.0;
      for (int y = 0; y < q; ++y) {
        if (y == target) continue;
        const double cap = 0.92 * shares[static_cast<size_t>(target)];
        if (shares[static_cast<size_t>(y)] > cap) {
          trimmed += shares[static_cast<size_t>(y)] - cap;
          shares[static_cast<size_t>(y)] = cap;
        }
      }
      shares[static_cast<size_t>(target)] += trimmed;
    }

    if (spec.sharpness != 1.0) {
      double sum = 0.0;
      for (int y = 0; y < q; ++y) {
        shares[static_cast<size_t>(y)] = power(shares[static_cast<size_t>(y)], spec.sharpness);
        sum += shares[static_cast<size_t>(y)];
      }
      for (int y = 0; y < q; ++y) shares[static_cast<size_t>(y)] /= sum;
    }

    for (int y = 0; y < q; ++y)
      probs[z * static_cast<size_t>(q) + static_cast<size_t>(y)] =
          static_cast<float>(shares[static_cast<size_t>(y)]);

    for (int j = 0; j < spec.feature_depth; ++j)
      feats[z * static_cast<size_t>(spec.feature_depth) + static_cast<size_t>(j)] =
          static_cast<float>(2.0 * rng.uniform(kFeatures, z * static_cast<size_t>(spec.feature_depth) + static_cast<size_t>(j)) - 1.0);
  }

  ClassSet classes = ClassSet::generic(q);
  LabelRaster gt(h, w, classes, std::move(gt_vals));
  ProbCube cube = ProbCube::from_raw(h, w, classes, std::move(probs));
  FeatureCube features(h, w, spec.feature_depth, std::move(feats));
  return Scene{std::move(gt), std::move(cube), std::move(features)};
}

std::vector<SweepRow> sweep(const std::vector<SceneSpec>& scenes,
                            const std::vector<PipelineConfig>& configs) {
  if (scenes.empty() || configs.empty())
    raise(ErrorKind::InvalidSpec, "sweep grid must contain at least one scene and one config");
  std::vector<SweepRow> rows;
  rows.reserve(scenes.size() * configs.size());
  for (const auto& spec : scenes) {
    const Scene scene = generate(spec);
    for (const auto& cfg : configs) {
      const AssessmentResult assessment =
          run_assessment(scene.cube, &scene.features, &scene.gt, cfg);
      const EvalOutput eval = evaluate_scene(assessment, scene.gt, cfg);
      rows.push_back(SweepRow{spec, cfg, eval.report});
    }
  }
  return rows;
}

}  // namespace segconf
