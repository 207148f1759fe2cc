#include <doctest.h>

#include "oracles.hpp"
#include "segconf/errors.hpp"
#include "segconf/pixel_stats.hpp"
#include "segconf/segment_stats.hpp"
#include "test_helpers.hpp"

using namespace segconf;
using testing_helpers::random_labels;

namespace {

// One 10-pixel segment (a 2x5 block of class 0) with controllable tops.
ProbCube block_cube(const std::vector<double>& top_probs) {
  std::vector<float> raw;
  for (double top : top_probs) {
    raw.push_back(static_cast<float>(top));
    raw.push_back(static_cast<float>(1.0 - top));
    raw.push_back(0.0f);
  }
  return ProbCube::from_raw(2, 5, ClassSet::generic(3), std::move(raw));
}

}  // namespace

TEST_CASE("coverage counts strictly-above-eta pixels over the whole segment") {
  std::vector<double> tops(10, 0.95);
  tops[7] = 0.6;
  const ProbCube cube = block_cube(tops);
  const SegmentMap segmap = connected_components(predict(cube));
  REQUIRE(segmap.segment_count() == 1);
  const SegmentStatTable table = coverage(cube, segmap, 0.9);
  CHECK(table.row(0).coverage == doctest::Approx(0.9));
  CHECK(table.eta() == 0.9);
}

TEST_CASE("one-hot pixels give full coverage for any eta below one") {
  std::vector<float> raw;
  for (int i = 0; i < 10; ++i) {
    raw.push_back(1.0f);
    raw.push_back(0.0f);
    raw.push_back(0.0f);
  }
  const ProbCube cube = ProbCube::from_raw(2, 5, ClassSet::generic(3), std::move(raw));
  const SegmentMap segmap = connected_components(predict(cube));
  for (double eta : {0.5, 0.9, 0.999}) {
    CHECK(coverage(cube, segmap, eta).row(0).coverage == doctest::Approx(1.0));
  }
}

TEST_CASE("coverage is monotonically non-increasing in eta") {
  const ProbCube cube = testing_helpers::random_cube(5, 16, 16, 4);
  const SegmentMap segmap = connected_components(predict(cube));
  std::vector<double> prev(segmap.segment_count(), 1.0);
  for (double eta : {0.3, 0.5, 0.7, 0.9, 0.97}) {
    const SegmentStatTable t = coverage(cube, segmap, eta);
    for (uint32_t id = 0; id < segmap.segment_count(); ++id) {
      CHECK(t.row(id).coverage <= prev[id] + 1e-12);
      prev[id] = t.row(id).coverage;
    }
  }
  CHECK_THROWS_AS(static_cast<void>(coverage(cube, segmap, 1.0)), Error);
}

TEST_CASE("aggregate of a constant field is that constant") {
  const LabelRaster labels = random_labels(9, 8, 8, 3);
  const SegmentMap segmap = inner_boundary_split(connected_components(labels));
  const StatRaster stat(8, 8, StatKind::margin, 0.37);
  for (Aggregation agg : {Aggregation::mean, Aggregation::median}) {
    for (Region region : {Region::whole, Region::inner}) {
      const SegmentStatTable t = aggregate(stat, segmap, agg, region);
      for (uint32_t id = 0; id < segmap.segment_count(); ++id)
        CHECK(t.row(id).aggregates.at(StatKind::margin) == doctest::Approx(0.37));
    }
  }
}

TEST_CASE("mean and median on a hand-built segment") {
  // 5x5 block of class 0; interior is the 3x3 center.
  const LabelRaster labels(5, 5, ClassSet::generic(2), std::vector<uint8_t>(25, 0));
  const SegmentMap segmap = inner_boundary_split(connected_components(labels));
  StatRaster stat(5, 5, StatKind::confidence, 0.9);
  // three interior values of interest; remaining interior pixels match the mean
  stat.set(1, 1, 0.2);
  stat.set(1, 2, 0.4);
  stat.set(1, 3, 0.9);
  for (int r = 2; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) stat.set(r, c, 0.5);
  const double inner_mean =
      aggregate(stat, segmap, Aggregation::mean, Region::inner).row(0).aggregates.at(
          StatKind::confidence);
  CHECK(inner_mean == doctest::Approx((0.2 + 0.4 + 0.9 + 6 * 0.5) / 9.0));

  SUBCASE("median picks the lower middle for even counts") {
    std::vector<float> raw;
    for (int i = 0; i < 4; ++i) {
      raw.push_back(1.0f);
      raw.push_back(0.0f);
    }
    const LabelRaster line(1, 4, ClassSet::generic(2), {0, 0, 0, 0});
    const SegmentMap s = inner_boundary_split(connected_components(line));
    StatRaster vals(1, 4, StatKind::confidence);
    vals.set(0, 0, 0.9);
    vals.set(0, 1, 0.1);
    vals.set(0, 2, 0.4);
    vals.set(0, 3, 0.6);
    const double med =
        aggregate(vals, s, Aggregation::median, Region::whole).row(0).aggregates.at(
            StatKind::confidence);
    CHECK(med == doctest::Approx(0.4));  // sorted {0.1,0.4,0.6,0.9} -> lower middle
  }
}

TEST_CASE("median of odd count is the middle order statistic") {
  const LabelRaster line(1, 3, ClassSet::generic(2), {0, 0, 0});
  const SegmentMap s = inner_boundary_split(connected_components(line));
  StatRaster vals(1, 3, StatKind::confidence);
  vals.set(0, 0, 0.2);
  vals.set(0, 1, 0.4);
  vals.set(0, 2, 0.9);
  CHECK(aggregate(vals, s, Aggregation::median, Region::whole).row(0).aggregates.at(
            StatKind::confidence) == doctest::Approx(0.4));
  CHECK(aggregate(vals, s, Aggregation::mean, Region::whole).row(0).aggregates.at(
            StatKind::confidence) == doctest::Approx(0.5));
}

TEST_CASE("aggregates match the naive oracle on random scenes") {
  for (uint64_t seed = 60; seed < 72; ++seed) {
    const LabelRaster labels = random_labels(seed, 16, 16, 3);
    const SegmentMap segmap = inner_boundary_split(connected_components(labels));
    const StatRaster stat = testing_helpers::random_stat(seed + 1, 16, 16, StatKind::margin);
    for (Aggregation agg : {Aggregation::mean, Aggregation::median}) {
      for (Region region : {Region::whole, Region::inner}) {
        const SegmentStatTable t = aggregate(stat, segmap, agg, region);
        for (uint32_t id = 0; id < segmap.segment_count(); ++id) {
          CHECK(t.row(id).aggregates.at(StatKind::margin) ==
                doctest::Approx(oracles::naive_aggregate(stat, segmap, id, agg, region))
                    .epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("min <= mean <= max per segment") {
  const LabelRaster labels = random_labels(81, 16, 16, 3);
  const SegmentMap segmap = inner_boundary_split(connected_components(labels));
  const StatRaster stat = testing_helpers::random_stat(82, 16, 16, StatKind::margin);
  const SegmentStatTable t = aggregate(stat, segmap, Aggregation::mean, Region::whole);
  for (uint32_t id = 0; id < segmap.segment_count(); ++id) {
    double lo = 1e9, hi = -1e9;
    for (auto px : segment_pixels(segmap, id, Region::whole)) {
      lo = std::min(lo, stat.at(px.row, px.col));
      hi = std::max(hi, stat.at(px.row, px.col));
    }
    const double mean = t.row(id).aggregates.at(StatKind::margin);
    CHECK(mean >= lo - 1e-12);
    CHECK(mean <= hi + 1e-12);
  }
}

TEST_CASE("empty interior falls back to the whole segment and records it") {
  const LabelRaster line(1, 4, ClassSet::generic(2), {0, 0, 0, 0});
  const SegmentMap s = inner_boundary_split(connected_components(line));
  const StatRaster stat(1, 4, StatKind::confidence, 0.4);
  const SegmentStatTable t = aggregate(stat, s, Aggregation::mean, Region::inner);
  CHECK(t.row(0).region_used == Region::whole);
  CHECK(t.row(0).n_pixels_used == 4);
}

TEST_CASE("boundary-suppressed margins make the inner mean dominate") {
  // one 5x5 segment whose boundary pixels carry strictly lower margin
  const LabelRaster labels(5, 5, ClassSet::generic(2), std::vector<uint8_t>(25, 0));
  const SegmentMap segmap = inner_boundary_split(connected_components(labels));
  StatRaster stat(5, 5, StatKind::margin);
  for (auto px : iter_pixels(labels))
    stat.set(px.row, px.col, segmap.is_inner(px.row, px.col) ? 0.8 : 0.2);
  const double inner_mean = aggregate(stat, segmap, Aggregation::mean, Region::inner)
                                .row(0).aggregates.at(StatKind::margin);
  const double whole_mean = aggregate(stat, segmap, Aggregation::mean, Region::whole)
                                .row(0).aggregates.at(StatKind::margin);
  CHECK(inner_mean > whole_mean);
}

TEST_CASE("misaligned inputs are rejected") {
  const ProbCube cube = testing_helpers::random_cube(7, 4, 4, 3);
  const SegmentMap segmap = connected_components(random_labels(7, 4, 5, 3));
  CHECK_THROWS_WITH_AS(static_cast<void>(coverage(cube, segmap, 0.9)),
                       doctest::Contains("DimensionMismatch"), Error);
}
