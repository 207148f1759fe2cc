#include <doctest.h>

#include <cstdlib>

#include "oracles.hpp"
#include "segconf/components.hpp"
#include "segconf/errors.hpp"
#include "segconf/manifest.hpp"
#include "test_helpers.hpp"

using namespace segconf;
using testing_helpers::random_labels;

namespace {

LabelRaster from_values(int h, int w, int q, std::vector<uint8_t> vals) {
  return LabelRaster(h, w, ClassSet::generic(q), std::move(vals));
}

}  // namespace

TEST_CASE("uniform raster is one segment") {
  const SegmentMap s = connected_components(from_values(3, 3, 2, std::vector<uint8_t>(9, 0)));
  CHECK(s.segment_count() == 1);
  CHECK(s.segment(0).size == 9);
  CHECK(s.segment(0).class_index == 0);
}

TEST_CASE("checkerboard under both connectivities") {
  const std::vector<uint8_t> board = {0, 1, 1, 0};
  const SegmentMap four = connected_components(from_values(2, 2, 2, board), Connectivity::four);
  CHECK(four.segment_count() == 4);
  const SegmentMap eight = connected_components(from_values(2, 2, 2, board), Connectivity::eight);
  CHECK(eight.segment_count() == 2);
  CHECK(eight.segment(0).size == 2);
  CHECK(eight.segment(1).size == 2);
}

TEST_CASE("matches flood-fill oracle on random rasters") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const LabelRaster labels = random_labels(seed, 16, 16, 4, seed % 3 ? 0.0 : 0.15);
    for (Connectivity conn : {Connectivity::four, Connectivity::eight}) {
      const SegmentMap s = connected_components(labels, conn);
      CHECK(s.ids() == oracles::flood_fill_components(labels, conn));
    }
  }
}

TEST_CASE("exhaustive small rasters against the oracle") {
  for (uint64_t seed = 0; seed < 150; ++seed) {
    const int h = 1 + static_cast<int>(seed % 8);
    const int w = 1 + static_cast<int>((seed / 8) % 8);
    const LabelRaster labels = random_labels(seed * 7 + 1, h, w, 2 + static_cast<int>(seed % 2));
    const SegmentMap s = connected_components(labels);
    CHECK(s.ids() == oracles::flood_fill_components(labels, Connectivity::four));
  }
}

TEST_CASE("partition property with nodata") {
  const LabelRaster labels = random_labels(5, 12, 9, 3, 0.2);
  const SegmentMap s = connected_components(labels);
  int64_t covered = 0;
  for (const auto& rec : s.segments()) covered += rec.size;
  int64_t nodata = 0;
  for (uint8_t v : labels.values())
    if (!labels.classes().is_class(v)) ++nodata;
  CHECK(covered + nodata == 12 * 9);
  for (auto px : iter_pixels(labels)) {
    const bool excluded = s.id_at(px.row, px.col) == kNoSegmentId;
    CHECK(excluded == !labels.is_class_pixel(px.row, px.col));
  }
}

TEST_CASE("inner/boundary split on canonical shapes") {
  SUBCASE("3x3 block: center is the only inner pixel") {
    const SegmentMap s =
        inner_boundary_split(connected_components(from_values(3, 3, 2, std::vector<uint8_t>(9, 0))));
    CHECK(s.segment(0).inner_size == 1);
    CHECK(s.is_inner(1, 1));
  }
  SUBCASE("one-pixel-wide line has no inner pixels") {
    const SegmentMap s =
        inner_boundary_split(connected_components(from_values(1, 5, 2, std::vector<uint8_t>(5, 0))));
    CHECK(s.segment(0).inner_size == 0);
  }
  SUBCASE("5x5 block: 3x3 interior") {
    const SegmentMap s =
        inner_boundary_split(connected_components(from_values(5, 5, 2, std::vector<uint8_t>(25, 0))));
    CHECK(s.segment(0).inner_size == 9);
  }
  SUBCASE("ignore border policy keeps image-border pixels inner") {
    const SegmentMap s = inner_boundary_split(
        connected_components(from_values(3, 3, 2, std::vector<uint8_t>(9, 0))),
        BorderPolicy::ignore);
    CHECK(s.segment(0).inner_size == 9);
  }
}

TEST_CASE("segment_pixels regions") {
  const SegmentMap s =
      inner_boundary_split(connected_components(from_values(3, 3, 2, std::vector<uint8_t>(9, 0))));
  CHECK(segment_pixels(s, 0, Region::whole).size() == 9);
  CHECK(segment_pixels(s, 0, Region::inner) == std::vector<Pixel>{{1, 1}});
  CHECK(segment_pixels(s, 0, Region::boundary).size() == 8);
  CHECK_THROWS_WITH_AS(static_cast<void>(segment_pixels(s, 5, Region::whole)),
                       doctest::Contains("UnknownSegment"), Error);

  SUBCASE("inner of a singleton is empty") {
    const SegmentMap single =
        inner_boundary_split(connected_components(from_values(1, 1, 2, {0})));
    CHECK(segment_pixels(single, 0, Region::inner).empty());
  }
}

TEST_CASE("whole equals disjoint union of inner and boundary") {
  for (uint64_t seed = 100; seed < 112; ++seed) {
    const SegmentMap s =
        inner_boundary_split(connected_components(random_labels(seed, 16, 16, 3)));
    for (const auto& rec : s.segments()) {
      auto whole = segment_pixels(s, rec.id, Region::whole);
      auto inner = segment_pixels(s, rec.id, Region::inner);
      auto boundary = segment_pixels(s, rec.id, Region::boundary);
      CHECK(inner.size() + boundary.size() == whole.size());
      std::vector<Pixel> merged;
      std::merge(inner.begin(), inner.end(), boundary.begin(), boundary.end(),
                 std::back_inserter(merged), [](const Pixel& a, const Pixel& b) {
                   return a.row != b.row ? a.row < b.row : a.col < b.col;
                 });
      CHECK(merged == whole);
    }
  }
}

TEST_CASE("ids are identical for any worker count") {
  const LabelRaster labels = random_labels(777, 64, 48, 4, 0.05);
  setenv("SEGCONF_THREADS", "1", 1);
  const SegmentMap single = connected_components(labels);
  setenv("SEGCONF_THREADS", "8", 1);
  const SegmentMap pooled = connected_components(labels);
  unsetenv("SEGCONF_THREADS");
  CHECK(single.ids() == pooled.ids());
  CHECK(single.segment_count() == pooled.segment_count());
}

TEST_CASE("empty raster yields zero segments") {
  const SegmentMap s = connected_components(from_values(0, 0, 2, {}));
  CHECK(s.segment_count() == 0);
}

TEST_CASE("segment id raster round trips through the manifest format") {
  testing_helpers::TempDir dir("segment-ids");
  const SegmentMap s = connected_components(random_labels(55, 9, 7, 3, 0.1));
  save_segment_ids(s.ids(), 9, 7, dir.path / "ids.json");
  int h = 0, w = 0;
  const auto loaded = load_segment_ids(dir.path / "ids.json", &h, &w);
  CHECK(h == 9);
  CHECK(w == 7);
  CHECK(loaded == s.ids());
}

TEST_CASE("bounding boxes contain their segments") {
  const SegmentMap s = connected_components(random_labels(31, 10, 14, 3));
  for (auto px : iter_pixels(random_labels(31, 10, 14, 3))) {
    const uint32_t id = s.id_at(px.row, px.col);
    if (id == kNoSegmentId) continue;
    const SegmentRecord& rec = s.segment(id);
    CHECK(px.row >= rec.row0);
    CHECK(px.row <= rec.row1);
    CHECK(px.col >= rec.col0);
    CHECK(px.col <= rec.col1);
  }
}
