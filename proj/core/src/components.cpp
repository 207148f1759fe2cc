#include "segconf/components.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "segconf/errors.hpp"
#include "segconf/parallel.hpp"

namespace segconf {

SegmentMap::SegmentMap(int height, int width, std::vector<uint32_t> ids,
                       std::vector<SegmentRecord> segments, Connectivity connectivity)
    : height_(height), width_(width), connectivity_(connectivity),
      ids_(std::move(ids)), segments_(std::move(segments)) {}

const SegmentRecord& SegmentMap::segment(uint32_t id) const {
  if (id >= segments_.size())
    raise(ErrorKind::UnknownSegment, "segment id " + std::to_string(id) + " out of range");
  return segments_[id];
}

namespace {

struct UnionFind {
  std::vector<uint32_t>& parent;

  uint32_t find(uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

}  // namespace

SegmentMap connected_components(const LabelRaster& labels, Connectivity connectivity) {
  const int h = labels.height();
  const int w = labels.width();
  const size_t n = static_cast<size_t>(h) * w;
  std::vector<uint32_t> ids(n, kNoSegmentId);
  if (n == 0) return SegmentMap(h, w, std::move(ids), {}, connectivity);

  const auto& vals = labels.values();
  const ClassSet& classes = labels.classes();
  auto foreground = [&](size_t i) { return classes.is_class(vals[i]); };

  // Provisional labels are pixel indices; the union-find closure is the same
  // equivalence relation no matter where the strips split, and the final
  // sequential relabel assigns dense ids in row-major first-encounter order,
  // so the output does not depend on the worker count.
  std::vector<uint32_t> parent(n);
  UnionFind uf{parent};
  const bool eight = connectivity == Connectivity::eight;

  const int strips = std::min(worker_count(), h);
  std::vector<int> strip_start(static_cast<size_t>(strips) + 1);
  for (int s = 0; s <= strips; ++s) strip_start[static_cast<size_t>(s)] = static_cast<int>(static_cast<int64_t>(h) * s / strips);

  auto label_strip = [&](int r0, int r1) {
    UnionFind local{parent};
    for (int r = r0; r < r1; ++r) {
      for (int c = 0; c < w; ++c) {
        const size_t i = static_cast<size_t>(r) * w + c;
        if (!foreground(i)) continue;
        const uint8_t v = vals[i];
        uint32_t adopted = kNoSegmentId;
        auto consider = [&](size_t nb) {
          if (vals[nb] != v || ids[nb] == kNoSegmentId) return;
          if (adopted == kNoSegmentId) adopted = ids[nb];
          else local.unite(adopted, ids[nb]);
        };
        if (c > 0) consider(i - 1);
        if (r > r0) {
          consider(i - w);
          if (eight) {
            if (c > 0) consider(i - w - 1);
            if (c + 1 < w) consider(i - w + 1);
          }
        }
        if (adopted == kNoSegmentId) {
          parent[i] = static_cast<uint32_t>(i);
          ids[i] = static_cast<uint32_t>(i);
        } else {
          ids[i] = adopted;
        }
      }
    }
  };

  if (strips <= 1) {
    label_strip(0, h);
  } else {
    std::vector<std::pair<int64_t, int64_t>> strip_jobs;
    for (int s = 0; s < strips; ++s) strip_jobs.emplace_back(strip_start[s], strip_start[s + 1]);
    std::atomic<size_t> next{0};
    auto run = [&]() {
      while (true) {
        const size_t j = next.fetch_add(1);
        if (j >= strip_jobs.size()) break;
        label_strip(static_cast<int>(strip_jobs[j].first), static_cast<int>(strip_jobs[j].second));
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < strips; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();

    // Deterministic merge of strip-boundary equivalences.
    for (int s = 1; s < strips; ++s) {
      const int r = strip_start[s];
      if (r <= 0 || r >= h) continue;
      for (int c = 0; c < w; ++c) {
        const size_t i = static_cast<size_t>(r) * w + c;
        if (!foreground(i)) continue;
        const uint8_t v = vals[i];
        auto merge_with = [&](size_t nb) {
          if (vals[nb] == v && ids[nb] != kNoSegmentId) uf.unite(ids[i], ids[nb]);
        };
        merge_with(i - w);
        if (eight) {
          if (c > 0) merge_with(i - w - 1);
          if (c + 1 < w) merge_with(i - w + 1);
        }
      }
    }
  }

  // Relabel to dense ids in row-major first-encounter order and build records.
  std::vector<uint32_t> dense_of(n, kNoSegmentId);
  std::vector<SegmentRecord> segments;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const size_t i = static_cast<size_t>(r) * w + c;
      if (ids[i] == kNoSegmentId) continue;
      const uint32_t root = uf.find(ids[i]);
      uint32_t dense = dense_of[root];
      if (dense == kNoSegmentId) {
        dense = static_cast<uint32_t>(segments.size());
        dense_of[root] = dense;
        SegmentRecord rec;
        rec.id = dense;
        rec.class_index = vals[i];
        rec.row0 = rec.row1 = r;
        rec.col0 = rec.col1 = c;
        segments.push_back(rec);
      }
      SegmentRecord& rec = segments[dense];
      rec.size += 1;
      rec.row0 = std::min(rec.row0, r);
      rec.row1 = std::max(rec.row1, r);
      rec.col0 = std::min(rec.col0, c);
      rec.col1 = std::max(rec.col1, c);
      ids[i] = dense;
    }
  }
  return SegmentMap(h, w, std::move(ids), std::move(segments), connectivity);
}

SegmentMap inner_boundary_split(SegmentMap segmap, BorderPolicy policy) {
  const int h = segmap.height();
  const int w = segmap.width();
  const size_t n = static_cast<size_t>(h) * w;
  const auto& ids = segmap.ids();
  std::vector<uint8_t> inner(n, 0);

  parallel_chunks(static_cast<int64_t>(n), [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const uint32_t id = ids[static_cast<size_t>(i)];
      if (id == kNoSegmentId) continue;
      const int r = static_cast<int>(i / w);
      const int c = static_cast<int>(i % w);
      bool is_inner = true;
      constexpr int dr[4] = {-1, 1, 0, 0};
      constexpr int dc[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4 && is_inner; ++k) {
        const int nr = r + dr[k];
        const int nc = c + dc[k];
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) {
          if (policy == BorderPolicy::outside) is_inner = false;
          continue;
        }
        if (ids[static_cast<size_t>(nr) * w + nc] != id) is_inner = false;
      }
      inner[static_cast<size_t>(i)] = is_inner ? 1 : 0;
    }
  });

  for (auto& rec : segmap.segments_) rec.inner_size = 0;
  for (size_t i = 0; i < n; ++i) {
    if (inner[i]) segmap.segments_[ids[i]].inner_size += 1;
  }
  segmap.inner_ = std::move(inner);
  return segmap;
}

std::vector<Pixel> segment_pixels(const SegmentMap& segmap, uint32_t id, Region region) {
  const SegmentRecord& rec = segmap.segment(id);  // raises UnknownSegment
  if (region != Region::whole && !segmap.split_done())
    raise(ErrorKind::InvalidSpec, "inner_boundary_split has not run on this segment map");
  std::vector<Pixel> out;
  out.reserve(region == Region::whole ? rec.size
              : region == Region::inner ? rec.inner_size
                                        : rec.size - rec.inner_size);
  for (int r = rec.row0; r <= rec.row1; ++r) {
    for (int c = rec.col0; c <= rec.col1; ++c) {
      if (segmap.id_at(r, c) != id) continue;
      if (region == Region::inner && !segmap.is_inner(r, c)) continue;
      if (region == Region::boundary && segmap.is_inner(r, c)) continue;
      out.push_back(Pixel{r, c});
    }
  }
  return out;
}

}  // namespace segconf
