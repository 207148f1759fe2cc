#pragma once

#include <cstdint>
#include <vector>

#include "segconf/class_set.hpp"

namespace segconf {

struct Pixel {
  int row = 0;
  int col = 0;
  bool operator==(const Pixel&) const = default;
};

// Row-major traversal over any raster shape. Deterministic by construction;
// the same order is produced regardless of worker count.
class PixelRange {
 public:
  PixelRange(int height, int width) : height_(height), width_(width) {}

  class iterator {
   public:
    iterator(int64_t index, int width) : index_(index), width_(width) {}
    Pixel operator*() const {
      const int w = width_ == 0 ? 1 : width_;
      return Pixel{static_cast<int>(index_ / w), static_cast<int>(index_ % w)};
    }
    iterator& operator++() { ++index_; return *this; }
    bool operator!=(const iterator& other) const { return index_ != other.index_; }

   private:
    int64_t index_;
    int width_;
  };

  iterator begin() const { return iterator(0, width_); }
  iterator end() const { return iterator(static_cast<int64_t>(height_) * width_, width_); }
  int64_t size() const { return static_cast<int64_t>(height_) * width_; }

 private:
  int height_;
  int width_;
};

template <typename Raster>
PixelRange iter_pixels(const Raster& r) {
  return PixelRange(r.height(), r.width());
}

// Per-pixel class probabilities f_z(y). Payload stays in the on-disk f32
// layout so a load/save round trip is byte-identical; accumulation and the
// per-pixel renormalization factor are double precision.
class ProbCube {
 public:
  // Validates and renormalizes. Row sums may deviate from 1 by at most
  // `kSumTolerance`; larger deviations are rejected.
  static ProbCube from_raw(int height, int width, ClassSet classes, std::vector<float> raw);

  int height() const { return height_; }
  int width() const { return width_; }
  const ClassSet& classes() const { return classes_; }
  int class_count() const { return classes_.count(); }

  double prob(int row, int col, int cls) const {
    const size_t z = static_cast<size_t>(row) * width_ + col;
    return static_cast<double>(raw_[z * classes_.count() + cls]) * inv_sum_[z];
  }

  const std::vector<float>& raw() const { return raw_; }

  static constexpr double kSumTolerance = 1e-4;

 private:
  ProbCube(int h, int w, ClassSet classes, std::vector<float> raw, std::vector<double> inv_sum)
      : height_(h), width_(w), classes_(std::move(classes)),
        raw_(std::move(raw)), inv_sum_(std::move(inv_sum)) {}

  int height_;
  int width_;
  ClassSet classes_;
  std::vector<float> raw_;
  std::vector<double> inv_sum_;
};

// H x W class-index map: ground truth, prediction, or refined prediction.
// Values are class indices or the declared sentinels, stored as the on-disk u8.
class LabelRaster {
 public:
  LabelRaster(int height, int width, ClassSet classes, std::vector<uint8_t> values);

  int height() const { return height_; }
  int width() const { return width_; }
  const ClassSet& classes() const { return classes_; }

  int at(int row, int col) const {
    return values_[static_cast<size_t>(row) * width_ + col];
  }
  bool is_nodata(int row, int col) const { return at(row, col) == classes_.nodata_index(); }
  bool is_abstain(int row, int col) const { return at(row, col) == classes_.abstain_index(); }
  bool is_class_pixel(int row, int col) const { return classes_.is_class(at(row, col)); }

  const std::vector<uint8_t>& values() const { return values_; }

 private:
  int height_;
  int width_;
  ClassSet classes_;
  std::vector<uint8_t> values_;
};

// Optional penultimate-layer features, one d-vector per pixel.
class FeatureCube {
 public:
  FeatureCube(int height, int width, int depth, std::vector<float> raw);

  int height() const { return height_; }
  int width() const { return width_; }
  int depth() const { return depth_; }

  double at(int row, int col, int j) const {
    return static_cast<double>(raw_[(static_cast<size_t>(row) * width_ + col) * depth_ + j]);
  }
  // Euclidean norm of the pixel's feature vector, accumulated in double.
  double norm2(int row, int col) const;

  const std::vector<float>& raw() const { return raw_; }

 private:
  int height_;
  int width_;
  int depth_;
  std::vector<float> raw_;
};

enum class StatKind { margin, neg_entropy, gradient, coverage, confidence, other };

const char* stat_kind_name(StatKind kind);
StatKind stat_kind_from_name(const std::string& name);

// H x W scalar field for a per-pixel statistic (D, E, G, broadcast C, T).
// Invalid pixels (e.g. nodata under the ground truth) carry no value.
class StatRaster {
 public:
  StatRaster(int height, int width, StatKind kind, double fill = 0.0, bool valid = true);

  int height() const { return height_; }
  int width() const { return width_; }
  StatKind kind() const { return kind_; }

  double at(int row, int col) const { return values_[idx(row, col)]; }
  bool valid(int row, int col) const { return valid_[idx(row, col)] != 0; }

  void set(int row, int col, double v) { values_[idx(row, col)] = v; valid_[idx(row, col)] = 1; }
  void invalidate(int row, int col) { valid_[idx(row, col)] = 0; values_[idx(row, col)] = 0.0; }

  // Set when gradient_stat ran without a feature cube and returned zeros.
  bool omitted() const { return omitted_; }
  void mark_omitted() { omitted_ = true; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<uint8_t>& valid_mask() const { return valid_; }
  int64_t valid_count() const;

 private:
  size_t idx(int row, int col) const { return static_cast<size_t>(row) * width_ + col; }

  int height_;
  int width_;
  StatKind kind_;
  bool omitted_ = false;
  std::vector<double> values_;
  std::vector<uint8_t> valid_;
};

// Succeeds iff height, width, and class-set identity match.
void validate_alignment(const ProbCube& cube, const LabelRaster& labels);
void validate_alignment(const LabelRaster& a, const LabelRaster& b);
void require_same_shape(int h1, int w1, int h2, int w2, const char* what);

// Copy of `labels` with nodata written wherever `reference` is nodata.
// This is the single exclusion rule: pixels nodata in the ground truth are
// removed from segments, statistics, and metrics downstream.
LabelRaster mask_nodata(const LabelRaster& labels, const LabelRaster& reference);

}  // namespace segconf
