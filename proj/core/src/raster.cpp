#include "segconf/raster.hpp"

#include <cmath>
#include <string>

#include "segconf/errors.hpp"

namespace segconf {

ProbCube ProbCube::from_raw(int height, int width, ClassSet classes, std::vector<float> raw) {
  if (height < 0 || width < 0) raise(ErrorKind::InvalidSpec, "negative raster dimensions");
  const int q = classes.count();
  const size_t expected = static_cast<size_t>(height) * width * q;
  if (raw.size() != expected)
    raise(ErrorKind::ShapeMismatch,
          "probability payload holds " + std::to_string(raw.size()) + " values, expected " +
              std::to_string(expected));

  const size_t n_pixels = static_cast<size_t>(height) * width;
  std::vector<double> inv_sum(n_pixels, 1.0);
  for (size_t z = 0; z < n_pixels; ++z) {
    double sum = 0.0;
    for (int y = 0; y < q; ++y) {
      const double v = raw[z * q + y];
      if (!(v >= 0.0)) {  // catches negatives and NaN
        if (std::isnan(v))
          raise(ErrorKind::NotADistribution, "NaN probability at pixel " + std::to_string(z));
        raise(ErrorKind::NegativeProbability,
              "negative probability at pixel " + std::to_string(z));
      }
      sum += v;
    }
    if (!std::isfinite(sum) || std::abs(sum - 1.0) > kSumTolerance)
      raise(ErrorKind::NotADistribution,
            "pixel " + std::to_string(z) + " probabilities sum to " + std::to_string(sum));
    inv_sum[z] = sum > 0.0 ? 1.0 / sum : 1.0;
  }
  return ProbCube(height, width, std::move(classes), std::move(raw), std::move(inv_sum));
}

LabelRaster::LabelRaster(int height, int width, ClassSet classes, std::vector<uint8_t> values)
    : height_(height), width_(width), classes_(std::move(classes)), values_(std::move(values)) {
  if (height_ < 0 || width_ < 0) raise(ErrorKind::InvalidSpec, "negative raster dimensions");
  const size_t expected = static_cast<size_t>(height_) * width_;
  if (values_.size() != expected)
    raise(ErrorKind::ShapeMismatch,
          "label payload holds " + std::to_string(values_.size()) + " values, expected " +
              std::to_string(expected));
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!classes_.is_valid_value(values_[i]))
      raise(ErrorKind::InvalidClassIndex,
            "value " + std::to_string(values_[i]) + " at pixel " + std::to_string(i) +
                " is neither a class index nor a declared sentinel");
  }
}

FeatureCube::FeatureCube(int height, int width, int depth, std::vector<float> raw)
    : height_(height), width_(width), depth_(depth), raw_(std::move(raw)) {
  if (height_ < 0 || width_ < 0 || depth_ <= 0)
    raise(ErrorKind::InvalidSpec, "invalid feature cube dimensions");
  const size_t expected = static_cast<size_t>(height_) * width_ * depth_;
  if (raw_.size() != expected)
    raise(ErrorKind::ShapeMismatch,
          "feature payload holds " + std::to_string(raw_.size()) + " values, expected " +
              std::to_string(expected));
  for (size_t i = 0; i < raw_.size(); ++i) {
    if (!std::isfinite(raw_[i]))
      raise(ErrorKind::NonFiniteValue, "non-finite feature value at index " + std::to_string(i));
  }
}

double FeatureCube::norm2(int row, int col) const {
  const size_t base = (static_cast<size_t>(row) * width_ + col) * depth_;
  double acc = 0.0;
  for (int j = 0; j < depth_; ++j) {
    const double v = raw_[base + j];
    acc += v * v;
  }
  return std::sqrt(acc);
}

const char* stat_kind_name(StatKind kind) {
  switch (kind) {
    case StatKind::margin: return "margin";
    case StatKind::neg_entropy: return "neg_entropy";
    case StatKind::gradient: return "gradient";
    case StatKind::coverage: return "coverage";
    case StatKind::confidence: return "confidence";
    case StatKind::other: return "other";
  }
  return "other";
}

StatKind stat_kind_from_name(const std::string& name) {
  if (name == "margin") return StatKind::margin;
  if (name == "neg_entropy") return StatKind::neg_entropy;
  if (name == "gradient") return StatKind::gradient;
  if (name == "coverage") return StatKind::coverage;
  if (name == "confidence") return StatKind::confidence;
  if (name == "other") return StatKind::other;
  raise(ErrorKind::BadManifest, "unknown stat kind '" + name + "'");
}

StatRaster::StatRaster(int height, int width, StatKind kind, double fill, bool valid)
    : height_(height), width_(width), kind_(kind),
      values_(static_cast<size_t>(height) * width, fill),
      valid_(static_cast<size_t>(height) * width, valid ? 1 : 0) {
  if (height_ < 0 || width_ < 0) raise(ErrorKind::InvalidSpec, "negative raster dimensions");
}

int64_t StatRaster::valid_count() const {
  int64_t n = 0;
  for (uint8_t v : valid_) n += v;
  return n;
}

void require_same_shape(int h1, int w1, int h2, int w2, const char* what) {
  if (h1 != h2 || w1 != w2)
    raise(ErrorKind::DimensionMismatch,
          std::string(what) + ": " + std::to_string(h1) + "x" + std::to_string(w1) + " vs " +
              std::to_string(h2) + "x" + std::to_string(w2));
}

void validate_alignment(const ProbCube& cube, const LabelRaster& labels) {
  require_same_shape(cube.height(), cube.width(), labels.height(), labels.width(),
                     "cube/labels shape");
  if (!(cube.classes() == labels.classes()))
    raise(ErrorKind::ClassSetMismatch, "cube and labels disagree on the class set");
}

void validate_alignment(const LabelRaster& a, const LabelRaster& b) {
  require_same_shape(a.height(), a.width(), b.height(), b.width(), "label raster shape");
  if (!(a.classes() == b.classes()))
    raise(ErrorKind::ClassSetMismatch, "label rasters disagree on the class set");
}

LabelRaster mask_nodata(const LabelRaster& labels, const LabelRaster& reference) {
  validate_alignment(labels, reference);
  std::vector<uint8_t> values = labels.values();
  const auto& ref = reference.values();
  const uint8_t nodata = static_cast<uint8_t>(labels.classes().nodata_index());
  for (size_t i = 0; i < values.size(); ++i) {
    if (ref[i] == static_cast<uint8_t>(reference.classes().nodata_index())) values[i] = nodata;
  }
  return LabelRaster(labels.height(), labels.width(), labels.classes(), std::move(values));
}

}  // namespace segconf
