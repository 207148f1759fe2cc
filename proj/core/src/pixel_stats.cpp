#include "segconf/pixel_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segconf/errors.hpp"
#include "segconf/parallel.hpp"

namespace segconf {

namespace {

struct Top2 {
  int arg = 0;
  double first = 0.0;
  double second = 0.0;
};

Top2 top2(const ProbCube& cube, int r, int c) {
  Top2 t;
  const int q = cube.class_count();
  t.first = cube.prob(r, c, 0);
  t.second = -1.0;
  for (int y = 1; y < q; ++y) {
    const double p = cube.prob(r, c, y);
    if (p > t.first) {
      t.second = t.first;
      t.first = p;
      t.arg = y;
    } else if (p > t.second) {
      t.second = p;
    }
  }
  if (t.second < 0.0) t.second = 0.0;  // q == 1 cannot happen (q >= 2)
  return t;
}

}  // namespace

LabelRaster predict(const ProbCube& cube) {
  const int h = cube.height();
  const int w = cube.width();
  std::vector<uint8_t> out(static_cast<size_t>(h) * w, 0);
  parallel_chunks(static_cast<int64_t>(h) * w, [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = static_cast<int>(i / w);
      const int c = static_cast<int>(i % w);
      out[static_cast<size_t>(i)] = static_cast<uint8_t>(top2(cube, r, c).arg);
    }
  });
  return LabelRaster(h, w, cube.classes(), std::move(out));
}

StatRaster margin(const ProbCube& cube) {
  StatRaster out(cube.height(), cube.width(), StatKind::margin);
  const int w = cube.width();
  parallel_chunks(static_cast<int64_t>(cube.height()) * w, [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const Top2 t = top2(cube, static_cast<int>(i / w), static_cast<int>(i % w));
      out.set(static_cast<int>(i / w), static_cast<int>(i % w), t.first - t.second);
    }
  });
  return out;
}

StatRaster neg_entropy(const ProbCube& cube) {
  StatRaster out(cube.height(), cube.width(), StatKind::neg_entropy);
  const int w = cube.width();
  const int q = cube.class_count();
  parallel_chunks(static_cast<int64_t>(cube.height()) * w, [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = static_cast<int>(i / w);
      const int c = static_cast<int>(i % w);
      double e = 0.0;
      for (int y = 0; y < q; ++y) {
        const double p = cube.prob(r, c, y);
        if (p > 0.0) e += p * std::log(p);
      }
      out.set(r, c, e);
    }
  });
  return out;
}

StatRaster gradient_stat(const ProbCube& cube, const FeatureCube* features) {
  StatRaster out(cube.height(), cube.width(), StatKind::gradient);
  if (features == nullptr) {
    out.mark_omitted();
    return out;
  }
  require_same_shape(cube.height(), cube.width(), features->height(), features->width(),
                     "cube/features shape");
  const int w = cube.width();
  parallel_chunks(static_cast<int64_t>(cube.height()) * w, [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = static_cast<int>(i / w);
      const int c = static_cast<int>(i % w);
      // The probability-weighted sum over non-predicted classes collapses to
      // 1 - p_top; the last-layer Jacobian contributes the feature norm.
      const Top2 t = top2(cube, r, c);
      out.set(r, c, features->norm2(r, c) * (1.0 - t.first));
    }
  });
  return out;
}

StatRaster max_prob(const ProbCube& cube) {
  StatRaster out(cube.height(), cube.width(), StatKind::other);
  const int w = cube.width();
  parallel_chunks(static_cast<int64_t>(cube.height()) * w, [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = static_cast<int>(i / w);
      const int c = static_cast<int>(i % w);
      out.set(r, c, top2(cube, r, c).first);
    }
  });
  return out;
}

ProbCube prob_cube_from_logits(int height, int width, ClassSet classes,
                               const std::vector<float>& logits, double inv_temperature) {
  if (!(inv_temperature > 0.0))
    raise(ErrorKind::InvalidSpec, "inverse temperature must be positive");
  const int q = classes.count();
  const size_t expected = static_cast<size_t>(height) * width * q;
  if (logits.size() != expected)
    raise(ErrorKind::ShapeMismatch, "logit payload does not match the declared shape");
  std::vector<float> probs(expected);
  const size_t n_pixels = static_cast<size_t>(height) * width;
  for (size_t z = 0; z < n_pixels; ++z) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int y = 0; y < q; ++y) mx = std::max(mx, static_cast<double>(logits[z * q + y]));
    double sum = 0.0;
    std::vector<double> e(static_cast<size_t>(q));
    for (int y = 0; y < q; ++y) {
      e[static_cast<size_t>(y)] = std::exp(inv_temperature * (logits[z * q + y] - mx));
      sum += e[static_cast<size_t>(y)];
    }
    for (int y = 0; y < q; ++y)
      probs[z * q + y] = static_cast<float>(e[static_cast<size_t>(y)] / sum);
  }
  return ProbCube::from_raw(height, width, std::move(classes), std::move(probs));
}

}  // namespace segconf
