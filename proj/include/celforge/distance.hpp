#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "celforge/image.hpp"
#include "celforge/parallel.hpp"
#include "celforge/sketch.hpp"

namespace celforge {

// Per-pixel Euclidean distance to the nearest line pixel; +inf when the
// sketch has no line pixels at all.
struct DistanceField {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  DistanceField() = default;
  DistanceField(int h, int w, float fill = 0.0f)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  float& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Sentinel for "no line pixel anywhere" in the squared transform.
inline constexpr std::int64_t kEdtInf = std::numeric_limits<std::int64_t>::max();

namespace detail {

// Lower envelope of parabolas y -> (y - q)^2 + f[q] over the finite f[q];
// exact for integer f (envelope crossings of integer parabolas are never
// close enough to an integer for double rounding to misassign a pixel).
inline void edt_1d(const std::int64_t* f, std::int64_t* out, int n,
                   int* v_buf, double* z_buf) {
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kEdtInf) continue;
    const double fq = static_cast<double>(f[q]);
    double s;
    for (;;) {
      if (k < 0) {
        s = -std::numeric_limits<double>::infinity();
        break;
      }
      const int p = v_buf[k];
      s = (fq + static_cast<double>(q) * q -
           (static_cast<double>(f[p]) + static_cast<double>(p) * p)) /
          (2.0 * q - 2.0 * p);
      if (s > z_buf[k]) break;
      --k;
    }
    ++k;
    v_buf[k] = q;
    z_buf[k] = s;
  }
  if (k < 0) {
    for (int y = 0; y < n; ++y) out[y] = kEdtInf;
    return;
  }
  int j = 0;
  for (int y = 0; y < n; ++y) {
    while (j < k && z_buf[j + 1] < y) ++j;
    const std::int64_t d = y - v_buf[j];
    out[y] = d * d + f[v_buf[j]];
  }
}

}  // namespace detail

// Exact squared Euclidean distance transform, row-major; kEdtInf where the
// sketch is empty.  Two separable passes: per-row nearest line pixel, then
// per-column lower envelope over the squared row distances.
inline std::vector<std::int64_t> edt_squared(const BinarySketch& sketch,
                                             const Parallel& par = {}) {
  const int h = sketch.height, w = sketch.width;
  std::vector<std::int64_t> rowsq(static_cast<std::size_t>(h) * w);
  par.for_range(h, [&](std::int64_t y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    const std::int64_t far = static_cast<std::int64_t>(w) + 1;
    std::int64_t d = far;
    for (int x = 0; x < w; ++x) {
      d = sketch.bits[row + x] ? 0 : d + 1;
      rowsq[row + x] = d;
    }
    d = far;
    for (int x = w - 1; x >= 0; --x) {
      d = sketch.bits[row + x] ? 0 : d + 1;
      if (d < rowsq[row + x]) rowsq[row + x] = d;
    }
    for (int x = 0; x < w; ++x) {
      std::int64_t& v = rowsq[row + x];
      v = v > static_cast<std::int64_t>(w) ? kEdtInf : v * v;
    }
  });

  std::vector<std::int64_t> out(static_cast<std::size_t>(h) * w);
  par.for_range(w, [&](std::int64_t x) {
    std::vector<std::int64_t> f(h), col(h);
    std::vector<int> v_buf(h);
    std::vector<double> z_buf(h);
    for (int y = 0; y < h; ++y) f[y] = rowsq[static_cast<std::size_t>(y) * w + x];
    detail::edt_1d(f.data(), col.data(), h, v_buf.data(), z_buf.data());
    for (int y = 0; y < h; ++y) out[static_cast<std::size_t>(y) * w + x] = col[y];
  });
  return out;
}

inline DistanceField edt(const BinarySketch& sketch, const Parallel& par = {}) {
  const auto sq = edt_squared(sketch, par);
  DistanceField field(sketch.height, sketch.width);
  for (std::size_t i = 0; i < sq.size(); ++i)
    field.values[i] = sq[i] == kEdtInf ? std::numeric_limits<float>::infinity()
                                       : static_cast<float>(std::sqrt(static_cast<double>(sq[i])));
  return field;
}

// NEDT = 1 - exp(-EDT / (tau * height)); [0,1], 0 on line pixels, all ones
// for a blank frame (infinite distance).
inline DistanceField nedt(const ImageF32& img, double tau, const DogParams& dog = {},
                          const Parallel& par = {}) {
  if (!(tau > 0.0)) throw InvalidParameter("nedt: tau must be > 0");
  const BinarySketch sketch = extract_sketch(img, dog, par);
  DistanceField field = edt(sketch, par);
  const double scale = tau * img.height;
  for (float& v : field.values) {
    const double d = v;
    v = std::isinf(d) ? 1.0f : static_cast<float>(1.0 - std::exp(-d / scale));
  }
  return field;
}

}  // namespace celforge
