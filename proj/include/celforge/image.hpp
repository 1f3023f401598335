#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "celforge/errors.hpp"

namespace celforge {

// Planar float image: channel-major planes, each plane row-major.
// data[(c*height + y)*width + x]
struct ImageF32 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  ImageF32() = default;
  ImageF32(int h, int w, int c, float fill = 0.0f)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {
    if (h < 1 || w < 1 || c < 1 || c > 3)
      throw InvalidInput("ImageF32: bad shape " + shape_string(h, w, c));
  }

  static ImageF32 constant(int h, int w, int c, float v) { return ImageF32(h, w, c, v); }

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(c) * height + y) * width + x;
  }
  float& at(int y, int x, int c = 0) { return data[index(y, x, c)]; }
  float at(int y, int x, int c = 0) const { return data[index(y, x, c)]; }
  float* plane(int c) { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
  const float* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * plane_size(); }

  bool same_shape(const ImageF32& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  bool same_extent(int h, int w) const { return height == h && width == w; }

  std::string shape_string() const { return shape_string(height, width, channels); }
  static std::string shape_string(int h, int w, int c) {
    return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
  }

  bool all_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Rectangle copy, used for region-of-interest evaluation.
inline ImageF32 crop(const ImageF32& img, int y0, int x0, int h, int w) {
  if (y0 < 0 || x0 < 0 || h < 1 || w < 1 || y0 + h > img.height || x0 + w > img.width)
    throw InvalidInput("crop: rectangle " + std::to_string(y0) + "," + std::to_string(x0) +
                       "," + std::to_string(h) + "," + std::to_string(w) +
                       " outside image " + img.shape_string());
  ImageF32 out(h, w, img.channels);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(y, x, c) = img.at(y0 + y, x0 + x, c);
  return out;
}

inline void require_channels(const ImageF32& img, int c, const char* op) {
  if (img.channels != c)
    throw InvalidInput(std::string(op) + ": expected " + std::to_string(c) +
                       " channel(s), got " + img.shape_string());
}

inline void require_same_shape(const ImageF32& a, const ImageF32& b, const char* op) {
  if (!a.same_shape(b))
    throw InvalidInput(std::string(op) + ": shape mismatch " + a.shape_string() +
                       " vs " + b.shape_string());
}

// Boolean pixel grid; 1 = foreground.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int h, int w, bool fill = false)
      : height(h), width(w), bits(static_cast<std::size_t>(h) * w, fill ? 1 : 0) {}

  std::uint8_t& at(int y, int x) { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x]; }

  std::size_t count_true() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }
  bool empty_mask() const { return count_true() == 0; }
  bool same_extent(const BinaryMask& o) const { return height == o.height && width == o.width; }

  bool operator==(const BinaryMask& o) const {
    return height == o.height && width == o.width && bits == o.bits;
  }
};

}  // namespace celforge
