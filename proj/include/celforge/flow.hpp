#pragma once

#include "celforge/image.hpp"

namespace celforge {

// Per-pixel displacement in pixels: channel 0 = u (+x, rightward),
// channel 1 = v (+y, downward).
struct FlowField {
  ImageF32 img;

  FlowField() = default;
  FlowField(int h, int w) : img(h, w, 2) {}
  explicit FlowField(ImageF32 i) : img(std::move(i)) {
    if (img.channels != 2)
      throw InvalidInput("FlowField: expected 2 channels, got " + img.shape_string());
  }

  int height() const { return img.height; }
  int width() const { return img.width; }
  float& u(int y, int x) { return img.at(y, x, 0); }
  float u(int y, int x) const { return img.at(y, x, 0); }
  float& v(int y, int x) { return img.at(y, x, 1); }
  float v(int y, int x) const { return img.at(y, x, 1); }

  bool same_extent(const FlowField& o) const {
    return height() == o.height() && width() == o.width();
  }
};

inline FlowField scale_flow(const FlowField& flow, double s) {
  FlowField out(flow.height(), flow.width());
  for (std::size_t i = 0; i < flow.img.data.size(); ++i)
    out.img.data[i] = static_cast<float>(s * flow.img.data[i]);
  return out;
}

}  // namespace celforge
