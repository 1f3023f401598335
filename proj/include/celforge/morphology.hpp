#pragma once

#include "celforge/image.hpp"
#include "celforge/parallel.hpp"

namespace celforge {

namespace detail {

inline void check_kernel(int k, const char* op) {
  if (k < 1 || k % 2 == 0)
    throw InvalidParameter(std::string(op) + ": kernel side must be odd and >= 1, got " +
                           std::to_string(k));
}

// Separable min/max over a k x k square element.  Out-of-bounds pixels
// contribute `oob` (false for both erosion and dilation here, so eroded
// masks never claim coverage outside the frame).
template <bool kErode>
inline BinaryMask morph_pass(const BinaryMask& m, int k, const Parallel& par) {
  const int r = k / 2;
  BinaryMask tmp(m.height, m.width);
  par.for_range(m.height, [&](std::int64_t y) {
    for (int x = 0; x < m.width; ++x) {
      bool acc = kErode;
      for (int i = -r; i <= r; ++i) {
        const int xi = x + i;
        const bool v = (xi >= 0 && xi < m.width) ? m.at(static_cast<int>(y), xi) != 0 : false;
        acc = kErode ? (acc && v) : (acc || v);
      }
      tmp.at(static_cast<int>(y), x) = acc ? 1 : 0;
    }
  });
  BinaryMask out(m.height, m.width);
  par.for_range(m.height, [&](std::int64_t y) {
    for (int x = 0; x < m.width; ++x) {
      bool acc = kErode;
      for (int i = -r; i <= r; ++i) {
        const int yi = static_cast<int>(y) + i;
        const bool v = (yi >= 0 && yi < m.height) ? tmp.at(yi, x) != 0 : false;
        acc = kErode ? (acc && v) : (acc || v);
      }
      out.at(static_cast<int>(y), x) = acc ? 1 : 0;
    }
  });
  return out;
}

}  // namespace detail

inline BinaryMask erode(const BinaryMask& m, int k, const Parallel& par = {}) {
  detail::check_kernel(k, "erode");
  if (k == 1) return m;
  return detail::morph_pass<true>(m, k, par);
}

inline BinaryMask dilate(const BinaryMask& m, int k, const Parallel& par = {}) {
  detail::check_kernel(k, "dilate");
  if (k == 1) return m;
  return detail::morph_pass<false>(m, k, par);
}

// Erosion followed by dilation with a k x k square element.
inline BinaryMask morph_open(const BinaryMask& m, int k, const Parallel& par = {}) {
  detail::check_kernel(k, "morph_open");
  if (k == 1) return m;
  return dilate(erode(m, k, par), k, par);
}

}  // namespace celforge
