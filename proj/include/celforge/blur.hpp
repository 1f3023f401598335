#pragma once

#include <cmath>
#include <vector>

#include "celforge/image.hpp"
#include "celforge/parallel.hpp"

namespace celforge {

// Sampled Gaussian, truncated at radius ceil(3*sigma), renormalized to sum 1.
inline std::vector<float> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("gaussian_kernel: sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  std::vector<float> out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    out[i] = static_cast<float>(k[i] / sum);
  return out;
}

namespace detail {

// 1D convolution along x with replicate borders; in/out are single planes.
inline void convolve_rows(const float* in, float* out, int height, int width,
                          const std::vector<float>& kernel, const Parallel& par) {
  const int radius = static_cast<int>(kernel.size() / 2);
  par.for_range(height, [&](std::int64_t y) {
    const float* row = in + static_cast<std::size_t>(y) * width;
    float* orow = out + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        int xi = x + i;
        if (xi < 0) xi = 0;
        if (xi >= width) xi = width - 1;
        acc += static_cast<double>(kernel[i + radius]) * row[xi];
      }
      orow[x] = static_cast<float>(acc);
    }
  });
}

inline void convolve_cols(const float* in, float* out, int height, int width,
                          const std::vector<float>& kernel, const Parallel& par) {
  const int radius = static_cast<int>(kernel.size() / 2);
  par.for_range(height, [&](std::int64_t y) {
    float* orow = out + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        int yi = static_cast<int>(y) + i;
        if (yi < 0) yi = 0;
        if (yi >= height) yi = height - 1;
        acc += static_cast<double>(kernel[i + radius]) * in[static_cast<std::size_t>(yi) * width + x];
      }
      orow[x] = static_cast<float>(acc);
    }
  });
}

}  // namespace detail

// Separable Gaussian blur, per channel, replicate border.
inline ImageF32 gaussian_blur(const ImageF32& img, double sigma, const Parallel& par = {}) {
  const auto kernel = gaussian_kernel(sigma);
  ImageF32 out(img.height, img.width, img.channels);
  std::vector<float> tmp(img.plane_size());
  for (int c = 0; c < img.channels; ++c) {
    detail::convolve_rows(img.plane(c), tmp.data(), img.height, img.width, kernel, par);
    detail::convolve_cols(tmp.data(), out.plane(c), img.height, img.width, kernel, par);
  }
  return out;
}

}  // namespace celforge
