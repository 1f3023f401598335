#pragma once

#include "celforge/blur.hpp"
#include "celforge/color.hpp"
#include "celforge/image.hpp"

namespace celforge {

using BinarySketch = BinaryMask;

// Difference-of-Gaussians line extraction parameters.  sigma_base is the
// narrow-blur sigma at a 540px-tall image and scales linearly with height.
struct DogParams {
  double sigma_base = 1.0;
  double k_ratio = 1.6;
  double t_gain = 2.0;
  double epsilon = 0.01;

  double sigma_for_height(int height) const { return sigma_base * height / 540.0; }
};

// response = 0.5 + t*(G_{k*sigma}(gray) - G_sigma(gray)) - eps,
// line pixels are those with response > 0.5.
inline BinarySketch extract_sketch(const ImageF32& img, double sigma, double k_ratio,
                                   double t_gain, double epsilon, const Parallel& par = {}) {
  if (!(sigma > 0.0)) throw InvalidParameter("extract_sketch: sigma must be > 0");
  if (!(k_ratio > 1.0)) throw InvalidParameter("extract_sketch: k_ratio must be > 1");
  const ImageF32 gray = to_grayscale(img, {}, par);
  const ImageF32 narrow = gaussian_blur(gray, sigma, par);
  const ImageF32 wide = gaussian_blur(gray, k_ratio * sigma, par);
  BinarySketch sketch(img.height, img.width);
  const float* n = narrow.plane(0);
  const float* w = wide.plane(0);
  par.for_range(img.height, [&](std::int64_t y) {
    const std::size_t row = static_cast<std::size_t>(y) * img.width;
    for (int x = 0; x < img.width; ++x) {
      const double response = 0.5 + t_gain * (static_cast<double>(w[row + x]) - n[row + x]) - epsilon;
      sketch.bits[row + x] = response > 0.5 ? 1 : 0;
    }
  });
  return sketch;
}

inline BinarySketch extract_sketch(const ImageF32& img, const DogParams& p,
                                   const Parallel& par = {}) {
  return extract_sketch(img, p.sigma_for_height(img.height), p.k_ratio, p.t_gain, p.epsilon, par);
}

}  // namespace celforge
