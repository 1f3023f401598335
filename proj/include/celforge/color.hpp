#pragma once

#include <array>
#include <cmath>

#include "celforge/image.hpp"
#include "celforge/parallel.hpp"

namespace celforge {

// Rec. 601 luma weights; the default everywhere a grayscale conversion is
// needed, overridable for sensitivity checks.
struct GrayWeights {
  double r = 0.299;
  double g = 0.587;
  double b = 0.114;
};

inline ImageF32 to_grayscale(const ImageF32& img, const GrayWeights& w = {},
                             const Parallel& par = {}) {
  require_channels(img, 3, "to_grayscale");
  ImageF32 out(img.height, img.width, 1);
  const float* r = img.plane(0);
  const float* g = img.plane(1);
  const float* b = img.plane(2);
  float* o = out.plane(0);
  const float wr = static_cast<float>(w.r), wg = static_cast<float>(w.g),
              wb = static_cast<float>(w.b);
  par.for_range(img.height, [&](std::int64_t y) {
    const std::size_t row = static_cast<std::size_t>(y) * img.width;
    for (int x = 0; x < img.width; ++x)
      o[row + x] = wr * r[row + x] + wg * g[row + x] + wb * b[row + x];
  });
  return out;
}

namespace detail {

// sRGB (D65) to XYZ.  The white point is taken as the matrix row sums so
// that (1,1,1) maps to exactly L*=100, a*=b*=0.
inline constexpr double kSrgbToXyz[3][3] = {
    {0.41239079926595934, 0.357584339383878, 0.1804807884018343},
    {0.21263900587151027, 0.715168678767756, 0.07219231536073371},
    {0.01933081871559182, 0.11919477979462598, 0.9505321522496607},
};

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double eps = 216.0 / 24389.0;
  constexpr double kappa = 24389.0 / 27.0;
  return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

inline std::array<double, 3> rgb_to_lab_pixel(double r, double g, double b) {
  const double rl = srgb_to_linear(r);
  const double gl = srgb_to_linear(g);
  const double bl = srgb_to_linear(b);
  double xyz[3];
  for (int i = 0; i < 3; ++i)
    xyz[i] = kSrgbToXyz[i][0] * rl + kSrgbToXyz[i][1] * gl + kSrgbToXyz[i][2] * bl;
  double wp[3];
  for (int i = 0; i < 3; ++i)
    wp[i] = kSrgbToXyz[i][0] + kSrgbToXyz[i][1] + kSrgbToXyz[i][2];
  const double fx = lab_f(xyz[0] / wp[0]);
  const double fy = lab_f(xyz[1] / wp[1]);
  const double fz = lab_f(xyz[2] / wp[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

}  // namespace detail

// sRGB in [0,1] -> CIE L*a*b* (D65).  L in [0,100].
inline ImageF32 rgb_to_lab(const ImageF32& img, const Parallel& par = {}) {
  require_channels(img, 3, "rgb_to_lab");
  ImageF32 out(img.height, img.width, 3);
  const float* r = img.plane(0);
  const float* g = img.plane(1);
  const float* b = img.plane(2);
  float* ol = out.plane(0);
  float* oa = out.plane(1);
  float* ob = out.plane(2);
  par.for_range(img.height, [&](std::int64_t y) {
    const std::size_t row = static_cast<std::size_t>(y) * img.width;
    for (int x = 0; x < img.width; ++x) {
      const auto lab = detail::rgb_to_lab_pixel(r[row + x], g[row + x], b[row + x]);
      ol[row + x] = static_cast<float>(lab[0]);
      oa[row + x] = static_cast<float>(lab[1]);
      ob[row + x] = static_cast<float>(lab[2]);
    }
  });
  return out;
}

}  // namespace celforge
