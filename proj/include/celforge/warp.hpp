#pragma once

#include <algorithm>
#include <cmath>

#include "celforge/color.hpp"
#include "celforge/flow.hpp"
#include "celforge/image.hpp"
#include "celforge/morphology.hpp"
#include "celforge/parallel.hpp"

namespace celforge {

inline constexpr float kCoverageEps = 1e-7f;

// out(x) = bilinear sample of img at x + flow(x); samples outside the
// frame clamp to the border.
inline ImageF32 backward_warp(const ImageF32& img, const FlowField& flow,
                              const Parallel& par = {}) {
  if (!img.same_extent(flow.height(), flow.width()))
    throw InvalidInput("backward_warp: image " + img.shape_string() + " vs flow " +
                       ImageF32::shape_string(flow.height(), flow.width(), 2));
  const int h = img.height, w = img.width;
  ImageF32 out(h, w, img.channels);
  par.for_range(h, [&](std::int64_t yi) {
    const int y = static_cast<int>(yi);
    for (int x = 0; x < w; ++x) {
      float px = x + flow.u(y, x);
      float py = y + flow.v(y, x);
      px = std::clamp(px, 0.0f, static_cast<float>(w - 1));
      py = std::clamp(py, 0.0f, static_cast<float>(h - 1));
      const int x0 = static_cast<int>(px);
      const int y0 = static_cast<int>(py);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const float fx = px - x0;
      const float fy = py - y0;
      for (int c = 0; c < img.channels; ++c) {
        const float top = img.at(y0, x0, c) * (1.0f - fx) + img.at(y0, x1, c) * fx;
        const float bot = img.at(y1, x0, c) * (1.0f - fx) + img.at(y1, x1, c) * fx;
        out.at(y, x, c) = top * (1.0f - fy) + bot * fy;
      }
    }
  });
  return out;
}

// Z(x) = -0.1 * || LAB(src)(x) - backwarp(LAB(other), flow)(x) ||_2.
// Non-positive everywhere; used as the splat importance metric.
inline ImageF32 z_metric(const ImageF32& src, const ImageF32& other,
                         const FlowField& flow_src_to_other, const Parallel& par = {}) {
  require_channels(src, 3, "z_metric");
  require_channels(other, 3, "z_metric");
  require_same_shape(src, other, "z_metric");
  if (!src.same_extent(flow_src_to_other.height(), flow_src_to_other.width()))
    throw InvalidInput("z_metric: flow extent mismatch");
  const ImageF32 lab_src = rgb_to_lab(src, par);
  const ImageF32 lab_warped = backward_warp(rgb_to_lab(other, par), flow_src_to_other, par);
  ImageF32 z(src.height, src.width, 1);
  par.for_range(src.height, [&](std::int64_t yi) {
    const int y = static_cast<int>(yi);
    for (int x = 0; x < src.width; ++x) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = static_cast<double>(lab_src.at(y, x, c)) - lab_warped.at(y, x, c);
        d2 += d * d;
      }
      z.at(y, x) = static_cast<float>(-0.1 * std::sqrt(d2));
    }
  });
  return z;
}

// values: exp(z)-weighted normalized splat, zeroed where the accumulated
// weight is <= kCoverageEps.  coverage: raw bilinear weight of an all-ones
// channel (no z factor), i.e. how much source mass reached each pixel.
struct SplatResult {
  ImageF32 values;
  ImageF32 coverage;
};

namespace detail {

// Source rows are processed in fixed-size bands, each accumulating into
// its own buffer; buffers are merged in band order afterwards so splat
// sums are bit-identical for every worker count.
inline constexpr int kSplatBandRows = 128;

}  // namespace detail

// Forward softmax splat: every source pixel scatters exp(z)*value and
// exp(z) weight over the 4 bilinear neighbors of x + flow(x); out-of-frame
// destinations are dropped.
inline SplatResult softmax_splat(const ImageF32& values, const FlowField& flow,
                                 const ImageF32& z, const Parallel& par = {}) {
  if (!values.same_extent(flow.height(), flow.width()))
    throw InvalidInput("softmax_splat: values " + values.shape_string() + " vs flow " +
                       ImageF32::shape_string(flow.height(), flow.width(), 2));
  require_channels(z, 1, "softmax_splat(z)");
  if (!z.same_extent(values.height, values.width))
    throw InvalidInput("softmax_splat: z extent mismatch");
  if (!z.all_finite())
    throw InvalidInput("softmax_splat: z must be finite");

  const int h = values.height, w = values.width, ch = values.channels;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t buf_size = plane * (ch + 2);  // ch numerators, weight, coverage
  const int bands = (h + detail::kSplatBandRows - 1) / detail::kSplatBandRows;

  std::vector<std::vector<float>> band_bufs(bands);
  par.for_range(bands, [&](std::int64_t b) {
    auto& buf = band_bufs[b];
    buf.assign(buf_size, 0.0f);
    float* num = buf.data();                       // ch planes
    float* wgt = buf.data() + plane * ch;          // exp(z)-weighted
    float* cov = buf.data() + plane * (ch + 1);    // raw bilinear
    const int y_begin = static_cast<int>(b) * detail::kSplatBandRows;
    const int y_end = std::min(h, y_begin + detail::kSplatBandRows);
    for (int y = y_begin; y < y_end; ++y) {
      for (int x = 0; x < w; ++x) {
        const float tx = x + flow.u(y, x);
        const float ty = y + flow.v(y, x);
        const int x0 = static_cast<int>(std::floor(tx));
        const int y0 = static_cast<int>(std::floor(ty));
        const float fx = tx - x0;
        const float fy = ty - y0;
        const float ez = std::exp(z.at(y, x));
        const float wq[4] = {(1.0f - fx) * (1.0f - fy), fx * (1.0f - fy),
                             (1.0f - fx) * fy, fx * fy};
        const int qx[4] = {x0, x0 + 1, x0, x0 + 1};
        const int qy[4] = {y0, y0, y0 + 1, y0 + 1};
        for (int q = 0; q < 4; ++q) {
          if (qx[q] < 0 || qx[q] >= w || qy[q] < 0 || qy[q] >= h) continue;
          const std::size_t at = static_cast<std::size_t>(qy[q]) * w + qx[q];
          for (int c = 0; c < ch; ++c)
            num[plane * c + at] += wq[q] * ez * values.at(y, x, c);
          wgt[at] += wq[q] * ez;
          cov[at] += wq[q];
        }
      }
    }
  });

  std::vector<float> acc(buf_size, 0.0f);
  for (int b = 0; b < bands; ++b)
    for (std::size_t i = 0; i < buf_size; ++i) acc[i] += band_bufs[b][i];

  SplatResult out{ImageF32(h, w, ch), ImageF32(h, w, 1)};
  const float* num = acc.data();
  const float* wgt = acc.data() + plane * ch;
  const float* cov = acc.data() + plane * (ch + 1);
  for (std::size_t i = 0; i < plane; ++i) {
    // Covered means geometric coverage above epsilon; the exp(z)-weighted
    // denominator scales identically with the numerator, so the ratio is
    // stable even for strongly negative z.
    const bool covered = cov[i] > kCoverageEps && wgt[i] > 0.0f;
    for (int c = 0; c < ch; ++c)
      out.values.data[plane * c + i] = covered ? num[plane * c + i] / wgt[i] : 0.0f;
    out.coverage.data[i] = cov[i];
  }
  return out;
}

namespace detail {

inline BinaryMask mask_from_coverage(const ImageF32& coverage, int open_kernel,
                                     const Parallel& par) {
  BinaryMask m(coverage.height, coverage.width);
  for (std::size_t i = 0; i < coverage.data.size(); ++i)
    m.bits[i] = coverage.data[i] > 0.5f ? 1 : 0;
  return morph_open(m, open_kernel, par);
}

}  // namespace detail

// Occlusion mask of a warp: splat an image of ones, binarize the raw
// coverage at 0.5, then open with a k x k element to drop dotted artifacts.
inline BinaryMask occlusion_mask(const FlowField& flow, const ImageF32& z,
                                 int open_kernel = 5, const Parallel& par = {}) {
  const ImageF32 ones = ImageF32::constant(flow.height(), flow.width(), 1, 1.0f);
  const SplatResult sr = softmax_splat(ones, flow, z, par);
  return detail::mask_from_coverage(sr.coverage, open_kernel, par);
}

struct InfillResult {
  ImageF32 values;
  BinaryMask holes;  // pixels with no splat coverage from either warp
};

// Occlusion-mask infilling of two forward warps:
//   F = 1/2 (M0*W0 + (1-M0)*W1) + 1/2 (M1*W1 + (1-M1)*W0)
// so each warp's occluded pixels are filled from the other side.  Pixels
// covered by neither warp stay 0 and are flagged in `holes`.
inline InfillResult infilled_warp(const ImageF32& f0, const ImageF32& f1,
                                  const FlowField& flow_0t, const FlowField& flow_1t,
                                  const ImageF32& z0, const ImageF32& z1,
                                  int open_kernel = 5, const Parallel& par = {}) {
  require_same_shape(f0, f1, "infilled_warp");
  if (!f0.same_extent(flow_0t.height(), flow_0t.width()) ||
      !f1.same_extent(flow_1t.height(), flow_1t.width()))
    throw InvalidInput("infilled_warp: flow extent mismatch");

  const SplatResult w0 = softmax_splat(f0, flow_0t, z0, par);
  const SplatResult w1 = softmax_splat(f1, flow_1t, z1, par);
  const BinaryMask m0 = detail::mask_from_coverage(w0.coverage, open_kernel, par);
  const BinaryMask m1 = detail::mask_from_coverage(w1.coverage, open_kernel, par);

  InfillResult out{ImageF32(f0.height, f0.width, f0.channels), BinaryMask(f0.height, f0.width)};
  const std::size_t plane = f0.plane_size();
  par.for_range(f0.height, [&](std::int64_t yi) {
    const int y = static_cast<int>(yi);
    for (int x = 0; x < f0.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * f0.width + x;
      const float a = m0.bits[i] ? 1.0f : 0.0f;
      const float b = m1.bits[i] ? 1.0f : 0.0f;
      for (int c = 0; c < f0.channels; ++c) {
        const float v0 = w0.values.data[plane * c + i];
        const float v1 = w1.values.data[plane * c + i];
        out.values.data[plane * c + i] =
            0.5f * (a * v0 + (1.0f - a) * v1) + 0.5f * (b * v1 + (1.0f - b) * v0);
      }
      out.holes.bits[i] =
          (w0.coverage.data[i] <= kCoverageEps && w1.coverage.data[i] <= kCoverageEps) ? 1 : 0;
    }
  });
  return out;
}

// Neural-free halfway interpolation: Eq-style infilled warp applied to the
// RGB values themselves.  flow_01/flow_10 are the full inter-frame flows;
// the flows to time t are their linear scalings.
inline InfillResult halfway_interp(const ImageF32& i0, const ImageF32& i1,
                                   const FlowField& flow_01, const FlowField& flow_10,
                                   double t, int open_kernel = 5, const Parallel& par = {}) {
  if (!(t >= 0.0 && t <= 1.0))
    throw InvalidParameter("halfway_interp: t must lie in [0,1]");
  require_channels(i0, 3, "halfway_interp");
  require_channels(i1, 3, "halfway_interp");
  const FlowField flow_0t = scale_flow(flow_01, t);
  const FlowField flow_1t = scale_flow(flow_10, 1.0 - t);
  const ImageF32 z0 = z_metric(i0, i1, flow_01, par);
  const ImageF32 z1 = z_metric(i1, i0, flow_10, par);
  InfillResult res = infilled_warp(i0, i1, flow_0t, flow_1t, z0, z1, open_kernel, par);
  for (float& v : res.values.data) v = std::clamp(v, 0.0f, 1.0f);
  return res;
}

inline ImageF32 halfway_guess(const ImageF32& i0, const ImageF32& i1,
                              const FlowField& flow_01, const FlowField& flow_10,
                              double t, int open_kernel = 5, const Parallel& par = {}) {
  return halfway_interp(i0, i1, flow_01, flow_10, t, open_kernel, par).values;
}

}  // namespace celforge
