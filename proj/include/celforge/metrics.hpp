#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "celforge/blur.hpp"
#include "celforge/chamfer.hpp"
#include "celforge/color.hpp"
#include "celforge/image.hpp"

namespace celforge {

// 10*log10(1/MSE) for values in [0,1]; identical inputs give +inf.
inline double psnr(const ImageF32& pred, const ImageF32& gt) {
  require_same_shape(pred, gt, "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = static_cast<double>(pred.data[i]) - gt.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pred.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 1.  Multi-channel inputs are converted to grayscale first;
// local stats use the same replicate-border filtering as gaussian_blur.
inline double ssim(const ImageF32& pred, const ImageF32& gt, const Parallel& par = {}) {
  require_same_shape(pred, gt, "ssim");
  const ImageF32 a = pred.channels == 3 ? to_grayscale(pred, {}, par) : pred;
  const ImageF32 b = gt.channels == 3 ? to_grayscale(gt, {}, par) : gt;

  constexpr double kWindowSigma = 1.5;  // radius ceil(3*1.5) = 5 -> 11 taps
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;

  const std::size_t n = a.plane_size();
  ImageF32 aa(a.height, a.width, 1), bb(a.height, a.width, 1), ab(a.height, a.width, 1);
  for (std::size_t i = 0; i < n; ++i) {
    aa.data[i] = a.data[i] * a.data[i];
    bb.data[i] = b.data[i] * b.data[i];
    ab.data[i] = a.data[i] * b.data[i];
  }
  const ImageF32 mu_a = gaussian_blur(a, kWindowSigma, par);
  const ImageF32 mu_b = gaussian_blur(b, kWindowSigma, par);
  const ImageF32 m_aa = gaussian_blur(aa, kWindowSigma, par);
  const ImageF32 m_bb = gaussian_blur(bb, kWindowSigma, par);
  const ImageF32 m_ab = gaussian_blur(ab, kWindowSigma, par);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = mu_a.data[i], mb = mu_b.data[i];
    const double va = m_aa.data[i] - ma * ma;
    const double vb = m_bb.data[i] - mb * mb;
    const double cab = m_ab.data[i] - ma * mb;
    total += ((2.0 * ma * mb + kC1) * (2.0 * cab + kC2)) /
             ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
  }
  return total / static_cast<double>(n);
}

// Chamfer distance between the DoG sketches of two images; the blank-
// sketch error from chamfer() propagates so callers can flag the sample.
inline double chamfer_eval(const ImageF32& pred, const ImageF32& gt,
                           const DogParams& dog = {}, const ChamferOptions& opts = {},
                           const Parallel& par = {}) {
  require_same_shape(pred, gt, "chamfer_eval");
  const BinarySketch sp = extract_sketch(pred, dog, par);
  const BinarySketch sg = extract_sketch(gt, dog, par);
  return chamfer(sp, sg, opts, par);
}

struct MetricRow {
  std::string sample_id;
  std::optional<double> cd;  // absent when either sketch was blank
  double psnr = 0.0;         // +inf for identical images
  double ssim = 0.0;
  std::vector<std::string> tags;
};

struct MetricAggregate {
  std::string tag;  // "all" for the overall row
  std::size_t count = 0;
  std::optional<double> mean_cd;
  std::optional<double> mean_psnr;  // over finite-PSNR rows only
  std::optional<double> mean_ssim;
  std::size_t cd_missing = 0;
  std::size_t psnr_inf = 0;
};

struct MetricReport {
  std::vector<MetricRow> rows;           // sorted by sample_id
  std::vector<MetricAggregate> aggregates;  // "all" first, then tags sorted
};

// Display convention for tables: CD is scaled by 1e5.
inline constexpr double kCdDisplayScale = 1e5;

namespace detail {

inline MetricAggregate aggregate_rows(const std::string& tag,
                                      const std::vector<const MetricRow*>& rows) {
  MetricAggregate agg;
  agg.tag = tag;
  agg.count = rows.size();
  double cd_sum = 0.0, psnr_sum = 0.0, ssim_sum = 0.0;
  std::size_t cd_n = 0, psnr_n = 0;
  for (const MetricRow* r : rows) {
    if (r->cd) {
      cd_sum += *r->cd;
      ++cd_n;
    } else {
      ++agg.cd_missing;
    }
    if (std::isinf(r->psnr)) {
      ++agg.psnr_inf;
    } else {
      psnr_sum += r->psnr;
      ++psnr_n;
    }
    ssim_sum += r->ssim;
  }
  if (cd_n > 0) agg.mean_cd = cd_sum / static_cast<double>(cd_n);
  if (psnr_n > 0) agg.mean_psnr = psnr_sum / static_cast<double>(psnr_n);
  if (!rows.empty()) agg.mean_ssim = ssim_sum / static_cast<double>(rows.size());
  return agg;
}

}  // namespace detail

// Per-tag and overall means.  Rows are ordered by sample_id; a row with
// several tags contributes to each of them.
inline MetricReport aggregate(std::vector<MetricRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const MetricRow& a, const MetricRow& b) { return a.sample_id < b.sample_id; });
  MetricReport report;
  std::vector<const MetricRow*> all;
  std::map<std::string, std::vector<const MetricRow*>> by_tag;
  for (const MetricRow& r : rows) {
    all.push_back(&r);
    for (const std::string& t : r.tags) by_tag[t].push_back(&r);
  }
  report.aggregates.push_back(detail::aggregate_rows("all", all));
  for (const auto& [tag, members] : by_tag)
    report.aggregates.push_back(detail::aggregate_rows(tag, members));
  report.rows = std::move(rows);
  return report;
}

}  // namespace celforge
