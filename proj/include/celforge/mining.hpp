#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "celforge/color.hpp"
#include "celforge/flo_io.hpp"
#include "celforge/flow.hpp"
#include "celforge/image.hpp"
#include "celforge/metrics.hpp"
#include "celforge/parallel.hpp"

namespace celforge {

// Flows from the middle frame of a triplet outward to its two ends.
struct TripletFlows {
  FlowField to_prev;
  FlowField to_next;

  void validate() const {
    if (!to_prev.same_extent(to_next))
      throw InvalidInput("TripletFlows: flow extents differ");
  }
};

// Omega: pixels where both flows have norm > min_norm (strict) and both
// destinations land inside [0,W) x [0,H).
inline BinaryMask restricted_set(const TripletFlows& flows, double min_norm,
                                 const Parallel& par = {}) {
  flows.validate();
  if (min_norm < 0.0) throw InvalidParameter("restricted_set: min_norm must be >= 0");
  const int h = flows.to_prev.height(), w = flows.to_prev.width();
  BinaryMask omega(h, w);
  par.for_range(h, [&](std::int64_t yi) {
    const int y = static_cast<int>(yi);
    for (int x = 0; x < w; ++x) {
      const double up = flows.to_prev.u(y, x), vp = flows.to_prev.v(y, x);
      const double un = flows.to_next.u(y, x), vn = flows.to_next.v(y, x);
      const bool norms_ok = std::hypot(up, vp) > min_norm && std::hypot(un, vn) > min_norm;
      const bool in_p = x + up >= 0.0 && x + up < w && y + vp >= 0.0 && y + vp < h;
      const bool in_n = x + un >= 0.0 && x + un < w && y + vn >= 0.0 && y + vn < h;
      omega.at(y, x) = (norms_ok && in_p && in_n) ? 1 : 0;
    }
  });
  return omega;
}

// Mean over omega of (||wp + wn|| / 2) / ||wp - wn||: zero for perfectly
// mirrored motion.  Pixels whose denominator is exactly zero (equal
// parallel flows) are excluded from the mean; if nothing remains the
// triplet is unratable.
inline double rrld_over(const TripletFlows& flows, const BinaryMask& omega,
                        const Parallel& par = {}) {
  flows.validate();
  const int h = flows.to_prev.height(), w = flows.to_prev.width();
  if (omega.height != h || omega.width != w)
    throw InvalidInput("rrld_over: omega extent mismatch");
  std::vector<double> row_sum(h, 0.0);
  std::vector<std::int64_t> row_count(h, 0);
  par.for_range(h, [&](std::int64_t yi) {
    const int y = static_cast<int>(yi);
    double sum = 0.0;
    std::int64_t count = 0;
    for (int x = 0; x < w; ++x) {
      if (!omega.at(y, x)) continue;
      const double up = flows.to_prev.u(y, x), vp = flows.to_prev.v(y, x);
      const double un = flows.to_next.u(y, x), vn = flows.to_next.v(y, x);
      const double den = std::hypot(up - un, vp - vn);
      if (den == 0.0) continue;
      sum += 0.5 * std::hypot(up + un, vp + vn) / den;
      ++count;
    }
    row_sum[y] = sum;
    row_count[y] = count;
  });
  double sum = 0.0;
  std::int64_t count = 0;
  for (int y = 0; y < h; ++y) {
    sum += row_sum[y];
    count += row_count[y];
  }
  if (count == 0)
    throw NoValidPixelsError("rrld: restricted set has no usable pixels");
  return sum / static_cast<double>(count);
}

inline double rrld(const TripletFlows& flows, double min_norm = 2.0,
                   const Parallel& par = {}) {
  return rrld_over(flows, restricted_set(flows, min_norm, par), par);
}

// Pan rejection thresholds.  mag_min_base is in pixels at a 540px-tall
// frame and scales linearly with height.
struct PanParams {
  double frac_min = 0.5;
  double mag_min_base = 10.0;
  double var_max = 1.0;

  double mag_min_for_height(int height) const { return mag_min_base * height / 540.0; }
};

// Pan: omega covers most of the frame, flows are large on average, and
// every flow component has low variance over omega.
inline bool detect_pan(const TripletFlows& flows, const BinaryMask& omega,
                       const PanParams& params = {}) {
  flows.validate();
  const int h = flows.to_prev.height(), w = flows.to_prev.width();
  const std::size_t n_omega = omega.count_true();
  if (n_omega == 0) return false;
  const double frac = static_cast<double>(n_omega) / (static_cast<double>(h) * w);
  if (frac <= params.frac_min) return false;

  double mag_sum = 0.0;
  double comp_sum[4] = {0, 0, 0, 0}, comp_sq[4] = {0, 0, 0, 0};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!omega.at(y, x)) continue;
      const double c[4] = {flows.to_prev.u(y, x), flows.to_prev.v(y, x),
                           flows.to_next.u(y, x), flows.to_next.v(y, x)};
      mag_sum += 0.5 * (std::hypot(c[0], c[1]) + std::hypot(c[2], c[3]));
      for (int k = 0; k < 4; ++k) {
        comp_sum[k] += c[k];
        comp_sq[k] += c[k] * c[k];
      }
    }
  const double inv_n = 1.0 / static_cast<double>(n_omega);
  if (mag_sum * inv_n <= params.mag_min_for_height(h)) return false;
  for (int k = 0; k < 4; ++k) {
    const double mean = comp_sum[k] * inv_n;
    const double var = comp_sq[k] * inv_n - mean * mean;
    if (var >= params.var_max) return false;
  }
  return true;
}

struct DedupFeatures {
  double mean = 0.0;
  double max = 0.0;
};

// Mean and maximum per-pixel L2 LAB color difference between two frames.
inline DedupFeatures dedup_features(const ImageF32& a, const ImageF32& b,
                                    const Parallel& par = {}) {
  require_channels(a, 3, "dedup_features");
  require_channels(b, 3, "dedup_features");
  require_same_shape(a, b, "dedup_features");
  const ImageF32 la = rgb_to_lab(a, par);
  const ImageF32 lb = rgb_to_lab(b, par);
  const int h = a.height, w = a.width;
  const std::size_t plane = a.plane_size();
  std::vector<double> row_sum(h, 0.0), row_max(h, 0.0);
  par.for_range(h, [&](std::int64_t yi) {
    const int y = static_cast<int>(yi);
    double sum = 0.0, mx = 0.0;
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = static_cast<double>(la.data[plane * c + i]) - lb.data[plane * c + i];
        d2 += d * d;
      }
      const double d = std::sqrt(d2);
      sum += d;
      mx = std::max(mx, d);
    }
    row_sum[y] = sum;
    row_max[y] = mx;
  });
  DedupFeatures f;
  for (int y = 0; y < h; ++y) {
    f.mean += row_sum[y];
    f.max = std::max(f.max, row_max[y]);
  }
  f.mean /= static_cast<double>(plane);
  return f;
}

// Linear scorer over (1, mean, max) LAB-difference features.
struct DedupModel {
  double bias = 0.0;
  double w_mean = 0.0;
  double w_max = 0.0;
  double threshold = 0.5;

  double score(const DedupFeatures& f) const {
    return bias + w_mean * f.mean + w_max * f.max;
  }
  bool is_duplicate(const DedupFeatures& f) const { return score(f) > threshold; }
};

// Least-squares fit of duplicate labels {0,1} on (1, mean, max); decision
// threshold 0.5 on the fitted score.
inline DedupModel fit_dedup(const std::vector<std::pair<DedupFeatures, bool>>& samples) {
  if (samples.size() < 3)
    throw InvalidInput("fit_dedup: need at least 3 samples");
  bool has_pos = false, has_neg = false;
  for (const auto& [f, dup] : samples) (dup ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw InvalidInput("fit_dedup: need both duplicate and non-duplicate samples");

  // Normal equations for the 3-parameter model.
  double ata[3][3] = {};
  double aty[3] = {};
  for (const auto& [f, dup] : samples) {
    const double row[3] = {1.0, f.mean, f.max};
    const double y = dup ? 1.0 : 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
      aty[i] += row[i] * y;
    }
  }
  // Gaussian elimination with partial pivoting.
  double m[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = ata[i][j];
    m[i][3] = aty[i];
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12)
      throw FitError("fit_dedup: degenerate design matrix");
    if (pivot != col)
      for (int j = 0; j < 4; ++j) std::swap(m[pivot][j], m[col][j]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double factor = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= factor * m[col][j];
    }
  }
  DedupModel model;
  model.bias = m[0][3] / m[0][0];
  model.w_mean = m[1][3] / m[1][1];
  model.w_max = m[2][3] / m[2][2];
  model.threshold = 0.5;
  return model;
}

// Accept a triplet only when the SSIM of every frame pair lies inside
// [lo, hi]; all_pairs=false checks the two consecutive pairs only.
inline bool naive_ssim_filter(const ImageF32& prev, const ImageF32& mid,
                              const ImageF32& next, double lo = 0.75, double hi = 0.95,
                              bool all_pairs = true, const Parallel& par = {}) {
  require_same_shape(prev, mid, "naive_ssim_filter");
  require_same_shape(mid, next, "naive_ssim_filter");
  const double s_pm = ssim(prev, mid, par);
  if (s_pm < lo || s_pm > hi) return false;
  const double s_mn = ssim(mid, next, par);
  if (s_mn < lo || s_mn > hi) return false;
  if (all_pairs) {
    const double s_pn = ssim(prev, next, par);
    if (s_pn < lo || s_pn > hi) return false;
  }
  return true;
}

// One contiguous shot: frame index range [start, end], inclusive.
struct Cut {
  int id = 0;
  int start = 0;
  int end = 0;
};

struct TripletRecord {
  std::string prev;
  std::string mid;
  std::string next;
  std::optional<double> rrld;
  double omega_fraction = 0.0;
  bool is_pan = false;
  bool has_duplicate = false;
  int cut_id = 0;
  bool accepted = false;
  std::string reject_reason;  // empty for the accepted record

  bool operator==(const TripletRecord&) const = default;
};

struct MineOptions {
  double rrld_threshold = 0.3;
  double min_norm = 2.0;
  PanParams pan;
  std::optional<DedupModel> dedup;  // no model = no duplicate removal
  std::uint32_t seed = 0;
};

namespace detail {

inline std::uint32_t bounded_rand(std::mt19937& gen, std::uint32_t n) {
  const std::uint32_t lim =
      std::numeric_limits<std::uint32_t>::max() - std::numeric_limits<std::uint32_t>::max() % n;
  std::uint32_t v;
  do {
    v = gen();
  } while (v >= lim);
  return v % n;
}

inline std::filesystem::path flow_path(const std::filesystem::path& flows_dir,
                                       const std::filesystem::path& mid,
                                       const std::filesystem::path& other) {
  return flows_dir / (mid.stem().string() + "__" + other.stem().string() + ".flo");
}

}  // namespace detail

// Triplet mining over one frame sequence.  Per cut: drop duplicate frames,
// enumerate consecutive triplets of the kept frames, score them (omega,
// RRLD, pan), then pick exactly one qualifying triplet per cut with the
// seeded per-cut generator.  Dropped frames are documented as records with
// has_duplicate set.  The whole run is byte-identical for a fixed seed, at
// any worker count.
inline std::vector<TripletRecord> mine(const std::vector<std::filesystem::path>& frames,
                                       const std::filesystem::path& flows_dir,
                                       const std::vector<Cut>& cuts,
                                       const std::function<ImageF32(const std::filesystem::path&)>& load_frame,
                                       const MineOptions& opts = {},
                                       const Parallel& par = {}) {
  if (frames.size() < 3) throw InvalidInput("mine: need at least 3 frames");
  for (const Cut& cut : cuts)
    if (cut.start < 0 || cut.end < cut.start || cut.end >= static_cast<int>(frames.size()))
      throw InvalidInput("mine: cut " + std::to_string(cut.id) + " range out of bounds");

  struct Candidate {
    int cut_index;
    int prev, mid, next;  // frame indices
    TripletRecord record;
  };
  std::vector<Candidate> candidates;
  std::vector<TripletRecord> dup_records;
  std::vector<int> dup_mid_index;

  for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
    const Cut& cut = cuts[ci];
    std::vector<int> kept;
    ImageF32 last_kept_img;
    for (int f = cut.start; f <= cut.end; ++f) {
      ImageF32 img;
      if (opts.dedup) img = load_frame(frames[f]);
      if (opts.dedup && !kept.empty()) {
        const DedupFeatures feat = dedup_features(last_kept_img, img, par);
        if (opts.dedup->is_duplicate(feat)) {
          TripletRecord rec;
          rec.prev = frames[kept.back()].filename().string();
          rec.mid = frames[f].filename().string();
          rec.next = f + 1 <= cut.end ? frames[f + 1].filename().string() : std::string();
          rec.has_duplicate = true;
          rec.cut_id = cut.id;
          rec.reject_reason = "duplicate";
          dup_records.push_back(std::move(rec));
          dup_mid_index.push_back(f);
          continue;
        }
      }
      if (opts.dedup) last_kept_img = std::move(img);
      kept.push_back(f);
    }
    for (std::size_t i = 1; i + 1 < kept.size(); ++i) {
      Candidate c;
      c.cut_index = static_cast<int>(ci);
      c.prev = kept[i - 1];
      c.mid = kept[i];
      c.next = kept[i + 1];
      c.record.prev = frames[c.prev].filename().string();
      c.record.mid = frames[c.mid].filename().string();
      c.record.next = frames[c.next].filename().string();
      c.record.cut_id = cut.id;
      candidates.push_back(std::move(c));
    }
  }

  // Scoring is independent per candidate; each slot is written once.
  par.for_range(static_cast<std::int64_t>(candidates.size()), [&](std::int64_t i) {
    Candidate& c = candidates[i];
    TripletRecord& rec = c.record;
    TripletFlows flows;
    try {
      const auto p_prev = detail::flow_path(flows_dir, frames[c.mid], frames[c.prev]);
      const auto p_next = detail::flow_path(flows_dir, frames[c.mid], frames[c.next]);
      if (!std::filesystem::exists(p_prev) || !std::filesystem::exists(p_next)) {
        rec.reject_reason = "missing_flow";
        return;
      }
      flows.to_prev = read_flo(p_prev);
      flows.to_next = read_flo(p_next);
      flows.validate();
    } catch (const std::exception&) {
      rec.reject_reason = "flow_error";
      return;
    }
    const BinaryMask omega = restricted_set(flows, opts.min_norm);
    rec.omega_fraction = static_cast<double>(omega.count_true()) /
                         (static_cast<double>(omega.height) * omega.width);
    rec.is_pan = detect_pan(flows, omega, opts.pan);
    try {
      rec.rrld = rrld_over(flows, omega);
    } catch (const NoValidPixelsError&) {
      rec.reject_reason = "no_valid_pixels";
      return;
    }
    if (rec.is_pan)
      rec.reject_reason = "pan";
    else if (*rec.rrld >= opts.rrld_threshold)
      rec.reject_reason = "rrld_above_threshold";
  });

  // Seeded per-cut selection among the qualifying candidates.
  for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
    std::vector<Candidate*> eligible;
    for (Candidate& c : candidates)
      if (c.cut_index == static_cast<int>(ci) && c.record.reject_reason.empty())
        eligible.push_back(&c);
    if (eligible.empty()) continue;
    std::seed_seq seq{opts.seed, static_cast<std::uint32_t>(cuts[ci].id)};
    std::mt19937 gen(seq);
    const std::uint32_t pick =
        detail::bounded_rand(gen, static_cast<std::uint32_t>(eligible.size()));
    for (std::size_t i = 0; i < eligible.size(); ++i) {
      if (i == pick)
        eligible[i]->record.accepted = true;
      else
        eligible[i]->record.reject_reason = "not_selected";
    }
  }

  // Emit ordered by cut, then by mid frame index.
  struct Indexed {
    int cut_index;
    int mid;
    const TripletRecord* rec;
  };
  std::vector<Indexed> order;
  for (const Candidate& c : candidates) order.push_back({c.cut_index, c.mid, &c.record});
  {
    std::size_t d = 0;
    for (std::size_t ci = 0; ci < cuts.size(); ++ci) {
      while (d < dup_records.size() && dup_records[d].cut_id == cuts[ci].id) {
        order.push_back({static_cast<int>(ci), dup_mid_index[d], &dup_records[d]});
        ++d;
      }
    }
  }
  std::stable_sort(order.begin(), order.end(), [](const Indexed& a, const Indexed& b) {
    return a.cut_index != b.cut_index ? a.cut_index < b.cut_index : a.mid < b.mid;
  });
  std::vector<TripletRecord> out;
  out.reserve(order.size());
  for (const Indexed& e : order) out.push_back(*e.rec);
  return out;
}

}  // namespace celforge
