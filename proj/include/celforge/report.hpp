#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "celforge/metrics.hpp"

namespace celforge {

namespace detail {

inline std::string psnr_to_string(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

}  // namespace detail

// Line-delimited report: one JSON object per sample row, then one per
// aggregate row (kind = "sample" / "aggregate").
inline std::string emit_report(const MetricReport& report) {
  std::string out;
  for (const MetricRow& row : report.rows) {
    nlohmann::json j;
    j["kind"] = "sample";
    j["sample_id"] = row.sample_id;
    j["cd"] = row.cd ? nlohmann::json(*row.cd) : nlohmann::json(nullptr);
    j["psnr"] = std::isinf(row.psnr) ? nlohmann::json("inf") : nlohmann::json(row.psnr);
    j["ssim"] = row.ssim;
    j["tags"] = row.tags;
    out += j.dump();
    out += '\n';
  }
  for (const MetricAggregate& agg : report.aggregates) {
    nlohmann::json j;
    j["kind"] = "aggregate";
    j["tag"] = agg.tag;
    j["count"] = agg.count;
    j["mean_cd"] = agg.mean_cd ? nlohmann::json(*agg.mean_cd) : nlohmann::json(nullptr);
    j["mean_psnr"] = agg.mean_psnr ? nlohmann::json(*agg.mean_psnr) : nlohmann::json(nullptr);
    j["mean_ssim"] = agg.mean_ssim ? nlohmann::json(*agg.mean_ssim) : nlohmann::json(nullptr);
    j["cd_missing"] = agg.cd_missing;
    j["psnr_inf"] = agg.psnr_inf;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline void write_report(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("write_report: cannot open " + path.string());
  out << emit_report(report);
  if (!out) throw IoError("write_report: write failed for " + path.string());
}

// Human-readable aligned table; CD is displayed scaled by 1e5 to match
// the usual presentation of these values.
inline std::string format_report_table(const MetricReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(24) << "tag" << std::right << std::setw(8) << "count"
     << std::setw(12) << "CD(x1e5)" << std::setw(12) << "PSNR" << std::setw(12) << "SSIM"
     << '\n';
  for (const MetricAggregate& agg : report.aggregates) {
    os << std::left << std::setw(24) << agg.tag << std::right << std::setw(8) << agg.count;
    if (agg.mean_cd)
      os << std::setw(12) << std::fixed << std::setprecision(3) << *agg.mean_cd * kCdDisplayScale;
    else
      os << std::setw(12) << "-";
    if (agg.mean_psnr)
      os << std::setw(12) << std::fixed << std::setprecision(3) << *agg.mean_psnr;
    else
      os << std::setw(12) << "-";
    if (agg.mean_ssim)
      os << std::setw(12) << std::fixed << std::setprecision(4) << *agg.mean_ssim;
    else
      os << std::setw(12) << "-";
    os << '\n';
  }
  return os.str();
}

}  // namespace celforge
