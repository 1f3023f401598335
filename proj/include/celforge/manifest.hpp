#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "celforge/mining.hpp"

namespace celforge {

// Manifest: one JSON object per line, keys sorted, so identical record
// sets serialize to identical bytes.

inline nlohmann::json record_to_json(const TripletRecord& rec) {
  nlohmann::json j;
  j["prev"] = rec.prev;
  j["mid"] = rec.mid;
  j["next"] = rec.next;
  j["rrld"] = rec.rrld ? nlohmann::json(*rec.rrld) : nlohmann::json(nullptr);
  j["omega_fraction"] = rec.omega_fraction;
  j["is_pan"] = rec.is_pan;
  j["has_duplicate"] = rec.has_duplicate;
  j["cut_id"] = rec.cut_id;
  j["accepted"] = rec.accepted;
  j["reject_reason"] = rec.reject_reason;
  return j;
}

inline TripletRecord record_from_json(const nlohmann::json& j) {
  TripletRecord rec;
  rec.prev = j.at("prev").get<std::string>();
  rec.mid = j.at("mid").get<std::string>();
  rec.next = j.at("next").get<std::string>();
  if (!j.at("rrld").is_null()) rec.rrld = j.at("rrld").get<double>();
  rec.omega_fraction = j.at("omega_fraction").get<double>();
  rec.is_pan = j.at("is_pan").get<bool>();
  rec.has_duplicate = j.at("has_duplicate").get<bool>();
  rec.cut_id = j.at("cut_id").get<int>();
  rec.accepted = j.at("accepted").get<bool>();
  rec.reject_reason = j.at("reject_reason").get<std::string>();
  return rec;
}

inline std::string emit_manifest(const std::vector<TripletRecord>& records) {
  std::string out;
  for (const TripletRecord& rec : records) {
    out += record_to_json(rec).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<TripletRecord> parse_manifest(const std::string& text) {
  std::vector<TripletRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

inline void write_manifest(const std::vector<TripletRecord>& records,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("write_manifest: cannot open " + path.string());
  out << emit_manifest(records);
  if (!out) throw IoError("write_manifest: write failed for " + path.string());
}

inline std::vector<TripletRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_manifest: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

// Cut list: one line per cut, "cut_id,start_frame,end_frame" (inclusive,
// zero-based).  Blank lines and '#' comments are skipped.
inline std::vector<Cut> parse_cut_list(const std::string& text) {
  std::vector<Cut> cuts;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    Cut cut;
    char comma1 = 0, comma2 = 0;
    std::istringstream ls(line);
    if (!(ls >> cut.id >> comma1 >> cut.start >> comma2 >> cut.end) ||
        comma1 != ',' || comma2 != ',')
      throw FormatError("cut list line " + std::to_string(lineno) +
                        ": expected 'cut_id,start,end', got '" + line + "'");
    cuts.push_back(cut);
  }
  return cuts;
}

inline std::vector<Cut> read_cut_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_cut_list: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cut_list(buf.str());
}

// Dedup model file: four whitespace-separated numbers,
// bias w_mean w_max threshold.
inline void write_dedup_model(const DedupModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("write_dedup_model: cannot open " + path.string());
  out.precision(17);
  out << model.bias << ' ' << model.w_mean << ' ' << model.w_max << ' '
      << model.threshold << '\n';
  if (!out) throw IoError("write_dedup_model: write failed for " + path.string());
}

inline DedupModel read_dedup_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_dedup_model: cannot open " + path.string());
  DedupModel model;
  if (!(in >> model.bias >> model.w_mean >> model.w_max >> model.threshold))
    throw FormatError("read_dedup_model: " + path.string() + ": expected 4 numbers");
  return model;
}

}  // namespace celforge
