#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "celforge/chamfer.hpp"
#include "celforge/mining.hpp"
#include "celforge/sketch.hpp"

namespace celforge {

// Pipeline configuration.  Defaults follow the constants the algorithms
// were designed around; the sigma/magnitude values are bases at a
// 540px-tall frame and scale with height where they are applied.
struct Config {
  double rrld_threshold = 0.3;
  double min_norm = 2.0;
  DogParams dog;  // sigma_base 1.0, k_ratio 1.6, t_gain 2.0, epsilon 0.01
  double nedt_tau = 15.0 / 540.0;
  int open_kernel = 5;
  PanParams pan;  // frac_min 0.5, mag_min_base 10.0, var_max 1.0
  double ssim_filter_lo = 0.75;
  double ssim_filter_hi = 0.95;
  ChamferDiameter chamfer_diameter = ChamferDiameter::Diagonal;
  int workers = 0;  // 0 = auto: CELFORGE_WORKERS env var, else logical cores
  std::uint32_t seed = 0;

  MineOptions mine_options() const {
    MineOptions opts;
    opts.rrld_threshold = rrld_threshold;
    opts.min_norm = min_norm;
    opts.pan = pan;
    opts.seed = seed;
    return opts;
  }
};

inline int resolve_workers(const Config& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("CELFORGE_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Config document: one "key = value" per line, '#' comments.
inline void apply_config_line(Config& cfg, const std::string& key, const std::string& value) {
  const auto as_double = [&] {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw FormatError("config: bad number for " + key);
  };
  const auto as_int = [&] {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(value, &pos);
      if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw FormatError("config: bad integer for " + key);
  };
  if (key == "rrld_threshold") cfg.rrld_threshold = as_double();
  else if (key == "min_norm") cfg.min_norm = as_double();
  else if (key == "dog_sigma") cfg.dog.sigma_base = as_double();
  else if (key == "dog_k_ratio") cfg.dog.k_ratio = as_double();
  else if (key == "dog_t_gain") cfg.dog.t_gain = as_double();
  else if (key == "dog_epsilon") cfg.dog.epsilon = as_double();
  else if (key == "nedt_tau") cfg.nedt_tau = as_double();
  else if (key == "open_kernel") cfg.open_kernel = as_int();
  else if (key == "pan_frac_min") cfg.pan.frac_min = as_double();
  else if (key == "pan_mag_min") cfg.pan.mag_min_base = as_double();
  else if (key == "pan_var_max") cfg.pan.var_max = as_double();
  else if (key == "ssim_filter_lo") cfg.ssim_filter_lo = as_double();
  else if (key == "ssim_filter_hi") cfg.ssim_filter_hi = as_double();
  else if (key == "workers") cfg.workers = as_int();
  else if (key == "seed") cfg.seed = static_cast<std::uint32_t>(as_int());
  else if (key == "chamfer_diameter") {
    if (value == "diagonal") cfg.chamfer_diameter = ChamferDiameter::Diagonal;
    else if (value == "maxside") cfg.chamfer_diameter = ChamferDiameter::MaxSide;
    else throw FormatError("config: chamfer_diameter must be 'diagonal' or 'maxside'");
  } else {
    throw FormatError("config: unknown key '" + key + "'");
  }
}

inline Config parse_config(const std::string& text, Config cfg = {}) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string cleaned = trim(line);
    if (cleaned.empty()) continue;
    const auto eq = cleaned.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(cleaned.substr(0, eq));
    const std::string value = trim(cleaned.substr(eq + 1));
    if (key.empty() || value.empty())
      throw FormatError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_config_line(cfg, key, value);
  }
  return cfg;
}

inline Config read_config(const std::filesystem::path& path, Config cfg = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("read_config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), cfg);
}

}  // namespace celforge
