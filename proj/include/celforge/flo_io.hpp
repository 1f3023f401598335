#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "celforge/flow.hpp"

namespace celforge {

// Middlebury .flo layout, little-endian:
//   float32 magic (202021.25), int32 width, int32 height,
//   then height*width interleaved (u, v) float32 pairs, row-major.
inline constexpr float kFloMagic = 202021.25f;

inline FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_flo: cannot open " + path.string());
  float magic = 0.0f;
  std::int32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&magic), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || magic != kFloMagic)
    throw FormatError("read_flo: " + path.string() + ": bad magic");
  if (w < 1 || h < 1)
    throw FormatError("read_flo: " + path.string() + ": bad dimensions");
  FlowField flow(h, w);
  std::vector<float> inter(static_cast<std::size_t>(h) * w * 2);
  in.read(reinterpret_cast<char*>(inter.data()), static_cast<std::streamsize>(inter.size() * 4));
  if (in.gcount() != static_cast<std::streamsize>(inter.size() * 4))
    throw FormatError("read_flo: " + path.string() + ": truncated payload");
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (std::size_t i = 0; i < plane; ++i) {
    flow.img.data[i] = inter[i * 2];
    flow.img.data[plane + i] = inter[i * 2 + 1];
  }
  return flow;
}

inline void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  if (!flow.img.all_finite())
    throw InvalidInput("write_flo: flow contains non-finite values");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_flo: cannot open " + path.string());
  const float magic = kFloMagic;
  const std::int32_t w = flow.width(), h = flow.height();
  out.write(reinterpret_cast<const char*>(&magic), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<float> inter(plane * 2);
  for (std::size_t i = 0; i < plane; ++i) {
    inter[i * 2] = flow.img.data[i];
    inter[i * 2 + 1] = flow.img.data[plane + i];
  }
  out.write(reinterpret_cast<const char*>(inter.data()), static_cast<std::streamsize>(inter.size() * 4));
  if (!out) throw IoError("write_flo: write failed for " + path.string());
}

}  // namespace celforge
