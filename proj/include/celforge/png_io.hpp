#pragma once

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <vector>

#include "celforge/image.hpp"

namespace celforge {

// 8-bit PNG -> ImageF32 with values/255.0 exactly.  Grayscale files are
// expanded to RGB.  Decoded as RGBA and the alpha channel discarded, so
// transparency is dropped rather than composited.
inline ImageF32 read_png(const std::filesystem::path& path) {
  png_image pimg{};
  pimg.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pimg, path.string().c_str())) {
    const std::string msg = pimg.message;
    if (!std::filesystem::exists(path))
      throw IoError("read_png: " + path.string() + ": " + msg);
    throw FormatError("read_png: " + path.string() + ": " + msg);
  }
  pimg.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(pimg));
  if (!png_image_finish_read(&pimg, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = pimg.message;
    png_image_free(&pimg);
    throw FormatError("read_png: " + path.string() + ": " + msg);
  }
  ImageF32 out(static_cast<int>(pimg.height), static_cast<int>(pimg.width), 3);
  const std::size_t plane = out.plane_size();
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c)
      out.data[plane * c + i] = buffer[i * 4 + c] / 255.0f;
  return out;
}

// ImageF32 (1 or 3 channels) -> 8-bit PNG; value*255 rounded, clamped to [0,1].
inline void write_png(const ImageF32& img, const std::filesystem::path& path) {
  if (img.channels != 1 && img.channels != 3)
    throw InvalidInput("write_png: expected 1 or 3 channels, got " + img.shape_string());
  png_image pimg{};
  pimg.version = PNG_IMAGE_VERSION;
  pimg.width = static_cast<png_uint_32>(img.width);
  pimg.height = static_cast<png_uint_32>(img.height);
  pimg.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(img.height) * img.width * img.channels);
  const std::size_t plane = img.plane_size();
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < img.channels; ++c) {
      float v = img.data[plane * c + i];
      v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
      buffer[i * img.channels + c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
  if (!png_image_write_to_file(&pimg, path.string().c_str(), 0, buffer.data(), 0, nullptr))
    throw IoError("write_png: " + path.string() + ": " + pimg.message);
}

}  // namespace celforge
