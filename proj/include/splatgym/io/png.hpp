// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "splatgym/core/error.hpp"

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <csetjmp>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace splatgym {

/// Decoded PNG samples, row-major, `channels` per pixel. 16-bit samples are
/// host-order values in `samples16`.
struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> samples8;
  std::vector<std::uint16_t> samples16;
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp to png_jmpbuf; nothing with a destructor
// may live between setjmp and the libpng calls below.
inline bool write_png_rows(std::FILE* fp, int width, int height, int color_type, int bit_depth,
                           const std::uint8_t* rows_base, std::size_t row_bytes) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // host little-endian -> PNG big-endian
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rows_base + static_cast<std::size_t>(y) * row_bytes));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

inline void write_png(const std::string& path, int width, int height, int color_type, int bit_depth,
                      const std::uint8_t* rows_base, std::size_t row_bytes) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write '" + path + "'");
  if (!write_png_rows(fp.get(), width, height, color_type, bit_depth, rows_base, row_bytes))
    throw IoError("png: failed to encode '" + path + "'");
}

struct RawPng {
  int width = 0, height = 0, channels = 0, bit_depth = 0;
  std::size_t row_bytes = 0;
};

inline bool read_png_header(std::FILE* fp, png_structp& png, png_infop& info, RawPng& out) {
  png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.channels = png_get_channels(png, info);
  if (out.bit_depth == 16) png_set_swap(png);
  if (out.bit_depth < 8) {
    png_set_packing(png);
    out.bit_depth = 8;
  }
  png_read_update_info(png, info);
  out.row_bytes = png_get_rowbytes(png, info);
  return true;
}

inline bool read_png_rows(png_structp& png, png_infop& info, const RawPng& hdr, std::uint8_t* dst) {
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  for (int y = 0; y < hdr.height; ++y) png_read_row(png, dst + static_cast<std::size_t>(y) * hdr.row_bytes, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace detail

/// 8-bit RGB, `rgb` holds H x W x 3 bytes.
inline void write_png_rgb8(const std::string& path, int width, int height, std::span<const std::uint8_t> rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw ConfigError("write_png_rgb8: size mismatch");
  detail::write_png(path, width, height, PNG_COLOR_TYPE_RGB, 8, rgb.data(), static_cast<std::size_t>(width) * 3);
}

/// 16-bit grayscale.
inline void write_png_gray16(const std::string& path, int width, int height, std::span<const std::uint16_t> gray) {
  if (gray.size() != static_cast<std::size_t>(width) * height) throw ConfigError("write_png_gray16: size mismatch");
  detail::write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 16, reinterpret_cast<const std::uint8_t*>(gray.data()),
                    static_cast<std::size_t>(width) * 2);
}

/// Depth mapped linearly onto [1, 65535] by `max_depth`; pixels with no
/// coverage (alpha == 0) or non-positive depth become 0.
inline std::vector<std::uint16_t> normalize_depth16(std::span<const float> depth, std::span<const float> alpha,
                                                    float max_depth) {
  std::vector<std::uint16_t> out(depth.size(), 0);
  if (!(max_depth > 0.0f)) return out;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!(alpha[i] > 0.0f) || !(depth[i] > 0.0f)) continue;
    const double v = std::min(1.0, static_cast<double>(depth[i]) / max_depth);
    out[i] = static_cast<std::uint16_t>(std::max(1.0, std::round(v * 65535.0)));
  }
  return out;
}

inline PngImage read_png(const std::string& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open '" + path + "'");
  png_structp png = nullptr;
  png_infop info = nullptr;
  detail::RawPng hdr;
  if (!detail::read_png_header(fp.get(), png, info, hdr)) throw IoError("png: cannot decode header of '" + path + "'");
  std::vector<std::uint8_t> raw(hdr.row_bytes * static_cast<std::size_t>(hdr.height));
  if (!detail::read_png_rows(png, info, hdr, raw.data())) throw IoError("png: cannot decode '" + path + "'");
  PngImage img;
  img.width = hdr.width;
  img.height = hdr.height;
  img.channels = hdr.channels;
  img.bit_depth = hdr.bit_depth;
  if (img.bit_depth == 16) {
    img.samples16.resize(raw.size() / 2);
    std::memcpy(img.samples16.data(), raw.data(), raw.size());
  } else {
    img.samples8 = std::move(raw);
  }
  return img;
}

}  // namespace splatgym
