// PNG readers/writers for the TUM on-disk layout: 8-bit color images are
// reduced to [0,1] intensity, 16-bit depth maps convert raw/depth_scale to
// meters with raw 0 meaning no measurement.
#pragma once

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynavo/core/image.hpp"

namespace dynavo {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

inline void read_png_rows(const std::string& path, PngReader& r,
                          std::vector<std::vector<png_byte>>& rows, FilePtr& fp) {
  fp.reset(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open PNG file: " + path);
  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw std::runtime_error("not a PNG file: " + path);

  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) throw std::runtime_error("png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) throw std::runtime_error("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(r.png))) throw std::runtime_error("PNG decode error: " + path);

  png_init_io(r.png, fp.get());
  png_set_sig_bytes(r.png, 8);
  png_read_info(r.png, r.info);

  const int h = png_get_image_height(r.png, r.info);
  png_read_update_info(r.png, r.info);
  const size_t rowbytes = png_get_rowbytes(r.png, r.info);
  rows.assign(h, std::vector<png_byte>(rowbytes));
  std::vector<png_bytep> ptrs(h);
  for (int y = 0; y < h; ++y) ptrs[y] = rows[y].data();
  png_read_image(r.png, ptrs.data());
  png_read_end(r.png, nullptr);
}

}  // namespace detail

// 16-bit single-channel PNG -> depth in meters.
inline Image2D load_depth_png(const std::string& path, double depth_scale) {
  detail::PngReader r;
  detail::FilePtr fp;
  std::vector<std::vector<png_byte>> rows;
  detail::read_png_rows(path, r, rows, fp);
  const int w = png_get_image_width(r.png, r.info);
  const int h = png_get_image_height(r.png, r.info);
  if (png_get_bit_depth(r.png, r.info) != 16 ||
      png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY)
    throw std::runtime_error("depth PNG must be 16-bit grayscale: " + path);
  Image2D img(w, h);
  for (int y = 0; y < h; ++y) {
    const png_byte* row = rows[y].data();
    for (int x = 0; x < w; ++x) {
      const uint16_t raw = static_cast<uint16_t>(row[2 * x] << 8) | row[2 * x + 1];
      img.at(x, y) = raw == 0 ? 0.0 : raw / depth_scale;
    }
  }
  return img;
}

// 8-bit gray/RGB/RGBA PNG -> intensity in [0,1] (Rec.601 luma for color).
inline Image2D load_intensity_png(const std::string& path) {
  detail::PngReader r;
  detail::FilePtr fp;
  std::vector<std::vector<png_byte>> rows;
  detail::read_png_rows(path, r, rows, fp);
  const int w = png_get_image_width(r.png, r.info);
  const int h = png_get_image_height(r.png, r.info);
  const int depth = png_get_bit_depth(r.png, r.info);
  const int color = png_get_color_type(r.png, r.info);
  if (depth != 8)
    throw std::runtime_error("color PNG must be 8-bit: " + path);
  int channels = 0;
  switch (color) {
    case PNG_COLOR_TYPE_GRAY: channels = 1; break;
    case PNG_COLOR_TYPE_RGB: channels = 3; break;
    case PNG_COLOR_TYPE_RGB_ALPHA: channels = 4; break;
    default: throw std::runtime_error("unsupported PNG color type: " + path);
  }
  Image2D img(w, h);
  for (int y = 0; y < h; ++y) {
    const png_byte* row = rows[y].data();
    for (int x = 0; x < w; ++x) {
      double v;
      if (channels == 1) {
        v = row[x] / 255.0;
      } else {
        const png_byte* p = row + channels * x;
        v = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
      }
      img.at(x, y) = v;
    }
  }
  return img;
}

inline void write_depth_png(const std::string& path, const Image2D& depth_m,
                            double depth_scale) {
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write PNG file: " + path);
  detail::PngWriter w;
  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  w.info = png_create_info_struct(w.png);
  if (setjmp(png_jmpbuf(w.png))) throw std::runtime_error("PNG encode error: " + path);
  png_init_io(w.png, fp.get());
  png_set_IHDR(w.png, w.info, depth_m.width(), depth_m.height(), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  std::vector<png_byte> row(2 * depth_m.width());
  for (int y = 0; y < depth_m.height(); ++y) {
    for (int x = 0; x < depth_m.width(); ++x) {
      double raw = 0.0;
      if (is_valid_depth(depth_m.at(x, y))) raw = depth_m.at(x, y) * depth_scale + 0.5;
      uint16_t q = raw <= 0.0 ? 0 : (raw >= 65535.0 ? 65535 : static_cast<uint16_t>(raw));
      row[2 * x] = static_cast<png_byte>(q >> 8);
      row[2 * x + 1] = static_cast<png_byte>(q & 0xff);
    }
    png_write_row(w.png, row.data());
  }
  png_write_end(w.png, nullptr);
}

inline void write_intensity_png(const std::string& path, const Image2D& intensity) {
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write PNG file: " + path);
  detail::PngWriter w;
  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  w.info = png_create_info_struct(w.png);
  if (setjmp(png_jmpbuf(w.png))) throw std::runtime_error("PNG encode error: " + path);
  png_init_io(w.png, fp.get());
  png_set_IHDR(w.png, w.info, intensity.width(), intensity.height(), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  std::vector<png_byte> row(3 * intensity.width());
  for (int y = 0; y < intensity.height(); ++y) {
    for (int x = 0; x < intensity.width(); ++x) {
      double v = intensity.at(x, y);
      v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      const png_byte q = static_cast<png_byte>(v * 255.0 + 0.5);
      row[3 * x] = row[3 * x + 1] = row[3 * x + 2] = q;
    }
    png_write_row(w.png, row.data());
  }
  png_write_end(w.png, nullptr);
}

}  // namespace dynavo
