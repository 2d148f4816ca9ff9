// Image pyramids for coarse-to-fine alignment. Depth pyramids exclude
// invalid pixels from the 2x2 box filter; an all-invalid block stays invalid.
#pragma once

#include <stdexcept>
#include <vector>

#include "dynavo/core/image.hpp"

namespace dynavo {

enum class PyramidKind { Intensity, Depth };

struct Pyramid {
  std::vector<Image2D> levels;  // level 0 = full resolution

  int num_levels() const { return static_cast<int>(levels.size()); }
  const Image2D& level(int i) const { return levels[i]; }
};

inline Image2D downsample_box2(const Image2D& src, PyramidKind kind) {
  const int w = src.width() / 2, h = src.height() / 2;
  Image2D dst(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v00 = src.at(2 * x, 2 * y), v10 = src.at(2 * x + 1, 2 * y);
      const double v01 = src.at(2 * x, 2 * y + 1), v11 = src.at(2 * x + 1, 2 * y + 1);
      if (kind == PyramidKind::Intensity) {
        dst.at(x, y) = 0.25 * (v00 + v10 + v01 + v11);
      } else {
        double sum = 0.0;
        int n = 0;
        for (double v : {v00, v10, v01, v11}) {
          if (is_valid_depth(v)) {
            sum += v;
            ++n;
          }
        }
        dst.at(x, y) = n > 0 ? sum / n : 0.0;
      }
    }
  }
  return dst;
}

inline Pyramid build_pyramid(const Image2D& img, int levels,
                             PyramidKind kind = PyramidKind::Intensity) {
  if (levels < 1) throw std::invalid_argument("build_pyramid: levels must be >= 1");
  const int coarse_w = img.width() >> (levels - 1);
  const int coarse_h = img.height() >> (levels - 1);
  if (coarse_w < 8 || coarse_h < 8)
    throw std::invalid_argument("build_pyramid: too many levels for image size");
  Pyramid pyr;
  pyr.levels.reserve(levels);
  pyr.levels.push_back(img);
  for (int i = 1; i < levels; ++i)
    pyr.levels.push_back(downsample_box2(pyr.levels.back(), kind));
  return pyr;
}

inline BinaryMask downsample_mask2(const BinaryMask& src) {
  const int w = src.width() / 2, h = src.height() / 2;
  BinaryMask dst(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const uint8_t any = src.at(2 * x, 2 * y) | src.at(2 * x + 1, 2 * y) |
                          src.at(2 * x, 2 * y + 1) | src.at(2 * x + 1, 2 * y + 1);
      dst.set(x, y, any ? 1 : 0);
    }
  return dst;
}

}  // namespace dynavo
