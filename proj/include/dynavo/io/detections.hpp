// Object detections ingested from JSONL sidecar files, replacing an online
// detector. Masks travel as uncompressed run-length counts (zeros first),
// row-major over the bbox grid or the full image grid.
#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynavo/core/image.hpp"

namespace dynavo {

struct DetectionMask {
  bool image_scope = false;  // false: grid covers the rounded bbox
  int width = 0, height = 0;
  std::vector<uint8_t> bits;
};

struct Detection {
  std::string class_name;
  double confidence = 0.0;
  double x = 0, y = 0, w = 0, h = 0;  // bbox, pixels
  bool dynamic_prior = false;
  std::optional<DetectionMask> mask;

  double area() const { return w * h; }
  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
};

inline std::vector<uint8_t> decode_rle(const std::string& rle, size_t expected) {
  std::vector<uint8_t> bits;
  bits.reserve(expected);
  uint8_t value = 0;  // runs alternate starting with zeros
  std::stringstream ss(rle);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    long run = std::stol(tok);
    if (run < 0) throw std::runtime_error("negative RLE run");
    bits.insert(bits.end(), static_cast<size_t>(run), value);
    value ^= 1;
  }
  if (bits.size() != expected)
    throw std::runtime_error("RLE length mismatch: got " + std::to_string(bits.size()) +
                             ", expected " + std::to_string(expected));
  return bits;
}

inline std::string encode_rle(const std::vector<uint8_t>& bits) {
  std::string out;
  size_t i = 0;
  uint8_t value = 0;
  while (i < bits.size()) {
    size_t run = 0;
    while (i < bits.size() && (bits[i] != 0) == (value != 0)) {
      ++run;
      ++i;
    }
    if (!out.empty()) out += ',';
    out += std::to_string(run);
    value ^= 1;
  }
  return out;
}

// Clamp the bbox to the image; detections fully outside collapse to zero area.
inline void clamp_to_image(Detection& det, int width, int height) {
  const double x0 = std::clamp(det.x, 0.0, static_cast<double>(width));
  const double y0 = std::clamp(det.y, 0.0, static_cast<double>(height));
  const double x1 = std::clamp(det.x + det.w, 0.0, static_cast<double>(width));
  const double y1 = std::clamp(det.y + det.h, 0.0, static_cast<double>(height));
  det.x = x0;
  det.y = y0;
  det.w = std::max(0.0, x1 - x0);
  det.h = std::max(0.0, y1 - y0);
}

inline double bbox_iou(const Detection& a, const Detection& b) {
  const double x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
  const double x1 = std::min(a.x + a.w, b.x + b.w);
  const double y1 = std::min(a.y + a.h, b.y + b.h);
  const double inter = std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

// Rasterize into an image-sized binary grid (mask when present, else bbox).
inline void paint_detection(const Detection& det, BinaryMask& out) {
  const int W = out.width(), H = out.height();
  if (det.mask && det.mask->image_scope) {
    const auto& m = *det.mask;
    const int w = std::min(W, m.width), h = std::min(H, m.height);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (m.bits[static_cast<size_t>(y) * m.width + x]) out.set(x, y);
    return;
  }
  const int bx = static_cast<int>(std::floor(det.x));
  const int by = static_cast<int>(std::floor(det.y));
  const int bw = static_cast<int>(std::ceil(det.w));
  const int bh = static_cast<int>(std::ceil(det.h));
  for (int y = 0; y < bh; ++y) {
    const int iy = by + y;
    if (iy < 0 || iy >= H) continue;
    for (int x = 0; x < bw; ++x) {
      const int ix = bx + x;
      if (ix < 0 || ix >= W) continue;
      if (det.mask) {
        const auto& m = *det.mask;
        if (y >= m.height || x >= m.width) continue;
        if (!m.bits[static_cast<size_t>(y) * m.width + x]) continue;
      }
      out.set(ix, iy);
    }
  }
}

}  // namespace dynavo
