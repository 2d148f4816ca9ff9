// Shi-Tomasi corner response: minimum eigenvalue of the 2x2 structure
// tensor accumulated over a 3x3 window of image gradients.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dynavo/core/image.hpp"

namespace dynavo {

inline Image2D corner_response(const Image2D& img) {
  const int w = img.width(), h = img.height();
  if (w < 7 || h < 7) throw std::invalid_argument("corner_response: image smaller than 7x7");
  auto [gx, gy] = gradient(img);
  Image2D resp(w, h, 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      double sxx = 0, sxy = 0, syy = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const double ix = gx.at(x + dx, y + dy);
          const double iy = gy.at(x + dx, y + dy);
          sxx += ix * ix;
          sxy += ix * iy;
          syy += iy * iy;
        }
      const double tr = 0.5 * (sxx + syy);
      const double det = sxx * syy - sxy * sxy;
      const double disc = std::sqrt(std::max(0.0, tr * tr - det));
      resp.at(x, y) = std::max(0.0, tr - disc);
    }
  }
  return resp;
}

struct CornerPoint {
  double x, y;
  double response;
};

// Local-maximum corners sorted by response, greedily spaced min_dist apart.
inline std::vector<CornerPoint> detect_corners(const Image2D& response, int max_corners,
                                               double min_response, double min_dist) {
  std::vector<CornerPoint> cands;
  const int w = response.width(), h = response.height();
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double r = response.at(x, y);
      if (r < min_response) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (response.at(x + dx, y + dy) > r) {
            is_max = false;
            break;
          }
        }
      if (is_max) cands.push_back({static_cast<double>(x), static_cast<double>(y), r});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const CornerPoint& a, const CornerPoint& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  std::vector<CornerPoint> out;
  const double d2 = min_dist * min_dist;
  for (const auto& c : cands) {
    if (static_cast<int>(out.size()) >= max_corners) break;
    bool ok = true;
    for (const auto& o : out) {
      const double dx = c.x - o.x, dy = c.y - o.y;
      if (dx * dx + dy * dy < d2) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(c);
  }
  return out;
}

}  // namespace dynavo
