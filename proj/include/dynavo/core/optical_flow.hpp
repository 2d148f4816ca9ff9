// Pyramidal Lucas-Kanade optical flow on sparse sample points.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dynavo/core/image.hpp"
#include "dynavo/core/pyramid.hpp"
#include "dynavo/core/se3.hpp"

namespace dynavo {

struct FlowField {
  std::vector<Vec2> points;
  std::vector<Vec2> flow;
  std::vector<uint8_t> valid;

  size_t size() const { return points.size(); }
};

struct LkConfig {
  int window = 11;        // odd window side
  int max_iters = 10;     // per pyramid level
  double eps = 0.01;      // convergence step, pixels
  double min_eig = 1e-4;  // structure-tensor singularity gate
};

inline std::vector<Vec2> make_grid_points(int width, int height, int step) {
  std::vector<Vec2> pts;
  for (int y = step / 2; y < height; y += step)
    for (int x = step / 2; x < width; x += step)
      pts.emplace_back(x, y);
  return pts;
}

inline FlowField lk_flow(const Pyramid& prev, const Pyramid& next,
                         const std::vector<Vec2>& points, const LkConfig& cfg = {}) {
  if (prev.num_levels() != next.num_levels())
    throw std::invalid_argument("lk_flow: mismatched pyramid shapes");
  for (int l = 0; l < prev.num_levels(); ++l)
    if (prev.level(l).width() != next.level(l).width() ||
        prev.level(l).height() != next.level(l).height())
      throw std::invalid_argument("lk_flow: mismatched pyramid shapes");

  const int L = prev.num_levels();
  std::vector<Image2D> gx(L), gy(L);
  for (int l = 0; l < L; ++l) {
    auto g = gradient(prev.level(l));
    gx[l] = std::move(g.first);
    gy[l] = std::move(g.second);
  }

  // pixel center mapping between levels matches the 2x2 box downsample
  std::vector<double> scale(L, 1.0), offset(L, 0.0);
  for (int l = 1; l < L; ++l) {
    scale[l] = scale[l - 1] * 0.5;
    offset[l] = offset[l - 1] * 0.5 - 0.25;
  }

  const int hw = cfg.window / 2;
  FlowField field;
  field.points = points;
  field.flow.assign(points.size(), Vec2::Zero());
  field.valid.assign(points.size(), 0);

  const int n_win = cfg.window * cfg.window;
  std::vector<double> wx(n_win), wy(n_win), wI(n_win), wgx(n_win), wgy(n_win);

  for (size_t i = 0; i < points.size(); ++i) {
    Vec2 d = Vec2::Zero();  // displacement at current level
    bool ok = true;
    for (int l = L - 1; l >= 0 && ok; --l) {
      const Image2D& ip = prev.level(l);
      const Image2D& in = next.level(l);
      const Vec2 p = points[i] * scale[l] + Vec2(offset[l], offset[l]);

      // gather the fixed window of the previous image
      int k = 0;
      double sxx = 0, sxy = 0, syy = 0;
      for (int dy = -hw; dy <= hw && ok; ++dy) {
        for (int dx = -hw; dx <= hw; ++dx, ++k) {
          const double x = p.x() + dx, y = p.y() + dy;
          auto v = sample_bilinear(ip, x, y);
          auto gxv = sample_bilinear(gx[l], x, y);
          auto gyv = sample_bilinear(gy[l], x, y);
          if (!v || !gxv || !gyv) {
            ok = false;
            break;
          }
          wx[k] = x;
          wy[k] = y;
          wI[k] = *v;
          wgx[k] = *gxv;
          wgy[k] = *gyv;
          sxx += *gxv * *gxv;
          sxy += *gxv * *gyv;
          syy += *gyv * *gyv;
        }
      }
      if (!ok) break;

      const double tr = 0.5 * (sxx + syy);
      const double det = sxx * syy - sxy * sxy;
      const double min_eig = tr - std::sqrt(std::max(0.0, tr * tr - det));
      if (min_eig < cfg.min_eig) {
        ok = false;
        break;
      }
      const double inv_det = 1.0 / det;

      for (int it = 0; it < cfg.max_iters; ++it) {
        double bx = 0, by = 0;
        for (k = 0; k < n_win; ++k) {
          auto v = sample_bilinear(in, wx[k] + d.x(), wy[k] + d.y());
          if (!v) {
            ok = false;
            break;
          }
          const double di = wI[k] - *v;
          bx += di * wgx[k];
          by += di * wgy[k];
        }
        if (!ok) break;
        const Vec2 step(inv_det * (syy * bx - sxy * by),
                        inv_det * (sxx * by - sxy * bx));
        d += step;
        if (step.norm() < cfg.eps) break;
      }
      if (ok && l > 0) d *= 2.0;
    }
    if (ok) {
      field.flow[i] = d;
      field.valid[i] = 1;
    }
  }
  return field;
}

}  // namespace dynavo
