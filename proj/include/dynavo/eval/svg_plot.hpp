// Top-down (x/y) trajectory comparison plot: ground truth in black,
// estimate in blue, per-frame difference segments in red.
#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynavo/eval/metrics.hpp"

namespace dynavo {

inline void write_trajectory_svg(const std::string& path,
                                 const std::vector<MatchedPose>& pairs,
                                 const RigidAlignment& alignment,
                                 int size_px = 800) {
  if (pairs.empty()) throw std::invalid_argument("write_trajectory_svg: no poses");

  std::vector<Vec3> est;
  est.reserve(pairs.size());
  for (const auto& p : pairs) est.push_back(alignment.apply(p.est.translation()));

  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  auto grow = [&](const Vec3& p) {
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  };
  for (const auto& p : pairs) grow(p.gt.translation());
  for (const auto& p : est) grow(p);
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
  const double margin = 0.08 * span;
  const double scale = size_px / (span + 2 * margin);

  struct Px {
    double x, y;
  };
  auto to_px = [&](const Vec3& p) {
    return Px{(p.x() - min_x + margin) * scale, size_px - (p.y() - min_y + margin) * scale};
  };
  char buf[128];

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SVG file: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\""
      << size_px << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // difference segments first so the curves draw over them
  out << "<g stroke=\"#d62728\" stroke-width=\"0.6\" opacity=\"0.7\">\n";
  for (size_t i = 0; i < pairs.size(); ++i) {
    const Px a = to_px(est[i]);
    const Px b = to_px(pairs[i].gt.translation());
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>\n", a.x, a.y,
                  b.x, b.y);
    out << buf;
  }
  out << "</g>\n";

  auto polyline = [&](const char* color, auto&& point_at) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < pairs.size(); ++i) {
      const Px p = point_at(i);
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", p.x, p.y);
      out << buf;
    }
    out << "\"/>\n";
  };
  polyline("black", [&](size_t i) { return to_px(pairs[i].gt.translation()); });
  polyline("#1f77b4", [&](size_t i) { return to_px(est[i]); });

  out << "<text x=\"10\" y=\"20\" font-size=\"14\">ground truth (black), estimate (blue), "
         "difference (red)</text>\n"
      << "</svg>\n";
}

}  // namespace dynavo
