// Per-frame GOOD/BAD gating: change residuals against the benchmark frame,
// dynamic-ratio reweighting, scenario boosts, and benchmark updates.
//
// The final score uses W_change * (1 - S_change): the change score grows
// with deviation, so low deviation must raise the score for the GOOD
// threshold to gate degraded frames.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynavo/core/image.hpp"
#include "dynavo/core/optical_flow.hpp"
#include "dynavo/io/detections.hpp"
#include "dynavo/quality/frame_quality.hpp"

namespace dynavo {

struct ChangeWeights {
  double w_mc = 0.4;
  double w_dc = 0.3;
  double w_dec = 0.3;

  void validate() const {
    if (w_mc < 0 || w_dc < 0 || w_dec < 0)
      throw std::invalid_argument("change weights must be non-negative");
    if (std::abs(w_mc + w_dc + w_dec - 1.0) > 1e-9)
      throw std::invalid_argument("change weights must sum to 1");
  }
};

struct ChangeReport {
  double s_mc = 0.0;
  double s_dc = 0.0;
  double s_dec = 0.0;
  double s_change = 0.0;
};

struct ResidualSaturation {
  double mc_sat = 5.0;  // px
  double dc_sat = 0.5;  // m
};

enum class Scenario { None, HighlyStatic, HighlyDynamic, HighConfidence };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::HighlyStatic: return "highly_static";
    case Scenario::HighlyDynamic: return "highly_dynamic";
    case Scenario::HighConfidence: return "high_confidence";
    default: return "none";
  }
}

struct DecisionConfig {
  double w_base0 = 0.6;
  double a = 0.5;  // robust factor on the dynamic ratio
  double th_static = 0.1;
  double th_dynamic = 0.5;
  double s_static = 0.6;  // min feature quality for the static boost
  double th_obj = 0.8;
  double th_differ = 0.3;
  double boost_static = 1.2;
  double boost_conf = 1.2;

  void validate() const {
    if (!(th_static >= 0 && th_static < th_dynamic && th_dynamic <= 1.0))
      throw std::invalid_argument("need 0 <= th_static < th_dynamic <= 1");
    for (double v : {w_base0, s_static, th_obj, th_differ})
      if (v < 0.0 || v > 1.0) throw std::invalid_argument("decision thresholds must be in [0,1]");
    if (boost_static < 1.0 || boost_conf < 1.0)
      throw std::invalid_argument("boost factors must be >= 1");
  }
};

struct SceneDecision {
  double s_final = 0.0;
  bool good = false;
  double w_base_used = 0.0;
  double w_change_used = 0.0;
  Scenario scenario = Scenario::None;
};

// Point-level plus grid-level flow deviation, saturated into [0,1].
// No mutually valid samples means the comparison is impossible: return 1.
inline double motion_residual(const FlowField& flow_cur, const FlowField& flow_ref,
                              int width, int height, const ResidualSaturation& sat = {},
                              int grid = 8) {
  if (flow_cur.size() != flow_ref.size())
    throw std::invalid_argument("motion_residual: flow fields sampled on different grids");
  for (size_t i = 0; i < flow_cur.size(); ++i)
    if (flow_cur.points[i] != flow_ref.points[i])
      throw std::invalid_argument("motion_residual: flow fields sampled on different grids");

  double point_sum = 0.0;
  size_t point_n = 0;
  std::vector<double> cell_sum(grid * grid, 0.0);
  std::vector<int> cell_n(grid * grid, 0);
  const double cw = static_cast<double>(width) / grid;
  const double ch = static_cast<double>(height) / grid;

  for (size_t i = 0; i < flow_cur.size(); ++i) {
    if (!flow_cur.valid[i] || !flow_ref.valid[i]) continue;
    const double dev = (flow_cur.flow[i] - flow_ref.flow[i]).norm();
    point_sum += dev;
    ++point_n;
    const int cx = std::min(grid - 1, static_cast<int>(flow_cur.points[i].x() / cw));
    const int cy = std::min(grid - 1, static_cast<int>(flow_cur.points[i].y() / ch));
    cell_sum[cy * grid + cx] += dev;
    ++cell_n[cy * grid + cx];
  }
  if (point_n == 0) return 1.0;

  const double point_term = point_sum / point_n;
  double grid_sum = 0.0;
  int grid_cells = 0;
  for (int c = 0; c < grid * grid; ++c) {
    if (cell_n[c] < 3) continue;
    grid_sum += cell_sum[c] / cell_n[c];
    ++grid_cells;
  }
  const double grid_term = grid_cells > 0 ? grid_sum / grid_cells : point_term;
  return std::clamp(0.5 * (point_term + grid_term) / sat.mc_sat, 0.0, 1.0);
}

inline double depth_residual(const Image2D& depth_cur, const Image2D& depth_ref,
                             const ResidualSaturation& sat = {}) {
  if (depth_cur.width() != depth_ref.width() || depth_cur.height() != depth_ref.height())
    throw std::invalid_argument("depth_residual: dimension mismatch");
  double sum = 0.0, sum2 = 0.0;
  size_t n = 0;
  for (int y = 0; y < depth_cur.height(); ++y)
    for (int x = 0; x < depth_cur.width(); ++x) {
      const double a = depth_cur.at(x, y), b = depth_ref.at(x, y);
      if (!is_valid_depth(a) || !is_valid_depth(b)) continue;
      const double d = std::abs(a - b);
      sum += d;
      sum2 += d * d;
      ++n;
    }
  if (n == 0) return 1.0;
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return std::clamp(0.5 * (mean + std::sqrt(var)) / sat.dc_sat, 0.0, 1.0);
}

// Count change plus IoU change over greedy same-class matches.
inline double detection_residual(const std::vector<Detection>& dets_cur,
                                 const std::vector<Detection>& dets_ref) {
  const size_t nc = dets_cur.size(), nr = dets_ref.size();
  if (nc == 0 && nr == 0) return 0.0;
  const double count_term =
      std::abs(static_cast<double>(nc) - static_cast<double>(nr)) /
      std::max<double>({static_cast<double>(nc), static_cast<double>(nr), 1.0});

  struct Match {
    double iou;
    size_t i, j;
  };
  std::vector<Match> cands;
  for (size_t i = 0; i < nc; ++i)
    for (size_t j = 0; j < nr; ++j) {
      if (dets_cur[i].class_name != dets_ref[j].class_name) continue;
      const double iou = bbox_iou(dets_cur[i], dets_ref[j]);
      if (iou > 0.0) cands.push_back({iou, i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Match& a, const Match& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<uint8_t> used_i(nc, 0), used_j(nr, 0);
  double iou_sum = 0.0;
  size_t matches = 0;
  for (const auto& m : cands) {
    if (used_i[m.i] || used_j[m.j]) continue;
    used_i[m.i] = used_j[m.j] = 1;
    iou_sum += m.iou;
    ++matches;
  }
  const double iou_term = matches > 0 ? 1.0 - iou_sum / matches : 1.0;
  return 0.5 * (count_term + iou_term);
}

inline ChangeReport change_score(const ChangeWeights& cw, double s_mc, double s_dc,
                                 double s_dec) {
  cw.validate();
  ChangeReport r;
  r.s_mc = s_mc;
  r.s_dc = s_dc;
  r.s_dec = s_dec;
  r.s_change = cw.w_mc * s_mc + cw.w_dc * s_dc + cw.w_dec * s_dec;
  return r;
}

inline std::pair<double, double> adaptive_weights(const DecisionConfig& cfg,
                                                  double dynamic_ratio) {
  const double w_base = std::max(0.0, cfg.w_base0 - cfg.a * dynamic_ratio);
  return {w_base, 1.0 - w_base};
}

inline SceneDecision decide(const DecisionConfig& cfg, const QualityReport& report,
                            const ChangeReport& change, double dynamic_ratio) {
  auto [w_base, w_change] = adaptive_weights(cfg, dynamic_ratio);
  double s_final = w_base * report.s_total + w_change * (1.0 - change.s_change);

  SceneDecision d;
  d.scenario = Scenario::None;
  if (dynamic_ratio >= cfg.th_dynamic) {
    // prioritize change evaluation
    d.scenario = Scenario::HighlyDynamic;
    w_base *= 0.5;
    w_change = 1.0 - w_base;
    s_final = w_base * report.s_total + w_change * (1.0 - change.s_change);
  } else if (dynamic_ratio <= cfg.th_static && report.s_feature >= cfg.s_static) {
    d.scenario = Scenario::HighlyStatic;
    s_final = std::min(1.0, s_final * cfg.boost_static);
  } else if (report.s_conf >= cfg.th_obj) {
    d.scenario = Scenario::HighConfidence;
    s_final = std::min(1.0, s_final * cfg.boost_conf);
  }

  d.s_final = s_final;
  d.good = s_final >= cfg.th_differ;
  d.w_base_used = w_base;
  d.w_change_used = w_change;
  return d;
}

struct Benchmark {
  double s_initial = 0.0;
  int ref_frame_index = 0;
};

// The benchmark only ever rises, and only on GOOD frames.
inline bool benchmark_update(Benchmark& bench, double s_total, bool good, int frame_index) {
  if (good && s_total > bench.s_initial) {
    bench.s_initial = s_total;
    bench.ref_frame_index = frame_index;
    return true;
  }
  return false;
}

}  // namespace dynavo
