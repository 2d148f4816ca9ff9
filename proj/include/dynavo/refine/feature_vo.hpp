// Lightweight sparse frame-to-frame odometry: Shi-Tomasi corners tracked by
// pyramidal LK, lifted to 3D through depth, rigid 3D-3D alignment inside a
// RANSAC loop with a closed-form refinement on the inliers.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "dynavo/core/camera.hpp"
#include "dynavo/core/corners.hpp"
#include "dynavo/core/optical_flow.hpp"
#include "dynavo/core/rigid_align.hpp"
#include "dynavo/refine/signature.hpp"

namespace dynavo {

struct FeatureVoConfig {
  int max_corners = 500;
  double min_corner_response = 1e-4;
  double min_corner_distance = 8.0;
  int flow_levels = 3;
  LkConfig lk;
  int ransac_iters = 200;
  double inlier_threshold = 0.03;  // meters
  int min_inliers = 12;
  uint32_t seed = 7919;
};

struct VoResult {
  bool ok = false;          // false = tracking lost
  PoseSE3 pose;             // current camera expressed in the previous frame
  int inliers = 0;
  int correspondences = 0;
};

inline VoResult feature_vo(const Pyramid& intensity_prev, const Image2D& depth_prev,
                           const Pyramid& intensity_cur, const Image2D& depth_cur,
                           const BinaryMask& dyn_mask, const CameraIntrinsics& K,
                           const FeatureVoConfig& cfg = {}) {
  VoResult result;

  const Image2D resp = corner_response(intensity_prev.level(0));
  const auto corners =
      detect_corners(resp, cfg.max_corners, cfg.min_corner_response, cfg.min_corner_distance);

  std::vector<Vec2> points;
  points.reserve(corners.size());
  for (const auto& c : corners) {
    if (dyn_mask.test(static_cast<int>(c.x), static_cast<int>(c.y))) continue;
    points.emplace_back(c.x, c.y);
  }
  if (points.empty()) return result;

  const FlowField flow = lk_flow(intensity_prev, intensity_cur, points, cfg.lk);

  // 3D-3D correspondences: previous corner and its tracked position lifted
  // through the respective depth maps
  std::vector<Vec3> prev_pts, cur_pts;
  for (size_t i = 0; i < flow.size(); ++i) {
    if (!flow.valid[i]) continue;
    const Vec2 p0 = flow.points[i];
    const Vec2 p1 = p0 + flow.flow[i];
    const int m1x = static_cast<int>(p1.x() + 0.5), m1y = static_cast<int>(p1.y() + 0.5);
    if (dyn_mask.test(m1x, m1y)) continue;
    const auto d0 = sample_bilinear_depth(depth_prev, p0.x(), p0.y());
    const auto d1 = sample_bilinear_depth(depth_cur, p1.x(), p1.y());
    if (!d0 || !d1) continue;
    prev_pts.push_back(backproject(p0.x(), p0.y(), *d0, K));
    cur_pts.push_back(backproject(p1.x(), p1.y(), *d1, K));
  }
  result.correspondences = static_cast<int>(prev_pts.size());
  if (result.correspondences < cfg.min_inliers) return result;

  std::mt19937 rng(cfg.seed);
  std::uniform_int_distribution<size_t> pick(0, prev_pts.size() - 1);
  const double th2 = cfg.inlier_threshold * cfg.inlier_threshold;

  auto count_inliers = [&](const RigidAlignment& a, std::vector<int>* idx) {
    int n = 0;
    for (size_t i = 0; i < cur_pts.size(); ++i) {
      if ((a.apply(cur_pts[i]) - prev_pts[i]).squaredNorm() < th2) {
        ++n;
        if (idx) idx->push_back(static_cast<int>(i));
      }
    }
    return n;
  };

  std::optional<RigidAlignment> best;
  int best_inliers = 0;
  for (int it = 0; it < cfg.ransac_iters; ++it) {
    size_t i0 = pick(rng), i1 = pick(rng), i2 = pick(rng);
    if (i0 == i1 || i0 == i2 || i1 == i2) continue;
    const auto model = rigid_align_3d3d({cur_pts[i0], cur_pts[i1], cur_pts[i2]},
                                        {prev_pts[i0], prev_pts[i1], prev_pts[i2]});
    if (!model) continue;
    const int n = count_inliers(*model, nullptr);
    if (n > best_inliers) {
      best_inliers = n;
      best = model;
    }
  }
  if (!best || best_inliers < cfg.min_inliers) return result;

  // refine on the consensus set, then once more on the refit inliers
  for (int round = 0; round < 2; ++round) {
    std::vector<int> idx;
    count_inliers(*best, &idx);
    if (static_cast<int>(idx.size()) < cfg.min_inliers) return result;
    std::vector<Vec3> src, dst;
    src.reserve(idx.size());
    dst.reserve(idx.size());
    for (int i : idx) {
      src.push_back(cur_pts[i]);
      dst.push_back(prev_pts[i]);
    }
    const auto refined = rigid_align_3d3d(src, dst);
    if (!refined) break;
    best = refined;
  }

  result.inliers = count_inliers(*best, nullptr);
  if (result.inliers < cfg.min_inliers) return result;
  result.ok = true;
  result.pose = best->as_pose();
  return result;
}

inline VoResult feature_vo(const Image2D& intensity_prev, const Image2D& depth_prev,
                           const Image2D& intensity_cur, const Image2D& depth_cur,
                           const BinaryMask& dyn_mask, const CameraIntrinsics& K,
                           const FeatureVoConfig& cfg = {}) {
  const Pyramid pp = build_pyramid(intensity_prev, cfg.flow_levels);
  const Pyramid pc = build_pyramid(intensity_cur, cfg.flow_levels);
  return feature_vo(pp, depth_prev, pc, depth_cur, dyn_mask, K, cfg);
}

}  // namespace dynavo
