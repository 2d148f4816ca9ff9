// Trajectory metrics in the TUM convention: rigid pre-alignment, absolute
// trajectory error, and frame-to-frame relative pose error.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dynavo/core/rigid_align.hpp"
#include "dynavo/core/se3.hpp"
#include "dynavo/io/trajectory_io.hpp"
#include "dynavo/io/tum_dataset.hpp"

namespace dynavo {

struct MatchedPose {
  double est_timestamp = 0.0;
  double gt_timestamp = 0.0;
  PoseSE3 est;
  PoseSE3 gt;
};

inline std::vector<MatchedPose> associate_trajectories(const Trajectory& est,
                                                       const Trajectory& gt,
                                                       double tolerance = 0.02) {
  std::vector<double> est_ts(est.size()), gt_ts(gt.size());
  for (size_t i = 0; i < est.size(); ++i) est_ts[i] = est[i].timestamp;
  for (size_t i = 0; i < gt.size(); ++i) gt_ts[i] = gt[i].timestamp;
  const auto pairs = associate_timestamps(est_ts, gt_ts, tolerance);
  if (pairs.empty()) throw std::runtime_error("associate_trajectories: zero matches");
  std::vector<MatchedPose> out;
  out.reserve(pairs.size());
  for (const auto& [ie, ig] : pairs)
    out.push_back({est[ie].timestamp, gt[ig].timestamp, est[ie].pose, gt[ig].pose});
  return out;
}

// Least-squares rigid alignment est->gt over matched positions (no scale:
// RGB-D carries metric scale). Exactly coincident trajectories shortcut to
// the identity so a self-comparison evaluates to exactly zero.
inline RigidAlignment umeyama_align(const std::vector<MatchedPose>& pairs) {
  if (pairs.size() < 3)
    throw std::runtime_error("umeyama_align: need at least 3 pose pairs");
  double pre_cost = 0.0;
  std::vector<Vec3> src, dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const auto& p : pairs) {
    src.push_back(p.est.translation());
    dst.push_back(p.gt.translation());
    pre_cost += (p.est.translation() - p.gt.translation()).squaredNorm();
  }
  if (pre_cost == 0.0) return {Mat3::Identity(), Vec3::Zero()};
  const auto a = rigid_align_3d3d(src, dst);
  if (!a) throw std::runtime_error("umeyama_align: degenerate geometry");
  return *a;
}

struct AteResult {
  double rmse = 0.0;
  double std_dev = 0.0;
  std::vector<double> per_frame_errors;
  RigidAlignment alignment;
};

struct RpeResult {
  double trans_rmse = 0.0;
  double trans_std = 0.0;
  double rot_rmse = 0.0;  // degrees
  double rot_std = 0.0;
  int delta = 1;  // frames
};

namespace detail {

struct MeanStd {
  double rmse, mean, std_dev;
};

inline MeanStd rmse_of(const std::vector<double>& e) {
  double sum = 0.0, sum2 = 0.0;
  for (double v : e) {
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(e.size());
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {std::sqrt(sum2 / n), mean, std::sqrt(var)};
}

}  // namespace detail

inline AteResult ate(const Trajectory& est, const Trajectory& gt, double tolerance = 0.02) {
  const auto pairs = associate_trajectories(est, gt, tolerance);
  AteResult r;
  r.alignment = umeyama_align(pairs);
  r.per_frame_errors.reserve(pairs.size());
  for (const auto& p : pairs)
    r.per_frame_errors.push_back((r.alignment.apply(p.est.translation()) - p.gt.translation()).norm());
  const auto ms = detail::rmse_of(r.per_frame_errors);
  r.rmse = ms.rmse;
  r.std_dev = ms.std_dev;
  return r;
}

inline RpeResult rpe(const Trajectory& est, const Trajectory& gt, int delta = 1,
                     double tolerance = 0.02) {
  if (delta < 1) throw std::invalid_argument("rpe: delta must be >= 1");
  const auto pairs = associate_trajectories(est, gt, tolerance);
  if (pairs.size() <= static_cast<size_t>(delta))
    throw std::runtime_error("rpe: not enough matched pairs for the requested delta");

  std::vector<double> trans_err, rot_err;
  for (size_t i = 0; i + delta < pairs.size(); ++i) {
    const PoseSE3 rel_gt = pairs[i].gt.inverse() * pairs[i + delta].gt;
    const PoseSE3 rel_est = pairs[i].est.inverse() * pairs[i + delta].est;
    const PoseSE3 err = rel_gt.inverse() * rel_est;
    trans_err.push_back(err.translation().norm());
    rot_err.push_back(err.rotation_angle() * 180.0 / M_PI);
  }
  const auto t = detail::rmse_of(trans_err);
  const auto r = detail::rmse_of(rot_err);
  RpeResult out;
  out.trans_rmse = t.rmse;
  out.trans_std = t.std_dev;
  out.rot_rmse = r.rmse;
  out.rot_std = r.std_dev;
  out.delta = delta;
  return out;
}

}  // namespace dynavo
