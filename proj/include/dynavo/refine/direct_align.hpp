// Dense direct pose refinement: robust intensity+depth residuals against a
// set of time-decayed reference frames, minimized by iteratively reweighted
// Gauss-Newton on the SE(3) tangent, coarse-to-fine over image pyramids.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dynavo/core/camera.hpp"
#include "dynavo/core/image.hpp"
#include "dynavo/core/pyramid.hpp"
#include "dynavo/core/se3.hpp"
#include "dynavo/refine/signature.hpp"

namespace dynavo {

struct RobustCostConfig {
  double alpha_i = 1.0;          // photometric scale vs depth residuals
  double cauchy_scale_i = 0.1;   // intensity kernel scale, [0,1] units
  double cauchy_scale_d = 0.05;  // depth kernel scale, meters
  double lambda = 0.5;           // time decay rate, 1/s
  double gamma_fg = 0.1;         // weight of pixels inside the dynamic mask
  double gamma_bg = 1.0;
  int pyramid_levels = 3;
  int max_iters = 30;            // per level
  double step_tolerance = 1e-6;
  int min_valid_pixels = 200;    // at the finest level
  double max_condition = 1e12;

  void validate() const {
    for (double v : {alpha_i, cauchy_scale_i, cauchy_scale_d, step_tolerance})
      if (!(v > 0.0)) throw std::invalid_argument("robust cost parameters must be positive");
    if (pyramid_levels < 1 || max_iters < 1)
      throw std::invalid_argument("robust cost parameters must be positive");
  }
};

inline double cauchy_cost(double r, double c) {
  const double s = r / c;
  return 0.5 * c * c * std::log1p(s * s);
}

inline double cauchy_weight(double r, double c) {
  const double s = r / c;
  return 1.0 / (1.0 + s * s);
}

struct ResidualSample {
  double r_i = 0.0;  // I_b(warp(p)) - I_a(p)
  double r_d = 0.0;  // D_b(warp(p)) - z of the transformed point
  Vec6 j_i = Vec6::Zero();
  Vec6 j_d = Vec6::Zero();
  Vec2 target_px = Vec2::Zero();
};

// Residual of source pixel (x, y) in frame A against frame B under T (maps
// A-camera points into B-camera coordinates). Jacobians are taken wrt a
// right-multiplied increment on the current world pose, i.e. T' = exp(-d)*T.
inline std::optional<ResidualSample> evaluate_residual(
    int x, int y, const Image2D& intensity_a, const Image2D& depth_a,
    const Image2D& intensity_b, const Image2D& depth_b, const PoseSE3& T,
    const CameraIntrinsics& K) {
  const double d = depth_a.at(x, y);
  if (!is_valid_depth(d)) return std::nullopt;
  const Vec3 p(( x - K.cx) / K.fx * d, (y - K.cy) / K.fy * d, d);
  const Vec3 q = T * p;
  const auto uv = project(q, K);
  if (!uv) return std::nullopt;

  const auto ib = sample_bilinear_grad(intensity_b, uv->x(), uv->y());
  const auto db = sample_bilinear_depth_grad(depth_b, uv->x(), uv->y());
  if (!ib || !db) return std::nullopt;

  ResidualSample s;
  s.target_px = *uv;
  s.r_i = ib->value - intensity_a.at(x, y);
  s.r_d = db->value - q.z();

  const double iz = 1.0 / q.z();
  Eigen::Matrix<double, 2, 3> du_dq;
  du_dq << K.fx * iz, 0.0, -K.fx * q.x() * iz * iz,
           0.0, K.fy * iz, -K.fy * q.y() * iz * iz;
  Eigen::Matrix<double, 3, 6> dq_dd;
  dq_dd.leftCols<3>() = -Mat3::Identity();
  dq_dd.rightCols<3>() = skew(q);

  const Eigen::Matrix<double, 2, 6> duv = du_dq * dq_dd;
  s.j_i = (Eigen::Matrix<double, 1, 2>(ib->dx, ib->dy) * duv).transpose();
  s.j_d = (Eigen::Matrix<double, 1, 2>(db->dx, db->dy) * duv).transpose();
  // minus d(q_z)/d(delta): row z of dq_dd is [0 0 -1 | -q_y q_x 0]
  s.j_d[2] += 1.0;
  s.j_d[3] += q.y();
  s.j_d[4] -= q.x();
  return s;
}

struct PixelResidual {
  int x = 0, y = 0;
  double r_i = 0.0, r_d = 0.0;
  bool valid = false;
};

// Materialized per-pixel residual field (test and inspection surface).
inline std::vector<PixelResidual> compute_residuals(
    const Image2D& intensity_a, const Image2D& depth_a, const Image2D& intensity_b,
    const Image2D& depth_b, const PoseSE3& T, const CameraIntrinsics& K) {
  if (intensity_a.width() != intensity_b.width() ||
      intensity_a.height() != intensity_b.height())
    throw std::invalid_argument("compute_residuals: image size mismatch");
  std::vector<PixelResidual> out;
  out.reserve(intensity_a.size());
  for (int y = 0; y < intensity_a.height(); ++y)
    for (int x = 0; x < intensity_a.width(); ++x) {
      PixelResidual pr;
      pr.x = x;
      pr.y = y;
      if (auto s = evaluate_residual(x, y, intensity_a, depth_a, intensity_b, depth_b, T, K)) {
        pr.r_i = s->r_i;
        pr.r_d = s->r_d;
        pr.valid = true;
      }
      out.push_back(pr);
    }
  return out;
}

enum class AlignStatus { Ok, Degenerate };

struct AlignResult {
  AlignStatus status = AlignStatus::Degenerate;
  PoseSE3 pose;        // world pose of the current camera
  double final_cost = 0.0;
  int iterations = 0;
  int valid_pixels = 0;
};

class DirectAligner {
 public:
  DirectAligner(const AlignFrame& current, double current_timestamp,
                const BinaryMask& dyn_mask, const std::vector<RefEntry>& refs,
                const CameraIntrinsics& K, const RobustCostConfig& cfg)
      : cur_(current), t_cur_(current_timestamp), refs_(refs), cfg_(cfg) {
    cfg_.validate();
    const int L = cur_.intensity.num_levels();
    intrinsics_.reserve(L);
    for (int l = 0; l < L; ++l) intrinsics_.push_back(K.scaled(l));
    masks_.push_back(dyn_mask);
    for (int l = 1; l < L; ++l)
      masks_.push_back(masks_.back().empty() ? BinaryMask()
                                             : downsample_mask2(masks_.back()));
    decay_.reserve(refs.size());
    for (const auto& r : refs_) decay_.push_back(std::exp(-cfg_.lambda * std::abs(t_cur_ - r.timestamp)));
  }

  // Multiple warm starts: evaluated at the coarsest level, best one wins.
  AlignResult run(const std::vector<PoseSE3>& starts) {
    if (starts.empty()) return {};
    if (starts.size() == 1) return run(starts[0]);
    const int coarsest = cur_.intensity.num_levels() - 1;
    size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < starts.size(); ++i) {
      const Accum a = accumulate(starts[i], coarsest);
      const double c = a.valid > 0 ? a.mean_cost() : std::numeric_limits<double>::infinity();
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    return run(starts[best]);
  }

  AlignResult run(const PoseSE3& T0) {
    const int L = cur_.intensity.num_levels();
    PoseSE3 X = T0;
    AlignResult result;

    for (int l = L - 1; l >= 0; --l) {
      Accum acc = accumulate(X, l);
      if (l == 0) {
        // never start the finest level worse than the warm-start pose
        Accum acc0 = accumulate(T0, 0);
        if (acc0.valid > 0 && (acc.valid == 0 || acc0.mean_cost() < acc.mean_cost())) {
          X = T0;
          acc = acc0;
        }
        if (acc.valid < cfg_.min_valid_pixels) return result;  // Degenerate
        result.valid_pixels = static_cast<int>(acc.valid);
      }
      if (acc.valid == 0) continue;

      for (int it = 0; it < cfg_.max_iters; ++it) {
        Eigen::SelfAdjointEigenSolver<Mat6> eig(acc.H);
        const double emin = eig.eigenvalues().minCoeff();
        const double emax = eig.eigenvalues().maxCoeff();
        if (!(emin > 0.0) || emax / emin > cfg_.max_condition) {
          if (l == 0) return result;  // Degenerate
          break;
        }
        Vec6 delta = acc.H.ldlt().solve(-acc.b);
        if (delta.norm() < cfg_.step_tolerance) break;  // already at a stationary point

        // monotone safeguard: reject cost increases, halve the step
        bool accepted = false;
        Accum trial_acc;
        PoseSE3 trial;
        for (int halved = 0; halved <= 5; ++halved) {
          trial = X * se3_exp(delta);
          trial_acc = accumulate(trial, l);
          if (trial_acc.valid > 0 && trial_acc.mean_cost() <= acc.mean_cost()) {
            accepted = true;
            break;
          }
          delta *= 0.5;
        }
        if (!accepted) break;
        X = trial;
        acc = trial_acc;
        ++result.iterations;
        if (delta.norm() < cfg_.step_tolerance) break;
      }
    }

    Accum final_acc = accumulate(X, 0);
    if (final_acc.valid < cfg_.min_valid_pixels) return result;
    result.status = AlignStatus::Ok;
    result.pose = X;
    result.final_cost = final_acc.mean_cost();
    result.valid_pixels = static_cast<int>(final_acc.valid);
    return result;
  }

 private:
  struct Accum {
    Mat6 H = Mat6::Zero();
    Vec6 b = Vec6::Zero();
    double cost = 0.0;
    long valid = 0;
    double mean_cost() const { return valid > 0 ? cost / static_cast<double>(valid) : 0.0; }
  };

  Accum accumulate(const PoseSE3& X, int level) const {
    Accum acc;
    const CameraIntrinsics& K = intrinsics_[level];
    const Image2D& icur = cur_.intensity.level(level);
    const Image2D& dcur = cur_.depth.level(level);
    const BinaryMask& mask = masks_[level];
    const PoseSE3 Xinv = X.inverse();
    const double a2 = cfg_.alpha_i * cfg_.alpha_i;

    for (size_t k = 0; k < refs_.size(); ++k) {
      const AlignFrame& ref = *refs_[k].frame;
      const Image2D& iref = ref.intensity.level(level);
      const Image2D& dref = ref.depth.level(level);
      const PoseSE3 T = Xinv * refs_[k].world_pose;
      const double B = decay_[k];

      for (int y = 0; y < iref.height(); ++y) {
        for (int x = 0; x < iref.width(); ++x) {
          auto s = evaluate_residual(x, y, iref, dref, icur, dcur, T, K);
          if (!s) continue;
          const int mx = static_cast<int>(s->target_px.x() + 0.5);
          const int my = static_cast<int>(s->target_px.y() + 0.5);
          // foreground on either end of the warp: the reference's own
          // dynamic pixels or the current frame's dynamic mask
          const bool fg = mask.test(mx, my) || ref.masked_at(level, x, y);
          const double gamma = fg ? cfg_.gamma_fg : cfg_.gamma_bg;
          const double g = gamma * B;

          const double si = cfg_.alpha_i * s->r_i;
          const double wi = cauchy_weight(si, cfg_.cauchy_scale_i) * a2 * g;
          const double wd = cauchy_weight(s->r_d, cfg_.cauchy_scale_d) * g;

          acc.H.noalias() += wi * (s->j_i * s->j_i.transpose());
          acc.H.noalias() += wd * (s->j_d * s->j_d.transpose());
          acc.b.noalias() += wi * s->r_i * s->j_i;
          acc.b.noalias() += wd * s->r_d * s->j_d;
          acc.cost += g * (cauchy_cost(si, cfg_.cauchy_scale_i) +
                           cauchy_cost(s->r_d, cfg_.cauchy_scale_d));
          ++acc.valid;
        }
      }
    }
    return acc;
  }

  const AlignFrame& cur_;
  double t_cur_;
  std::vector<RefEntry> refs_;
  RobustCostConfig cfg_;
  std::vector<CameraIntrinsics> intrinsics_;
  std::vector<BinaryMask> masks_;
  std::vector<double> decay_;
};

inline AlignResult direct_align(const AlignFrame& current, double current_timestamp,
                                const BinaryMask& dyn_mask,
                                const std::vector<RefEntry>& refs,
                                const CameraIntrinsics& K, const RobustCostConfig& cfg,
                                const PoseSE3& T0) {
  if (refs.empty()) throw std::invalid_argument("direct_align: needs at least one reference");
  DirectAligner aligner(current, current_timestamp, dyn_mask, refs, K, cfg);
  return aligner.run(T0);
}

inline AlignResult direct_align(const AlignFrame& current, double current_timestamp,
                                const BinaryMask& dyn_mask,
                                const std::vector<RefEntry>& refs,
                                const CameraIntrinsics& K, const RobustCostConfig& cfg,
                                const std::vector<PoseSE3>& warm_starts) {
  if (refs.empty()) throw std::invalid_argument("direct_align: needs at least one reference");
  DirectAligner aligner(current, current_timestamp, dyn_mask, refs, K, cfg);
  return aligner.run(warm_starts);
}

}  // namespace dynavo
