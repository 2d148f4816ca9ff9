// Closed-form least-squares rigid alignment of 3D point sets
// (Horn/Umeyama without scale): minimizes sum ||R*src + t - dst||^2.
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dynavo/core/se3.hpp"

namespace dynavo {

struct RigidAlignment {
  Mat3 rotation;
  Vec3 translation;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  PoseSE3 as_pose() const { return PoseSE3(rotation, translation); }
};

// nullopt on degenerate geometry (< 3 points, or collinear/coincident sets).
inline std::optional<RigidAlignment> rigid_align_3d3d(const std::vector<Vec3>& src,
                                                      const std::vector<Vec3>& dst) {
  const size_t n = src.size();
  if (n != dst.size() || n < 3) return std::nullopt;

  Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
  for (size_t i = 0; i < n; ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(n);
  cd /= static_cast<double>(n);

  Mat3 cov = Mat3::Zero();
  double spread = 0.0;
  for (size_t i = 0; i < n; ++i) {
    cov += (dst[i] - cd) * (src[i] - cs).transpose();
    spread += (src[i] - cs).squaredNorm();
  }

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  // rotation about a line is unobservable when the points are collinear
  if (sv(1) <= 1e-12 * std::max(1.0, spread)) return std::nullopt;

  Mat3 S = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) S(2, 2) = -1.0;
  RigidAlignment out;
  out.rotation = svd.matrixU() * S * svd.matrixV().transpose();
  out.translation = cd - out.rotation * cs;
  return out;
}

}  // namespace dynavo
