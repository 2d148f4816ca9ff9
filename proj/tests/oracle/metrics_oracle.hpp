// Test-side oracles, independent of the library implementation paths they
// check: Horn's quaternion method for rigid alignment (vs the SVD route),
// homogeneous-matrix trajectory metrics, and an O(n^3) exhaustive
// nearest-timestamp matcher.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::Vector3d;

// Rigid alignment dst ~= R src + t via the eigenvector of Horn's 4x4 matrix.
inline bool horn_align(const std::vector<Vector3d>& src, const std::vector<Vector3d>& dst,
                       Matrix3d& R, Vector3d& t) {
  const size_t n = src.size();
  if (n < 3 || dst.size() != n) return false;
  Vector3d cs = Vector3d::Zero(), cd = Vector3d::Zero();
  for (size_t i = 0; i < n; ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= double(n);
  cd /= double(n);

  Matrix3d S = Matrix3d::Zero();
  for (size_t i = 0; i < n; ++i) S += (src[i] - cs) * (dst[i] - cd).transpose();

  Matrix4d N;
  const double sxx = S(0, 0), sxy = S(0, 1), sxz = S(0, 2);
  const double syx = S(1, 0), syy = S(1, 1), syz = S(1, 2);
  const double szx = S(2, 0), szy = S(2, 1), szz = S(2, 2);
  N << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
       syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
       szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
       sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;

  Eigen::SelfAdjointEigenSolver<Matrix4d> eig(N);
  const Eigen::Vector4d q = eig.eigenvectors().col(3);  // largest eigenvalue
  Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
  quat.normalize();
  R = quat.toRotationMatrix();
  t = cd - R * cs;
  return true;
}

struct Stats {
  double rmse = 0.0, mean = 0.0, std_dev = 0.0;
};

inline Stats stats_of(const std::vector<double>& e) {
  double s = 0, s2 = 0;
  for (double v : e) {
    s += v;
    s2 += v * v;
  }
  const double n = double(e.size());
  Stats out;
  out.mean = s / n;
  out.rmse = std::sqrt(s2 / n);
  out.std_dev = std::sqrt(std::max(0.0, s2 / n - out.mean * out.mean));
  return out;
}

// ATE through 4x4 matrices and Horn alignment.
inline Stats ate_brute_force(const std::vector<Matrix4d>& est,
                             const std::vector<Matrix4d>& gt) {
  std::vector<Vector3d> src, dst;
  for (size_t i = 0; i < est.size(); ++i) {
    src.push_back(est[i].block<3, 1>(0, 3));
    dst.push_back(gt[i].block<3, 1>(0, 3));
  }
  Matrix3d R;
  Vector3d t;
  horn_align(src, dst, R, t);
  double pre = 0.0;
  for (size_t i = 0; i < src.size(); ++i) pre += (src[i] - dst[i]).squaredNorm();
  if (pre == 0.0) {
    R = Matrix3d::Identity();
    t = Vector3d::Zero();
  }
  std::vector<double> errors;
  for (size_t i = 0; i < src.size(); ++i) errors.push_back((R * src[i] + t - dst[i]).norm());
  return stats_of(errors);
}

inline Matrix4d inverse_se3(const Matrix4d& m) {
  Matrix4d out = Matrix4d::Identity();
  const Matrix3d Rt = m.block<3, 3>(0, 0).transpose();
  out.block<3, 3>(0, 0) = Rt;
  out.block<3, 1>(0, 3) = -Rt * m.block<3, 1>(0, 3);
  return out;
}

struct RpeStats {
  Stats trans, rot_deg;
};

inline RpeStats rpe_brute_force(const std::vector<Matrix4d>& est,
                                const std::vector<Matrix4d>& gt, int delta) {
  std::vector<double> te, re;
  for (size_t i = 0; i + delta < est.size(); ++i) {
    const Matrix4d rel_gt = inverse_se3(gt[i]) * gt[i + delta];
    const Matrix4d rel_est = inverse_se3(est[i]) * est[i + delta];
    const Matrix4d err = inverse_se3(rel_gt) * rel_est;
    te.push_back(err.block<3, 1>(0, 3).norm());
    const double tr = err.block<3, 3>(0, 0).trace();
    const double c = std::min(1.0, std::max(-1.0, (tr - 1.0) / 2.0));
    re.push_back(std::acos(c) * 180.0 / M_PI);
  }
  return {stats_of(te), stats_of(re)};
}

// Exhaustive greedy matcher: repeatedly take the globally closest unused
// pair within tolerance.
inline std::vector<std::pair<int, int>> exhaustive_associate(const std::vector<double>& a,
                                                             const std::vector<double>& b,
                                                             double tol) {
  std::vector<bool> ua(a.size(), false), ub(b.size(), false);
  std::vector<std::pair<int, int>> out;
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (size_t i = 0; i < a.size(); ++i) {
      if (ua[i]) continue;
      for (size_t j = 0; j < b.size(); ++j) {
        if (ub[j]) continue;
        const double d = std::abs(a[i] - b[j]);
        if (d > tol) continue;
        const bool closer = d < best - 1e-9;
        const bool tie = std::abs(d - best) <= 1e-9 && bj >= 0 &&
                         (b[j] < b[bj] || (b[j] == b[bj] && a[i] < a[bi]));
        if (closer || tie) {
          best = d;
          bi = int(i);
          bj = int(j);
        }
      }
    }
    if (bi < 0) break;
    ua[bi] = ub[bj] = true;
    out.emplace_back(bi, bj);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
