// Rigid camera poses on SE(3): unit quaternion + translation storage,
// 6-vector twist (v, w) tangent parameterization for optimization steps.
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace dynavo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return m;
}

class PoseSE3 {
 public:
  PoseSE3() : q_(Eigen::Quaterniond::Identity()), t_(Vec3::Zero()) {}
  PoseSE3(const Eigen::Quaterniond& q, const Vec3& t) : q_(q.normalized()), t_(t) {}
  PoseSE3(const Mat3& R, const Vec3& t) : q_(R), t_(t) { q_.normalize(); }

  static PoseSE3 identity() { return PoseSE3(); }

  const Eigen::Quaterniond& rotation() const { return q_; }
  const Vec3& translation() const { return t_; }
  Mat3 rotation_matrix() const { return q_.toRotationMatrix(); }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation_matrix();
    m.topRightCorner<3, 1>() = t_;
    return m;
  }

  Vec3 operator*(const Vec3& p) const { return q_ * p + t_; }

  PoseSE3 operator*(const PoseSE3& rhs) const {
    return PoseSE3(q_ * rhs.q_, q_ * rhs.t_ + t_);
  }

  // conjugate preserves the unit norm bit-exactly; skipping the constructor
  // renormalization keeps inverse() arithmetically consistent, so
  // compose(p, inverse(p)) cancels to exact zeros
  PoseSE3 inverse() const {
    PoseSE3 out;
    out.q_ = q_.conjugate();
    out.t_ = out.q_ * (-t_);
    return out;
  }

  // Rotation angle in radians, in [0, pi].
  double rotation_angle() const {
    const double n = q_.vec().norm();
    return 2.0 * std::atan2(n, std::abs(q_.w()));
  }

 private:
  Eigen::Quaterniond q_;
  Vec3 t_;
};

// exp of the twist (v, w): rotation by |w| about w/|w|, translation V(w) v.
inline PoseSE3 se3_exp(const Vec6& xi) {
  const Vec3 v = xi.head<3>();
  const Vec3 w = xi.tail<3>();
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);

  Mat3 W = skew(w);
  Mat3 R, V;
  if (theta < 1e-8) {
    // 2nd-order series keeps exp/log consistent near the identity.
    R = Mat3::Identity() + W + 0.5 * W * W;
    V = Mat3::Identity() + 0.5 * W + (1.0 / 6.0) * W * W;
  } else {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    R = Mat3::Identity() + (s / theta) * W + ((1.0 - c) / theta2) * W * W;
    V = Mat3::Identity() + ((1.0 - c) / theta2) * W +
        ((theta - s) / (theta2 * theta)) * W * W;
  }
  return PoseSE3(Eigen::Quaterniond(R), V * v);
}

inline Vec6 se3_log(const PoseSE3& pose) {
  const Mat3 R = pose.rotation_matrix();
  const double angle = pose.rotation_angle();

  Vec3 w;
  if (angle < 1e-8) {
    w = 0.5 * Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  } else {
    const double f = angle / (2.0 * std::sin(angle));
    w = f * Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  }

  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  Mat3 W = skew(w);
  Mat3 Vinv;
  if (theta < 1e-8) {
    Vinv = Mat3::Identity() - 0.5 * W + (1.0 / 12.0) * W * W;
  } else {
    const double half = 0.5 * theta;
    const double cot = half / std::tan(half);
    Vinv = Mat3::Identity() - 0.5 * W + ((1.0 - cot) / theta2) * W * W;
  }

  Vec6 xi;
  xi.head<3>() = Vinv * pose.translation();
  xi.tail<3>() = w;
  return xi;
}

// Geodesic interpolation from a toward b by fraction s in [0, 1]:
// quaternion slerp for rotation, linear blend for translation.
inline PoseSE3 interpolate(const PoseSE3& a, const PoseSE3& b, double s) {
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  Eigen::Quaterniond qa = a.rotation();
  Eigen::Quaterniond qb = b.rotation();
  if (qa.dot(qb) < 0.0) qb.coeffs() = -qb.coeffs();
  Eigen::Quaterniond q = qa.slerp(s, qb);
  Vec3 t = (1.0 - s) * a.translation() + s * b.translation();
  return PoseSE3(q, t);
}

}  // namespace dynavo
