// Pinhole camera model: projection, back-projection and pixel warping.
#pragma once

#include <optional>
#include <stdexcept>

#include "dynavo/core/image.hpp"
#include "dynavo/core/se3.hpp"

namespace dynavo {

struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;
  double depth_scale = 5000.0;  // raw units per meter, TUM default

  void validate() const {
    if (fx <= 0 || fy <= 0) throw std::invalid_argument("intrinsics: focal lengths must be positive");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
      throw std::invalid_argument("intrinsics: principal point outside image");
  }

  // Intrinsics of pyramid level L (2x2 box-filtered halving per level).
  CameraIntrinsics scaled(int level) const {
    CameraIntrinsics k = *this;
    for (int i = 0; i < level; ++i) {
      k.fx *= 0.5;
      k.fy *= 0.5;
      k.cx = (k.cx - 0.5) * 0.5;
      k.cy = (k.cy - 0.5) * 0.5;
      k.width /= 2;
      k.height /= 2;
    }
    return k;
  }
};

inline constexpr double kMinProjectDepth = 1e-4;  // meters

// Camera-frame point -> pixel; invalid behind the camera or outside the image.
inline std::optional<Vec2> project(const Vec3& point, const CameraIntrinsics& K) {
  if (!(point.z() > kMinProjectDepth)) return std::nullopt;
  const double u = K.fx * point.x() / point.z() + K.cx;
  const double v = K.fy * point.y() / point.z() + K.cy;
  if (u < 0.0 || u > K.width - 1 || v < 0.0 || v > K.height - 1) return std::nullopt;
  return Vec2(u, v);
}

struct InvalidDepthError : std::runtime_error {
  InvalidDepthError() : std::runtime_error("backproject: invalid depth") {}
};

inline Vec3 backproject(double x, double y, double depth, const CameraIntrinsics& K) {
  if (!is_valid_depth(depth)) throw InvalidDepthError();
  return Vec3((x - K.cx) / K.fx * depth, (y - K.cy) / K.fy * depth, depth);
}

// W(x, T, D_A): lift pixel (x, y) by its depth in A, transform by T, reproject.
inline std::optional<Vec2> warp(double x, double y, const Image2D& depth_a,
                                const PoseSE3& T, const CameraIntrinsics& K) {
  auto d = sample_bilinear_depth(depth_a, x, y);
  if (!d) return std::nullopt;
  const Vec3 p = T * backproject(x, y, *d, K);
  return project(p, K);
}

}  // namespace dynavo
