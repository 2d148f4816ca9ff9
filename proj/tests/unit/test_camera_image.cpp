#include <gtest/gtest.h>

#include <random>

#include "dynavo/core/camera.hpp"
#include "dynavo/core/image.hpp"

using namespace dynavo;

namespace {
CameraIntrinsics tum_intrinsics() {
  CameraIntrinsics K;
  K.fx = 525.0;
  K.fy = 525.0;
  K.cx = 320.0;
  K.cy = 240.0;
  K.width = 640;
  K.height = 480;
  return K;
}
}  // namespace

TEST(Camera, OpticalAxisProjectsToPrincipalPoint) {
  auto K = tum_intrinsics();
  auto uv = project(Vec3(0, 0, 1), K);
  ASSERT_TRUE(uv);
  EXPECT_DOUBLE_EQ(uv->x(), 320.0);
  EXPECT_DOUBLE_EQ(uv->y(), 240.0);
}

TEST(Camera, PinholeOffset) {
  auto K = tum_intrinsics();
  auto uv = project(Vec3(0.1, 0, 1), K);
  ASSERT_TRUE(uv);
  EXPECT_NEAR(uv->x(), 320.0 + 52.5, 1e-12);
  EXPECT_NEAR(uv->y(), 240.0, 1e-12);
}

TEST(Camera, BehindCameraInvalid) {
  auto K = tum_intrinsics();
  EXPECT_FALSE(project(Vec3(0, 0, -1), K));
  EXPECT_FALSE(project(Vec3(0, 0, 0), K));
}

TEST(Camera, BackprojectPrincipalPoint) {
  auto K = tum_intrinsics();
  Vec3 p = backproject(K.cx, K.cy, 2.0, K);
  EXPECT_LT((p - Vec3(0, 0, 2.0)).norm(), 1e-12);
}

TEST(Camera, ProjectBackprojectRoundTrip) {
  auto K = tum_intrinsics();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 639.0), uy(0.0, 479.0), ud(0.2, 8.0);
  for (int i = 0; i < 500; ++i) {
    const double x = ux(rng), y = uy(rng), d = ud(rng);
    auto uv = project(backproject(x, y, d, K), K);
    ASSERT_TRUE(uv);
    EXPECT_NEAR(uv->x(), x, 1e-6);
    EXPECT_NEAR(uv->y(), y, 1e-6);
  }
}

TEST(Camera, BackprojectRejectsInvalidDepth) {
  auto K = tum_intrinsics();
  EXPECT_THROW(backproject(10, 10, 0.0, K), InvalidDepthError);
  EXPECT_THROW(backproject(10, 10, -1.0, K), InvalidDepthError);
  EXPECT_THROW(backproject(10, 10, std::nan(""), K), InvalidDepthError);
}

TEST(Camera, WarpIdentityIsIdentityMap) {
  auto K = tum_intrinsics();
  Image2D depth(640, 480, 2.0);
  auto uv = warp(123.0, 77.0, depth, PoseSE3::identity(), K);
  ASSERT_TRUE(uv);
  EXPECT_NEAR(uv->x(), 123.0, 1e-9);
  EXPECT_NEAR(uv->y(), 77.0, 1e-9);
}

TEST(Camera, WarpPureTranslationShift) {
  auto K = tum_intrinsics();
  const double Z = 2.0, tx = 0.1;
  Image2D depth(640, 480, Z);
  PoseSE3 T(Eigen::Quaterniond::Identity(), Vec3(tx, 0, 0));
  auto uv = warp(300.0, 200.0, depth, T, K);
  ASSERT_TRUE(uv);
  EXPECT_NEAR(uv->x(), 300.0 + K.fx * tx / Z, 1e-9);
  EXPECT_NEAR(uv->y(), 200.0, 1e-9);
}

TEST(Camera, WarpInvalidDepthIsInvalid) {
  auto K = tum_intrinsics();
  Image2D depth(640, 480, 0.0);
  EXPECT_FALSE(warp(100.0, 100.0, depth, PoseSE3::identity(), K));
}

TEST(Image, BilinearExactAtIntegerCoords) {
  Image2D img(4, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) img.at(x, y) = 10.0 * y + x;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x)
      EXPECT_DOUBLE_EQ(*sample_bilinear(img, x, y), img.at(x, y));
}

TEST(Image, BilinearMidpoint) {
  Image2D img(2, 2);
  img.at(0, 0) = 0;
  img.at(1, 0) = 0;
  img.at(0, 1) = 1;
  img.at(1, 1) = 1;
  EXPECT_DOUBLE_EQ(*sample_bilinear(img, 0.5, 0.5), 0.5);
}

TEST(Image, BilinearConstantField) {
  Image2D img(8, 8, 0.37);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 7.0);
  for (int i = 0; i < 100; ++i)
    EXPECT_DOUBLE_EQ(*sample_bilinear(img, u(rng), u(rng)), 0.37);
}

TEST(Image, BilinearOutOfBoundsInvalid) {
  Image2D img(4, 4, 1.0);
  EXPECT_FALSE(sample_bilinear(img, -0.1, 0.0));
  EXPECT_FALSE(sample_bilinear(img, 3.01, 1.0));
  EXPECT_FALSE(sample_bilinear(img, 1.0, 3.5));
}

TEST(Image, DepthSamplingRejectsInvalidNeighbor) {
  Image2D img(4, 4, 2.0);
  img.at(1, 1) = 0.0;
  EXPECT_FALSE(sample_bilinear_depth(img, 0.5, 0.5));
  EXPECT_FALSE(sample_bilinear_depth(img, 1.5, 1.5));
  EXPECT_TRUE(sample_bilinear_depth(img, 2.5, 2.5));
  EXPECT_DOUBLE_EQ(*sample_bilinear_depth(img, 2.5, 2.5), 2.0);
}

TEST(Image, GradientConstantIsZero) {
  Image2D img(16, 16, 0.5);
  auto [gx, gy] = gradient(img);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      EXPECT_DOUBLE_EQ(gx.at(x, y), 0.0);
      EXPECT_DOUBLE_EQ(gy.at(x, y), 0.0);
    }
}

TEST(Image, GradientRampInterior) {
  const int w = 16, h = 12;
  Image2D img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<double>(x) / w;
  auto [gx, gy] = gradient(img);
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      EXPECT_NEAR(gx.at(x, y), 1.0 / w, 1e-12);
      EXPECT_NEAR(gy.at(x, y), 0.0, 1e-12);
    }
}

TEST(Image, GradientMatchesFiniteDifferenceDefinition) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image2D img(9, 7);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) img.at(x, y) = u(rng);
  auto [gx, gy] = gradient(img);
  for (int y = 1; y < 6; ++y)
    for (int x = 1; x < 8; ++x) {
      EXPECT_DOUBLE_EQ(gx.at(x, y), 0.5 * (img.at(x + 1, y) - img.at(x - 1, y)));
      EXPECT_DOUBLE_EQ(gy.at(x, y), 0.5 * (img.at(x, y + 1) - img.at(x, y - 1)));
    }
}

TEST(Image, GradientTooSmallThrows) {
  Image2D img(2, 5, 0.0);
  EXPECT_THROW(gradient(img), std::invalid_argument);
}
