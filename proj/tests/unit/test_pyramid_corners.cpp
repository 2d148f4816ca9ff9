#include <gtest/gtest.h>

#include "dynavo/core/corners.hpp"
#include "dynavo/core/pyramid.hpp"

using namespace dynavo;

namespace {
Image2D checkerboard(int w, int h, int cell) {
  Image2D img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = ((x / cell + y / cell) % 2) ? 1.0 : 0.0;
  return img;
}
}  // namespace

TEST(Pyramid, SingleLevelIsOriginal) {
  Image2D img = checkerboard(16, 16, 2);
  Pyramid p = build_pyramid(img, 1);
  ASSERT_EQ(p.num_levels(), 1);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) EXPECT_DOUBLE_EQ(p.level(0).at(x, y), img.at(x, y));
}

TEST(Pyramid, ConstantStaysConstant) {
  Image2D img(16, 16, 0.7);
  Pyramid p = build_pyramid(img, 2);
  ASSERT_EQ(p.num_levels(), 2);
  EXPECT_EQ(p.level(1).width(), 8);
  EXPECT_EQ(p.level(1).height(), 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_DOUBLE_EQ(p.level(1).at(x, y), 0.7);
}

TEST(Pyramid, CheckerboardAveragesToHalf) {
  Image2D img = checkerboard(16, 16, 1);
  Pyramid p = build_pyramid(img, 2);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_DOUBLE_EQ(p.level(1).at(x, y), 0.5);
}

TEST(Pyramid, DepthInvalidExcludedFromAverage) {
  Image2D depth(16, 16, 2.0);
  depth.at(0, 0) = 0.0;  // one invalid pixel in the first 2x2 block
  depth.at(2, 0) = 0.0;  // fully invalid block
  depth.at(3, 0) = 0.0;
  depth.at(2, 1) = 0.0;
  depth.at(3, 1) = 0.0;
  Pyramid p = build_pyramid(depth, 2, PyramidKind::Depth);
  EXPECT_DOUBLE_EQ(p.level(1).at(0, 0), 2.0);   // average of the 3 valid values
  EXPECT_DOUBLE_EQ(p.level(1).at(1, 0), 0.0);   // all-invalid block stays invalid
  EXPECT_FALSE(is_valid_depth(p.level(1).at(1, 0)));
}

TEST(Pyramid, TooManyLevelsThrows) {
  Image2D img(32, 32, 0.0);
  EXPECT_NO_THROW(build_pyramid(img, 3));
  EXPECT_THROW(build_pyramid(img, 4), std::invalid_argument);
  EXPECT_THROW(build_pyramid(img, 0), std::invalid_argument);
}

TEST(Pyramid, OddDimensionsFloorDivide) {
  Image2D img(17, 33, 0.2);
  Pyramid p = build_pyramid(img, 2);
  EXPECT_EQ(p.level(1).width(), 8);
  EXPECT_EQ(p.level(1).height(), 16);
}

TEST(Corners, ConstantImageAllZero) {
  Image2D img(32, 32, 0.4);
  Image2D r = corner_response(img);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) EXPECT_DOUBLE_EQ(r.at(x, y), 0.0);
}

TEST(Corners, CheckerboardCornersPositive) {
  Image2D img = checkerboard(32, 32, 4);
  Image2D r = corner_response(img);
  double max_r = 0.0;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      EXPECT_GE(r.at(x, y), 0.0);
      max_r = std::max(max_r, r.at(x, y));
    }
  EXPECT_GT(max_r, 0.01);
  // cell corners carry the strongest response
  EXPECT_GT(r.at(4, 4), 0.5 * max_r);
}

TEST(Corners, VerticalEdgeHasNearZeroMinEigenvalue) {
  Image2D img(32, 32, 0.0);
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) img.at(x, y) = 1.0;
  Image2D r = corner_response(img);
  // along the edge, far from the top/bottom borders: aperture problem
  for (int y = 8; y < 24; ++y) EXPECT_NEAR(r.at(16, y), 0.0, 1e-9);
}

TEST(Corners, TooSmallThrows) {
  Image2D img(6, 32, 0.0);
  EXPECT_THROW(corner_response(img), std::invalid_argument);
}

TEST(Corners, DetectCornersSpacingAndOrder) {
  Image2D img = checkerboard(64, 64, 8);
  Image2D r = corner_response(img);
  auto pts = detect_corners(r, 20, 1e-6, 6.0);
  ASSERT_FALSE(pts.empty());
  EXPECT_LE(pts.size(), 20u);
  for (size_t i = 1; i < pts.size(); ++i) EXPECT_GE(pts[i - 1].response, pts[i].response);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
      EXPECT_GE(dx * dx + dy * dy, 36.0);
    }
}
