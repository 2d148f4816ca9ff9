#include <gtest/gtest.h>

#include <random>

#include "dynavo/refine/signature.hpp"

using namespace dynavo;

namespace {
FrameSignature hist_signature(int bin) {
  FrameSignature s;
  s.depth_hist[bin] = 1.0;
  return s;
}
}  // namespace

TEST(Signature, ConstantDepthIsIndicatorBin) {
  Image2D depth(32, 32, 2.0);
  const FrameSignature s = make_signature(depth);
  for (int i = 0; i < FrameSignature::kBins; ++i)
    EXPECT_DOUBLE_EQ(s.depth_hist[i], i == 4 ? 1.0 : 0.0);  // [2.0, 2.5) is bin 4
}

TEST(Signature, NoValidDepthZeroHistogram) {
  Image2D depth(16, 16, 0.0);
  const FrameSignature s = make_signature(depth);
  for (double b : s.depth_hist) EXPECT_DOUBLE_EQ(b, 0.0);
}

TEST(Signature, StaticFlowZeroMotionDesc) {
  Image2D depth(32, 32, 1.5);
  FlowField flow;
  flow.points = make_grid_points(32, 32, 8);
  flow.flow.assign(flow.points.size(), Vec2::Zero());
  flow.valid.assign(flow.points.size(), 1);
  const FrameSignature s = make_signature(depth, &flow);
  EXPECT_DOUBLE_EQ(s.motion_desc.x(), 0.0);
  EXPECT_DOUBLE_EQ(s.motion_desc.y(), 0.0);
}

TEST(Signature, CoherentVsScatteredDirections) {
  Image2D depth(32, 32, 1.5);
  FlowField flow;
  flow.points = make_grid_points(32, 32, 8);
  flow.valid.assign(flow.points.size(), 1);
  flow.flow.assign(flow.points.size(), Vec2(2.0, 0.0));
  const FrameSignature coherent = make_signature(depth, &flow);
  EXPECT_NEAR(coherent.motion_desc.x(), 2.0, 1e-12);
  EXPECT_NEAR(coherent.motion_desc.y(), 0.0, 1e-12);

  for (size_t i = 0; i < flow.flow.size(); ++i)
    flow.flow[i] = (i % 2) ? Vec2(2.0, 0.0) : Vec2(-2.0, 0.0);
  const FrameSignature scattered = make_signature(depth, &flow);
  EXPECT_GT(scattered.motion_desc.y(), 0.9);  // opposing directions cancel
}

TEST(SignatureDistance, MetricProperties) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    FrameSignature a, b;
    double sa = 0, sb = 0;
    for (int i = 0; i < FrameSignature::kBins; ++i) {
      a.depth_hist[i] = u(rng);
      b.depth_hist[i] = u(rng);
      sa += a.depth_hist[i];
      sb += b.depth_hist[i];
    }
    for (int i = 0; i < FrameSignature::kBins; ++i) {
      a.depth_hist[i] /= sa;
      b.depth_hist[i] /= sb;
    }
    a.motion_desc = Vec2(u(rng) * 5, u(rng));
    b.motion_desc = Vec2(u(rng) * 5, u(rng));
    EXPECT_GE(signature_distance(a, b), 0.0);
    EXPECT_DOUBLE_EQ(signature_distance(a, b), signature_distance(b, a));
    EXPECT_DOUBLE_EQ(signature_distance(a, a), 0.0);
    if (signature_distance(a, b) == 0.0) {
      for (int i = 0; i < FrameSignature::kBins; ++i)
        EXPECT_DOUBLE_EQ(a.depth_hist[i], b.depth_hist[i]);
    }
  }
}

TEST(SelectReferences, SelfDistanceZeroSelected) {
  RefPool pool(3);
  RefEntry e;
  e.timestamp = 1.0;
  e.signature = hist_signature(4);
  pool.push(e);
  const auto refs = select_references(pool, e.signature, 0.5);
  ASSERT_EQ(refs.size(), 1u);
}

TEST(SelectReferences, OrthogonalIndicatorsExcluded) {
  RefPool pool(3);
  RefEntry e;
  e.signature = hist_signature(2);
  pool.push(e);
  // distance sqrt(2) ~ 1.414 > 0.5
  EXPECT_TRUE(select_references(pool, hist_signature(9), 0.5).empty());
}

TEST(SelectReferences, EmptyPoolNoReference) {
  RefPool pool(3);
  EXPECT_TRUE(select_references(pool, hist_signature(0), 10.0).empty());
}

TEST(SelectReferences, MostRecentFirst) {
  RefPool pool(3);
  for (int i = 0; i < 3; ++i) {
    RefEntry e;
    e.timestamp = i;
    e.signature = hist_signature(4);
    pool.push(e);
  }
  const auto refs = select_references(pool, hist_signature(4), 1.0);
  ASSERT_EQ(refs.size(), 3u);
  EXPECT_DOUBLE_EQ(refs[0].timestamp, 2.0);
  EXPECT_DOUBLE_EQ(refs[2].timestamp, 0.0);
}

TEST(RefPool, CapacityEvictsOldest) {
  RefPool pool(2);
  for (int i = 0; i < 5; ++i) {
    RefEntry e;
    e.timestamp = i;
    pool.push(e);
  }
  ASSERT_EQ(pool.size(), 2u);
  EXPECT_DOUBLE_EQ(pool.entries().front().timestamp, 3.0);
  EXPECT_DOUBLE_EQ(pool.entries().back().timestamp, 4.0);
}
