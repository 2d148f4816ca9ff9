#include <gtest/gtest.h>

#include <random>

#include "dynavo/decision/scene_decision.hpp"

using namespace dynavo;

namespace {

FlowField uniform_flow(int w, int h, const Vec2& d) {
  FlowField f;
  f.points = make_grid_points(w, h, 8);
  f.flow.assign(f.points.size(), d);
  f.valid.assign(f.points.size(), 1);
  return f;
}

Detection det(double x, double y, double w, double h, const std::string& cls = "person") {
  Detection d;
  d.class_name = cls;
  d.confidence = 0.9;
  d.x = x;
  d.y = y;
  d.w = w;
  d.h = h;
  return d;
}

QualityReport report(double conf, double spatial, double feature, double depth) {
  return make_report(QualityWeights{}, conf, spatial, feature, depth);
}

}  // namespace

TEST(MotionResidual, IdenticalFlowsZero) {
  auto f = uniform_flow(128, 96, Vec2(1.5, -0.5));
  EXPECT_DOUBLE_EQ(motion_residual(f, f, 128, 96), 0.0);
}

TEST(MotionResidual, SaturatesAtFivePixels) {
  auto a = uniform_flow(128, 96, Vec2(5.0, 0.0));
  auto b = uniform_flow(128, 96, Vec2(0.0, 0.0));
  EXPECT_DOUBLE_EQ(motion_residual(a, b, 128, 96), 1.0);
}

TEST(MotionResidual, HalfSaturationAtHalfDeviation) {
  auto a = uniform_flow(128, 96, Vec2(2.5, 0.0));
  auto b = uniform_flow(128, 96, Vec2(0.0, 0.0));
  EXPECT_NEAR(motion_residual(a, b, 128, 96), 0.5, 1e-12);
}

TEST(MotionResidual, NoMutualSamplesIsMaxDistrust) {
  auto a = uniform_flow(128, 96, Vec2(1.0, 0.0));
  auto b = a;
  std::fill(b.valid.begin(), b.valid.end(), 0);
  EXPECT_DOUBLE_EQ(motion_residual(a, b, 128, 96), 1.0);
}

TEST(MotionResidual, GridMismatchThrows) {
  auto a = uniform_flow(128, 96, Vec2(1.0, 0.0));
  auto b = uniform_flow(64, 96, Vec2(1.0, 0.0));
  EXPECT_THROW(motion_residual(a, b, 128, 96), std::invalid_argument);
}

TEST(DepthResidual, IdenticalZero) {
  Image2D d(32, 32, 2.0);
  EXPECT_DOUBLE_EQ(depth_residual(d, d), 0.0);
}

TEST(DepthResidual, UniformHalfMeterOffset) {
  Image2D a(32, 32, 2.5), b(32, 32, 2.0);
  // mean 0.5, std 0 -> (0.5 + 0)/2 / 0.5 = 0.5
  EXPECT_NEAR(depth_residual(a, b), 0.5, 1e-12);
}

TEST(DepthResidual, DisjointValidityIsOne) {
  Image2D a(16, 16, 0.0), b(16, 16, 0.0);
  for (int x = 0; x < 8; ++x) a.at(x, 0) = 2.0;
  for (int x = 8; x < 16; ++x) b.at(x, 0) = 2.0;
  EXPECT_DOUBLE_EQ(depth_residual(a, b), 1.0);
}

TEST(DepthResidual, DimensionMismatchThrows) {
  EXPECT_THROW(depth_residual(Image2D(8, 8, 1.0), Image2D(8, 9, 1.0)), std::invalid_argument);
}

TEST(DetectionResidual, IdenticalListsZero) {
  std::vector<Detection> dets{det(0, 0, 10, 10), det(50, 50, 10, 10)};
  EXPECT_DOUBLE_EQ(detection_residual(dets, dets), 0.0);
}

TEST(DetectionResidual, ShiftedBoxThirdIoU) {
  // IoU = 50/150 = 1/3; s_dec = (0 + 2/3)/2 = 1/3
  EXPECT_NEAR(detection_residual({det(0, 0, 10, 10)}, {det(5, 0, 10, 10)}), 1.0 / 3.0, 1e-12);
}

TEST(DetectionResidual, TotalChangeEndpoint) {
  EXPECT_DOUBLE_EQ(detection_residual({det(0, 0, 10, 10), det(20, 0, 10, 10)}, {}), 1.0);
  EXPECT_DOUBLE_EQ(detection_residual({}, {}), 0.0);
}

TEST(DetectionResidual, Symmetric) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Detection> a, b;
    for (int i = 0; i < trial % 4; ++i)
      a.push_back(det(u(rng), u(rng), u(rng) + 1, u(rng) + 1, (trial + i) % 2 ? "p" : "q"));
    for (int i = 0; i < (trial + 1) % 4; ++i)
      b.push_back(det(u(rng), u(rng), u(rng) + 1, u(rng) + 1, (trial + i) % 2 ? "p" : "q"));
    EXPECT_DOUBLE_EQ(detection_residual(a, b), detection_residual(b, a));
  }
}

TEST(ChangeScore, WeightedSumExamples) {
  ChangeWeights cw;  // 0.4, 0.3, 0.3
  EXPECT_DOUBLE_EQ(change_score(cw, 0, 0, 0).s_change, 0.0);
  EXPECT_DOUBLE_EQ(change_score(cw, 1, 1, 1).s_change, 1.0);
  EXPECT_NEAR(change_score(cw, 0.5, 0.2, 0.1).s_change, 0.29, 1e-12);
}

TEST(AdaptiveWeights, Examples) {
  DecisionConfig cfg;  // w_base0 0.6, a 0.5
  auto [w0, c0] = adaptive_weights(cfg, 0.0);
  EXPECT_DOUBLE_EQ(w0, 0.6);
  EXPECT_DOUBLE_EQ(c0, 0.4);
  cfg.a = 1.0;
  auto [w1, c1] = adaptive_weights(cfg, 0.8);
  EXPECT_DOUBLE_EQ(w1, 0.0);
  EXPECT_DOUBLE_EQ(c1, 1.0);
  cfg.a = 0.5;
  auto [w2, c2] = adaptive_weights(cfg, 0.4);
  EXPECT_NEAR(w2, 0.4, 1e-12);
  EXPECT_NEAR(c2, 0.6, 1e-12);
}

TEST(AdaptiveWeights, SumExactlyOneUnderFuzz) {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DecisionConfig cfg;
  for (int i = 0; i < 100000; ++i) {
    cfg.w_base0 = u(rng);
    cfg.a = 2.0 * u(rng);
    auto [w, c] = adaptive_weights(cfg, u(rng));
    EXPECT_EQ(w + c, 1.0);
  }
}

TEST(Decide, PaperDisplayedFrameIsGood) {
  // a mid-quality frame scoring ~0.36 gates GOOD at th_differ 0.30
  DecisionConfig cfg;
  QualityReport q = report(0.5, 0.5, 0.5, 0.5);
  ChangeReport c = change_score(ChangeWeights{}, 0.75, 0.75, 0.75);
  const SceneDecision d = decide(cfg, q, c, 0.3);
  ASSERT_EQ(d.scenario, Scenario::None);
  EXPECT_NEAR(d.s_final, 0.36, 0.01);
  EXPECT_TRUE(d.good);
}

TEST(Decide, PerfectFrameScoresOne) {
  DecisionConfig cfg;
  QualityReport q = report(1, 1, 1, 1);
  ChangeReport c = change_score(ChangeWeights{}, 0, 0, 0);
  const SceneDecision d = decide(cfg, q, c, 0.0);
  // w_base + w_change = 1 with s_total = 1 and no change; static boost caps at 1
  EXPECT_DOUBLE_EQ(d.s_final, 1.0);
  EXPECT_TRUE(d.good);
}

TEST(Decide, HighlyDynamicHalvesBaseWeight) {
  DecisionConfig cfg;
  QualityReport q = report(0.5, 0.5, 0.5, 0.5);
  ChangeReport c = change_score(ChangeWeights{}, 0.5, 0.5, 0.5);
  const SceneDecision d = decide(cfg, q, c, 0.6);
  EXPECT_EQ(d.scenario, Scenario::HighlyDynamic);
  // w_base = max(0, 0.6 - 0.5*0.6)/2 = 0.15
  EXPECT_NEAR(d.w_base_used, 0.15, 1e-12);
  EXPECT_DOUBLE_EQ(d.w_base_used + d.w_change_used, 1.0);
}

TEST(Decide, ScenarioPriorityOrder) {
  DecisionConfig cfg;
  // both static and high-confidence fire conditions; static wins
  QualityReport q = report(0.95, 1.0, 0.9, 1.0);
  ChangeReport c{};
  EXPECT_EQ(decide(cfg, q, c, 0.0).scenario, Scenario::HighlyStatic);
  // high-confidence fires when the feature score disqualifies static
  QualityReport q2 = report(0.95, 1.0, 0.3, 1.0);
  EXPECT_EQ(decide(cfg, q2, c, 0.0).scenario, Scenario::HighConfidence);
  // highly dynamic beats both
  EXPECT_EQ(decide(cfg, q, c, 0.9).scenario, Scenario::HighlyDynamic);
}

TEST(Decide, VerdictThresholdIsGreaterOrEqual) {
  DecisionConfig cfg;
  cfg.th_differ = 0.5;
  QualityReport q = report(0.5, 0.5, 0.5, 0.5);  // s_total = 0.5
  ChangeReport c = change_score(ChangeWeights{}, 0.5, 0.5, 0.5);
  // s_final = 0.6*0.5 + 0.4*0.5 = 0.5 exactly -> GOOD at >= semantics
  const SceneDecision d = decide(cfg, q, c, 0.3);
  ASSERT_EQ(d.scenario, Scenario::None);
  EXPECT_DOUBLE_EQ(d.s_final, 0.5);
  EXPECT_TRUE(d.good);
}

TEST(Decide, MonotoneInTotalAndChange) {
  DecisionConfig cfg;
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double ratio = 0.2;  // fixed: no scenario switch across comparisons
    const double s_mc = u(rng), s_dc = u(rng), s_dec = u(rng);
    ChangeReport c = change_score(ChangeWeights{}, s_mc, s_dc, s_dec);
    QualityReport lo = report(0.4, 0.5, 0.4, 0.5);
    QualityReport hi = lo;
    hi.s_total = lo.s_total + 0.2;
    EXPECT_GE(decide(cfg, hi, c, ratio).s_final, decide(cfg, lo, c, ratio).s_final);
    ChangeReport c_hi = c;
    c_hi.s_change = std::min(1.0, c.s_change + 0.2);
    EXPECT_LE(decide(cfg, lo, c_hi, ratio).s_final, decide(cfg, lo, c, ratio).s_final);
  }
}

TEST(BenchmarkUpdate, Examples) {
  Benchmark b{0.6, 3};
  EXPECT_TRUE(benchmark_update(b, 0.7, true, 10));
  EXPECT_DOUBLE_EQ(b.s_initial, 0.7);
  EXPECT_EQ(b.ref_frame_index, 10);
  EXPECT_FALSE(benchmark_update(b, 0.5, true, 11));   // quality gate
  EXPECT_FALSE(benchmark_update(b, 0.75, false, 12)); // verdict gate
  EXPECT_DOUBLE_EQ(b.s_initial, 0.7);
}

TEST(BenchmarkUpdate, NonDecreasingUnderFuzz) {
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Benchmark b{u(rng), 0};
  double prev = b.s_initial;
  for (int i = 0; i < 100000; ++i) {
    benchmark_update(b, u(rng), u(rng) < 0.5, i);
    EXPECT_GE(b.s_initial, prev);
    prev = b.s_initial;
  }
}
