#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "dynavo/core/optical_flow.hpp"
#include "dynavo/io/tum_dataset.hpp"
#include "dynavo/quality/frame_quality.hpp"
#include "dynavo/refine/direct_align.hpp"
#include "dynavo/synth/scenarios.hpp"
#include "../oracle/synth_fixtures.hpp"

using namespace dynavo;
namespace fs = std::filesystem;

TEST(Synth, DeterministicForSameSeed) {
  const SynthScene scene = make_dynamic_object_scene(8, 99);
  const RenderedFrame a = render(scene, 5);
  const RenderedFrame b = render(scene, 5);
  ASSERT_EQ(a.intensity.size(), b.intensity.size());
  for (size_t i = 0; i < a.intensity.size(); ++i) {
    EXPECT_EQ(a.intensity.data()[i], b.intensity.data()[i]);
    EXPECT_EQ(a.depth.data()[i], b.depth.data()[i]);
  }
}

TEST(Synth, StaticSceneConsecutiveFramesIdentical) {
  SynthScene scene = make_static_scene(4, 7);
  scene.intensity_noise = 0.0;
  scene.depth_noise = 0.0;
  const RenderedFrame a = render(scene, 0);
  const RenderedFrame b = render(scene, 1);
  for (size_t i = 0; i < a.intensity.size(); ++i) {
    ASSERT_EQ(a.intensity.data()[i], b.intensity.data()[i]);
    ASSERT_EQ(a.depth.data()[i], b.depth.data()[i]);
  }
}

TEST(Synth, CameraTranslationShiftsImageByPinholeAmount) {
  const double Z = 2.5, tx = 0.05;
  SynthScene scene = fixtures::pair_scene(
      PoseSE3(Eigen::Quaterniond::Identity(), Vec3(tx, 0, 0)));
  const RenderedFrame f0 = render(scene, 0);
  const RenderedFrame f1 = render(scene, 1);
  const double shift = scene.K.fx * tx / Z;
  // sample a few interior pixels: frame1(x) should equal frame0(x + shift)
  for (int y = 60; y <= 180; y += 40)
    for (int x = 60; x <= 200; x += 35) {
      const auto expected = sample_bilinear(f0.intensity, x + shift, y);
      ASSERT_TRUE(expected);
      EXPECT_NEAR(f1.intensity.at(x, y), *expected, 5e-3);
    }
}

TEST(Synth, WarpConsistencyAcrossGroundTruthPose) {
  std::mt19937 rng(17);
  const Vec6 xi = fixtures::small_motion(rng, 3.0 * M_PI / 180.0, 0.05);
  SynthScene scene = fixtures::pair_scene(se3_exp(xi), 21);
  const RenderedFrame f0 = render(scene, 0);
  const RenderedFrame f1 = render(scene, 1);
  // warp frame0 pixels into frame1 with the exact relative pose
  const PoseSE3 T = f1.gt_pose.inverse() * f0.gt_pose;
  const auto residuals = compute_residuals(f0.intensity, f0.depth, f1.intensity, f1.depth,
                                           T, scene.K);
  double sum = 0.0;
  size_t n = 0;
  for (const auto& r : residuals) {
    if (!r.valid) continue;
    sum += std::abs(r.r_i);
    ++n;
  }
  ASSERT_GT(n, 10000u);
  EXPECT_LT(sum / n, 5e-3);
}

TEST(Synth, DynamicRectangleBboxAreaFraction) {
  SynthScene scene = fixtures::pair_scene(PoseSE3::identity());
  SynthObject obj;
  // projected extent: 2*half*fx/z per axis; pick ~10% of the image
  const double z = 1.6;
  obj.center0 = Vec3(0, 0, z);
  // projected square side sqrt(0.10 * W * H) px
  obj.half_w = std::sqrt(0.10 * scene.K.width * scene.K.height) * z / scene.K.fx / 2.0;
  obj.half_h = obj.half_w;
  obj.texture.seed = 77;
  scene.objects.push_back(obj);
  const RenderedFrame f = render(scene, 0);
  ASSERT_EQ(f.detections.size(), 1u);
  const double frac = f.detections[0].area() / (scene.K.width * scene.K.height);
  EXPECT_NEAR(frac, 0.10, 0.01);
}

TEST(Synth, TexturelessDegradeKillsFeatureScore) {
  SynthScene scene = make_static_scene(6, 13);
  scene.intensity_noise = 0.0;
  scene = degrade(std::move(scene), 2, 4, DegradeMode::Textureless);
  EXPECT_GT(score_feature(render(scene, 1).intensity), 0.5);
  EXPECT_LT(score_feature(render(scene, 2).intensity), 0.1);
  EXPECT_LT(score_feature(render(scene, 3).intensity), 0.1);
  EXPECT_GT(score_feature(render(scene, 4).intensity), 0.5);
}

TEST(Synth, DegradeLeavesOtherFramesBitExact) {
  SynthScene base = make_fast_roll_scene(12, 19);
  base.degradations.clear();
  base.detection_dropouts.clear();
  SynthScene degraded = degrade(base, 4, 8, DegradeMode::FastRotation, 20.0);
  degraded = degrade(std::move(degraded), 4, 8, DegradeMode::MotionBlur, 5);
  for (int i : {0, 1, 2, 3, 8, 9, 10, 11}) {
    const RenderedFrame a = render(base, i);
    const RenderedFrame b = render(degraded, i);
    for (size_t k = 0; k < a.intensity.size(); ++k) {
      ASSERT_EQ(a.intensity.data()[k], b.intensity.data()[k]) << "frame " << i;
      ASSERT_EQ(a.depth.data()[k], b.depth.data()[k]) << "frame " << i;
    }
  }
}

TEST(Synth, FastRotationRaisesFlowMagnitudes) {
  SynthScene base = make_static_scene(12, 23);
  base.intensity_noise = 0.0;
  SynthScene rolled = degrade(base, 4, 8, DegradeMode::FastRotation, 25.0);
  auto flow_mag = [&](const SynthScene& s, int i) {
    const Pyramid a = build_pyramid(render(s, i).intensity, 3);
    const Pyramid b = build_pyramid(render(s, i + 1).intensity, 3);
    const FlowField f = lk_flow(a, b, make_grid_points(320, 240, 24));
    double sum = 0;
    int n = 0;
    for (size_t k = 0; k < f.size(); ++k)
      if (f.valid[k]) {
        sum += f.flow[k].norm();
        ++n;
      }
    return n > 0 ? sum / n : 0.0;
  };
  // the bump profile is symmetric, so measure its rising edge
  const double baseline = flow_mag(rolled, 0);
  const double burst = flow_mag(rolled, 4);
  EXPECT_GT(burst, baseline + 2.0);
}

TEST(Synth, RenderOutOfRangeThrows) {
  const SynthScene scene = make_static_scene(4, 3);
  EXPECT_THROW(render(scene, 4), std::out_of_range);
  EXPECT_THROW(render(scene, -1), std::out_of_range);
}

TEST(Synth, ExportedSequenceLoadsWithZeroDrops) {
  const SynthScene scene = make_dynamic_object_scene(6, 29);
  const auto dir = fs::temp_directory_path() / "dynavo_synth_export_test";
  fs::remove_all(dir);
  export_tum_sequence(scene, dir.string());
  const SequenceData seq = load_tum_sequence(dir.string(), 0.02);
  EXPECT_EQ(seq.frames.size(), 6u);
  EXPECT_EQ(seq.dropped_rgb, 0);
  EXPECT_EQ(seq.dropped_depth, 0);
  ASSERT_TRUE(seq.frames[0].gt_pose.has_value());
  // depth PNG quantization at depth_scale 5000 is 0.1 mm
  const Image2D depth = load_depth_png(seq.frames[0].depth_path, scene.K.depth_scale);
  const RenderedFrame f0 = render(scene, 0);
  for (int y = 0; y < depth.height(); y += 17)
    for (int x = 0; x < depth.width(); x += 13) {
      if (!is_valid_depth(f0.depth.at(x, y))) continue;
      EXPECT_NEAR(depth.at(x, y), f0.depth.at(x, y), 2e-4);
    }
  fs::remove_all(dir);
}

TEST(Synth, UnknownScenarioThrows) {
  EXPECT_THROW(make_scenario("bogus"), std::invalid_argument);
}
