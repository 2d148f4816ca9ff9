// Per-frame orchestration: flow -> dynamic observation -> quality scores ->
// (initialization | change residuals -> decision -> benchmark update) ->
// pose path (feature VO for reliable frames, direct refinement + fusion for
// problematic ones).
#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynavo/core/optical_flow.hpp"
#include "dynavo/decision/scene_decision.hpp"
#include "dynavo/io/trajectory_io.hpp"
#include "dynavo/pipeline/config.hpp"
#include "dynavo/quality/frame_quality.hpp"
#include "dynavo/refine/direct_align.hpp"
#include "dynavo/refine/feature_vo.hpp"
#include "dynavo/refine/fusion.hpp"
#include "dynavo/refine/signature.hpp"

namespace dynavo {

struct FrameInput {
  double timestamp = 0.0;
  Image2D intensity;
  Image2D depth;
  std::vector<Detection> detections;
  std::optional<PoseSE3> gt_pose;
};

// Sequential access to a sequence without holding every frame in memory.
class FrameProvider {
 public:
  virtual ~FrameProvider() = default;
  virtual size_t size() const = 0;
  virtual FrameInput load(size_t index) = 0;
};

enum class PoseProvenance { Feature, Fused, FeatureFallback };

inline const char* to_string(PoseProvenance p) {
  switch (p) {
    case PoseProvenance::Fused: return "fused";
    case PoseProvenance::FeatureFallback: return "feature_fallback";
    default: return "feature";
  }
}

struct FrameDecisionRow {
  int frame_index = 0;
  double timestamp = 0.0;
  bool init_phase = false;
  QualityReport quality;
  ChangeReport change;
  double dynamic_ratio = 0.0;
  double w_base = 1.0;
  Scenario scenario = Scenario::None;
  double s_final = 0.0;
  bool good = true;
  PoseProvenance provenance = PoseProvenance::Feature;
};

struct PipelineCounts {
  int frames = 0;
  int good = 0;
  int bad = 0;
  int fused = 0;
  int feature_fallback = 0;
  int benchmark_updates = 0;
  int tracking_lost = 0;
};

struct PipelineResult {
  Trajectory trajectory;
  std::vector<FrameDecisionRow> decisions;
  PipelineCounts counts;
  Benchmark benchmark;
};

struct PipelineOptions {
  bool refine = true;  // false: feature VO only (ablation baseline)
  // optional externally supplied feature poses (world, matched by timestamp)
  const Trajectory* external_poses = nullptr;
  double external_pose_tolerance = 1e-4;
};

class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& cfg, const PipelineOptions& opts = {})
      : cfg_(cfg), opts_(opts), init_state_(cfg.init), pool_(cfg.pool_capacity) {
    cfg_.validate();
    grid_ = make_grid_points(cfg_.camera.width, cfg_.camera.height, cfg_.flow_grid_step);
  }

  PipelineResult run(FrameProvider& frames) {
    PipelineResult result;
    for (size_t i = 0; i < frames.size(); ++i) process(frames.load(i), result);
    if (benchmark_) result.benchmark = *benchmark_;
    return result;
  }

 private:
  struct FrameCache {
    double timestamp = 0.0;
    Image2D intensity;
    Image2D depth;
    Pyramid intensity_pyr;  // flow levels
    std::vector<Detection> detections;
    FlowField flow;
    FrameSignature signature;
    BinaryMask dyn_mask;
    double s_total = 0.0;
    QualityReport quality;
  };

  FlowField empty_flow() const {
    FlowField f;
    f.points = grid_;
    f.flow.assign(grid_.size(), Vec2::Zero());
    f.valid.assign(grid_.size(), 0);
    return f;
  }

  void process(FrameInput input, PipelineResult& result) {
    const int index = result.counts.frames;
    const CameraIntrinsics& K = cfg_.camera;

    FrameCache cur;
    cur.timestamp = input.timestamp;
    cur.intensity = std::move(input.intensity);
    cur.depth = std::move(input.depth);
    cur.detections = std::move(input.detections);
    for (auto& det : cur.detections) clamp_to_image(det, K.width, K.height);
    cur.intensity_pyr = build_pyramid(cur.intensity, cfg_.flow_levels);
    cur.flow = prev_ ? lk_flow(prev_->intensity_pyr, cur.intensity_pyr, grid_, cfg_.lk)
                     : empty_flow();

    const DynamicObservation dyn =
        dynamic_observe(cur.detections, prev_ ? cur.flow : FlowField{}, cur.depth, K, cfg_.dyn);
    cur.dyn_mask = dyn.mask;
    cur.signature = make_signature(cur.depth, &cur.flow);

    cur.quality = make_report(cfg_.quality_weights, score_confidence(cur.detections),
                              score_spatial(cur.detections, K),
                              score_feature(cur.intensity, cfg_.feature_score),
                              score_depth(cur.depth, cfg_.depth_score));
    cur.s_total = cur.quality.s_total;

    // feature odometry (or the external pose override); the first frame
    // anchors the trajectory at the origin
    PoseSE3 x_feat = world_pose_;
    if (const PoseSE3* ext = external_pose(cur.timestamp)) {
      x_feat = *ext;
    } else if (prev_) {
      const VoResult vo = feature_vo(prev_->intensity_pyr, prev_->depth, cur.intensity_pyr,
                                     cur.depth, cur.dyn_mask, K, cfg_.vo);
      if (vo.ok) {
        x_feat = world_pose_ * vo.pose;
      } else {
        x_feat = world_pose_ * last_relative_;  // constant-velocity fallback
        ++result.counts.tracking_lost;
      }
    }

    FrameDecisionRow row;
    row.frame_index = index;
    row.timestamp = cur.timestamp;
    row.quality = cur.quality;
    row.dynamic_ratio = dyn.dynamic_ratio;

    PoseSE3 x_final = x_feat;
    if (!benchmark_) {
      row.init_phase = true;
      row.s_final = cur.s_total;
      row.good = true;
      row.provenance = PoseProvenance::Feature;
      step_initialization(cur, x_feat, result);
    } else {
      const double s_mc = motion_residual(cur.flow, bench_cache_.flow, K.width, K.height,
                                          cfg_.saturation);
      const double s_dc = depth_residual(cur.depth, bench_cache_.depth, cfg_.saturation);
      const double s_dec = detection_residual(cur.detections, bench_cache_.detections);
      row.change = change_score(cfg_.change_weights, s_mc, s_dc, s_dec);

      const SceneDecision dec = decide(cfg_.decision, cur.quality, row.change, dyn.dynamic_ratio);
      row.w_base = dec.w_base_used;
      row.scenario = dec.scenario;
      row.s_final = dec.s_final;
      row.good = dec.good;

      if (benchmark_update(*benchmark_, cur.s_total, dec.good, index)) {
        ++result.counts.benchmark_updates;
        update_benchmark_cache(cur);
      }

      if (dec.good) {
        ++result.counts.good;
        row.provenance = PoseProvenance::Feature;
        x_final = x_feat;
        offer_to_pool(cur, x_final);
      } else {
        ++result.counts.bad;
        x_final = refine_bad_frame(cur, x_feat, row.change.s_change, row.provenance);
        if (row.provenance == PoseProvenance::Fused) ++result.counts.fused;
        else ++result.counts.feature_fallback;
      }
    }

    // bookkeeping
    last_relative_ = world_pose_.inverse() * x_final;
    world_pose_ = x_final;
    result.trajectory.push_back({cur.timestamp, x_final});
    result.decisions.push_back(row);
    ++result.counts.frames;

    prev_ = std::make_unique<FrameCache>(std::move(cur));
  }

  void step_initialization(const FrameCache& cur, const PoseSE3& x_feat,
                           PipelineResult& result) {
    ++result.counts.good;  // initialization frames gate as reliable
    const InitDecision d = init_state_.step(cur.quality);
    const int n = init_state_.frame_count();
    if (init_state_.best_qualifier_index() == n) qualifier_cache_ = snapshot(cur, x_feat);
    if (init_state_.best_overall_index() == n) overall_cache_ = snapshot(cur, x_feat);

    if (d.selected) {
      benchmark_ = Benchmark{d.reference_report.s_total, d.reference_index};
      const auto& chosen =
          d.reference_index == init_state_.best_qualifier_index() && qualifier_cache_
              ? *qualifier_cache_
              : *overall_cache_;
      bench_cache_ = chosen;
      pool_.push(make_ref_entry(chosen));
    }
  }

  struct BenchCache {
    double timestamp = 0.0;
    FlowField flow;
    Image2D depth;
    Image2D intensity;
    std::vector<Detection> detections;
    FrameSignature signature;
    BinaryMask dyn_mask;
    PoseSE3 world_pose;
  };

  BenchCache snapshot(const FrameCache& cur, const PoseSE3& pose) const {
    return {cur.timestamp,  cur.flow,      cur.depth,    cur.intensity,
            cur.detections, cur.signature, cur.dyn_mask, pose};
  }

  void update_benchmark_cache(const FrameCache& cur) {
    bench_cache_ = snapshot(cur, world_pose_);
  }

  RefEntry make_ref_entry(const BenchCache& c) const {
    RefEntry e;
    e.timestamp = c.timestamp;
    e.signature = c.signature;
    e.world_pose = c.world_pose;
    e.frame = std::make_shared<AlignFrame>(
        AlignFrame::build(c.intensity, c.depth, cfg_.robust.pyramid_levels, c.dyn_mask));
    return e;
  }

  void offer_to_pool(const FrameCache& cur, const PoseSE3& pose) {
    RefEntry e;
    e.timestamp = cur.timestamp;
    e.signature = cur.signature;
    e.world_pose = pose;
    e.frame = std::make_shared<AlignFrame>(
        AlignFrame::build(cur.intensity, cur.depth, cfg_.robust.pyramid_levels, cur.dyn_mask));
    pool_.push(std::move(e));
  }

  PoseSE3 refine_bad_frame(const FrameCache& cur, const PoseSE3& x_feat, double s_change,
                           PoseProvenance& provenance) {
    provenance = PoseProvenance::FeatureFallback;
    if (!opts_.refine || pool_.empty()) return x_feat;
    const auto refs = select_references(pool_, cur.signature, cfg_.fusion.th_keyframes);
    if (refs.empty()) return x_feat;

    const AlignFrame frame =
        AlignFrame::build(cur.intensity, cur.depth, cfg_.robust.pyramid_levels);
    // warm starts: the feature pose and the constant-velocity prediction;
    // the feature pose can be badly corrupted on exactly these frames
    const std::vector<PoseSE3> starts{x_feat, world_pose_ * last_relative_};
    const AlignResult aligned = direct_align(frame, cur.timestamp, cur.dyn_mask, refs,
                                             cfg_.camera, cfg_.robust, starts);
    if (aligned.status != AlignStatus::Ok) return x_feat;
    provenance = PoseProvenance::Fused;
    return fuse(x_feat, aligned.pose, s_change, cfg_.fusion.mu);
  }

  const PoseSE3* external_pose(double timestamp) const {
    if (!opts_.external_poses) return nullptr;
    for (const auto& e : *opts_.external_poses)
      if (std::abs(e.timestamp - timestamp) <= opts_.external_pose_tolerance) return &e.pose;
    return nullptr;
  }

  PipelineConfig cfg_;
  PipelineOptions opts_;
  std::vector<Vec2> grid_;

  std::unique_ptr<FrameCache> prev_;
  PoseSE3 world_pose_;
  PoseSE3 last_relative_;
  InitState init_state_;
  std::optional<Benchmark> benchmark_;
  BenchCache bench_cache_;
  std::optional<BenchCache> qualifier_cache_;
  std::optional<BenchCache> overall_cache_;
  RefPool pool_;
};

inline PipelineResult run_pipeline(FrameProvider& frames, const PipelineConfig& cfg,
                                   const PipelineOptions& opts = {}) {
  Pipeline p(cfg, opts);
  return p.run(frames);
}

// --- output writers ---

inline void write_decisions_csv(const std::vector<FrameDecisionRow>& rows,
                                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write decisions file: " + path);
  out << "frame_index,timestamp,phase,s_conf,s_spatial,s_feature,s_depth,s_total,"
         "s_mc,s_dc,s_dec,s_change,dynamic_ratio,w_base,scenario,s_final,verdict,"
         "provenance\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.6f,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s,"
                  "%.9g,%s,%s\n",
                  r.frame_index, r.timestamp, r.init_phase ? "init" : "track",
                  r.quality.s_conf, r.quality.s_spatial, r.quality.s_feature,
                  r.quality.s_depth, r.quality.s_total, r.change.s_mc, r.change.s_dc,
                  r.change.s_dec, r.change.s_change, r.dynamic_ratio, r.w_base,
                  to_string(r.scenario), r.s_final, r.good ? "GOOD" : "BAD",
                  to_string(r.provenance));
    out << buf;
  }
}

}  // namespace dynavo
