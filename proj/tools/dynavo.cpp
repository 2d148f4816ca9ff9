// dynavo batch CLI: run the gating + refinement pipeline over a sequence,
// evaluate trajectories, or generate synthetic TUM-layout sequences.
//
// Exit codes: 0 ok, 2 input/config error, 3 evaluation error.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "dynavo/eval/metrics.hpp"
#include "dynavo/eval/svg_plot.hpp"
#include "dynavo/io/camera_file.hpp"
#include "dynavo/pipeline/config.hpp"
#include "dynavo/pipeline/pipeline.hpp"
#include "dynavo/pipeline/providers.hpp"
#include "dynavo/synth/scenarios.hpp"

namespace fs = std::filesystem;
using namespace dynavo;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };
LogLevel g_log_level = LogLevel::Info;

void logf(LogLevel level, const char* fmt, auto... args) {
  if (level > g_log_level) return;
  const char* tag[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] ", tag[static_cast<int>(level)]);
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

LogLevel parse_log_level(const std::string& s) {
  if (s == "error") return LogLevel::Error;
  if (s == "warn") return LogLevel::Warn;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  throw CLI::ValidationError("--log-level", "must be one of error|warn|info|debug");
}

int thread_cap() {
  if (const char* env = std::getenv("DYNAVO_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
    logf(LogLevel::Warn, "ignoring invalid DYNAVO_THREADS value '%s'", env);
  }
  return 0;  // unlimited
}

int run_command(const std::string& seq_dir, const std::string& config_path,
                const std::string& out_dir, const std::string& detections_path,
                const std::string& external_poses_path, size_t limit, bool no_refine) {
  PipelineConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (const auto K = read_camera_file(seq_dir)) {
    cfg.camera = *K;
    logf(LogLevel::Info, "camera intrinsics from %s/camera.txt", seq_dir.c_str());
  }
  cfg.validate();

  SequenceData seq = load_tum_sequence(seq_dir, cfg.assoc_tolerance);
  logf(LogLevel::Info, "loaded %zu frames (%d rgb / %d depth rows dropped)",
       seq.frames.size(), seq.dropped_rgb, seq.dropped_depth);

  if (!detections_path.empty()) {
    const auto detmap = load_detections(detections_path);
    std::vector<double> frame_ts, det_ts;
    std::vector<const std::vector<Detection>*> det_lists;
    for (const auto& f : seq.frames) frame_ts.push_back(f.timestamp);
    for (const auto& [ts, dets] : detmap) {
      det_ts.push_back(ts);
      det_lists.push_back(&dets);
    }
    for (auto& f : seq.frames) f.detections.clear();
    for (const auto& [fi, di] : associate_timestamps(frame_ts, det_ts, cfg.assoc_tolerance))
      seq.frames[fi].detections = *det_lists[di];
  }

  Trajectory external;
  PipelineOptions opts;
  opts.refine = !no_refine;
  if (!external_poses_path.empty()) {
    external = read_trajectory(external_poses_path);
    opts.external_poses = &external;
    logf(LogLevel::Info, "using %zu external feature poses", external.size());
  }

  fs::create_directories(out_dir);
  TumFrameProvider frames(std::move(seq), cfg.camera, limit);
  const PipelineResult result = run_pipeline(frames, cfg, opts);

  write_trajectory(result.trajectory, (fs::path(out_dir) / "trajectory.txt").string());
  write_decisions_csv(result.decisions, (fs::path(out_dir) / "decisions.csv").string());

  nlohmann::json summary;
  summary["frames"] = result.counts.frames;
  summary["good"] = result.counts.good;
  summary["bad"] = result.counts.bad;
  summary["fused"] = result.counts.fused;
  summary["feature_fallback"] = result.counts.feature_fallback;
  summary["benchmark_updates"] = result.counts.benchmark_updates;
  summary["tracking_lost"] = result.counts.tracking_lost;
  summary["benchmark_s_initial"] = result.benchmark.s_initial;
  summary["benchmark_ref_frame"] = result.benchmark.ref_frame_index;
  std::ofstream(fs::path(out_dir) / "summary.json") << summary.dump(2) << "\n";

  logf(LogLevel::Info, "%d frames: %d GOOD, %d BAD (%d fused, %d fallback)",
       result.counts.frames, result.counts.good, result.counts.bad, result.counts.fused,
       result.counts.feature_fallback);
  return 0;
}

int eval_command(const std::string& est_path, const std::string& gt_path,
                 const std::string& out_dir) {
  const Trajectory est = read_trajectory(est_path);
  const Trajectory gt = read_trajectory(gt_path);

  std::vector<MatchedPose> pairs;
  AteResult ate_result;
  RpeResult rpe_result;
  try {
    pairs = associate_trajectories(est, gt);
    ate_result = ate(est, gt);
    rpe_result = rpe(est, gt, 1);
  } catch (const std::exception& e) {
    logf(LogLevel::Error, "evaluation failed: %s", e.what());
    return 3;
  }

  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / "metrics.csv");
    csv << "# rpe delta = 1 frame\n";
    csv << "sequence,ate_rmse,ate_std,t_rpe_rmse,t_rpe_std,rot_rpe_rmse,rot_rpe_std\n";
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", est_path.c_str(),
                  ate_result.rmse, ate_result.std_dev, rpe_result.trans_rmse,
                  rpe_result.trans_std, rpe_result.rot_rmse, rpe_result.rot_std);
    csv << buf;
  }
  write_trajectory_svg((fs::path(out_dir) / "trajectory.svg").string(), pairs,
                       ate_result.alignment);
  std::printf("ate_rmse %.6f m  ate_std %.6f m\n", ate_result.rmse, ate_result.std_dev);
  std::printf("t_rpe_rmse %.6f m  t_rpe_std %.6f m\n", rpe_result.trans_rmse,
              rpe_result.trans_std);
  std::printf("rot_rpe_rmse %.6f deg  rot_rpe_std %.6f deg\n", rpe_result.rot_rmse,
              rpe_result.rot_std);
  return 0;
}

int synth_command(const std::string& scenario, const std::string& out_dir, int frames,
                  uint64_t seed) {
  const SynthScene scene = make_scenario(scenario, frames, seed);
  fs::create_directories(out_dir);
  export_tum_sequence(scene, out_dir);
  logf(LogLevel::Info, "wrote %d-frame '%s' sequence to %s", scene.num_frames(),
       scenario.c_str(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive scene-quality gating and pose refinement for RGB-D odometry"};
  app.require_subcommand(1);

  std::string log_level = "info";
  app.add_option("--log-level", log_level, "error|warn|info|debug");

  auto* run = app.add_subcommand("run", "run the pipeline on a TUM-layout sequence");
  std::string seq_dir, config_path, out_dir = "out", detections_path, external_poses;
  size_t limit = 0;
  bool no_refine = false;
  run->add_option("--seq", seq_dir, "sequence directory")->required();
  run->add_option("--config", config_path, "pipeline config file");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--detections", detections_path, "detections.jsonl override");
  run->add_option("--external-poses", external_poses, "external feature-pose trajectory");
  run->add_option("--limit", limit, "process only the first N frames");
  run->add_flag("--no-refine", no_refine, "disable pose refinement (feature VO only)");

  auto* eval = app.add_subcommand("eval", "compare a trajectory against ground truth");
  std::string est_path, gt_path, eval_out = "out";
  eval->add_option("--est", est_path, "estimated trajectory (TUM format)")->required();
  eval->add_option("--gt", gt_path, "ground-truth trajectory (TUM format)")->required();
  eval->add_option("--out", eval_out, "output directory");

  auto* synth = app.add_subcommand("synth", "generate a synthetic TUM-layout sequence");
  std::string scenario, synth_out = "out";
  int synth_frames = 0;
  uint64_t synth_seed = 0;
  synth->add_option("--scenario", scenario,
                    "static | dynamic_object | ceiling_sweep | fast_roll")
      ->required();
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--frames", synth_frames, "frame count override");
  synth->add_option("--seed", synth_seed, "seed override");

  try {
    app.parse(argc, argv);
    g_log_level = parse_log_level(log_level);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (const int cap = thread_cap())
    logf(LogLevel::Debug, "DYNAVO_THREADS caps parallelism at %d", cap);

  try {
    if (run->parsed())
      return run_command(seq_dir, config_path, out_dir, detections_path, external_poses,
                         limit, no_refine);
    if (eval->parsed()) return eval_command(est_path, gt_path, eval_out);
    if (synth->parsed()) return synth_command(scenario, synth_out, synth_frames, synth_seed);
  } catch (const std::exception& e) {
    logf(LogLevel::Error, "%s", e.what());
    return 2;
  }
  return 2;
}
