// Canned synthetic scenarios and export of rendered sequences to the TUM
// on-disk layout (rgb/depth PNG trees, index files, groundtruth.txt,
// detections.jsonl).
#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynavo/io/png_io.hpp"
#include "dynavo/io/trajectory_io.hpp"
#include "dynavo/synth/synth_scene.hpp"

namespace dynavo {

inline CameraIntrinsics synth_intrinsics(int width = 320, int height = 240) {
  CameraIntrinsics K;
  K.fx = K.fy = 525.0 * width / 640.0;
  K.cx = (width - 1) / 2.0;
  K.cy = (height - 1) / 2.0;
  K.width = width;
  K.height = height;
  K.depth_scale = 5000.0;
  return K;
}

namespace scenario_detail {

inline Vec6 twist(double vx, double vy, double vz, double wx, double wy, double wz) {
  return (Vec6() << vx, vy, vz, wx, wy, wz).finished();
}

// camera script as a cumulative product of per-frame twists
inline std::vector<PoseSE3> integrate_script(int frames, const std::vector<Vec6>& deltas) {
  std::vector<PoseSE3> script;
  script.reserve(frames);
  PoseSE3 pose;
  for (int i = 0; i < frames; ++i) {
    script.push_back(pose);
    if (i < frames - 1) pose = pose * se3_exp(deltas[i]);
  }
  return script;
}

inline double deg(double d) { return d * M_PI / 180.0; }

}  // namespace scenario_detail

// Fixed camera over a textured plane; everything should gate GOOD.
inline SynthScene make_static_scene(int frames = 60, uint64_t seed = 11) {
  SynthScene s;
  s.K = synth_intrinsics();
  s.seed = seed;
  s.background.texture.seed = seed;
  s.camera_script.assign(frames, PoseSE3::identity());
  s.background.half_u = 4.0;
  s.background.half_v = 4.0;
  s.intensity_noise = 0.004;
  s.depth_noise = 0.002;
  return s;
}

// A large textured patch sweeps across the view while the camera translates
// slowly. The patch is not a-priori dynamic; flow deviation must flag it.
inline SynthScene make_dynamic_object_scene(int frames = 180, uint64_t seed = 23) {
  using namespace scenario_detail;
  SynthScene s;
  s.K = synth_intrinsics();
  s.seed = seed;
  s.background.texture.seed = seed;
  s.background.half_u = 6.0;
  s.background.half_v = 4.0;
  s.intensity_noise = 0.01;
  s.depth_noise = 0.01;

  std::vector<Vec6> deltas(frames, twist(0.002, 0.0005, 0.0, 0.0, deg(0.02), 0.0));
  s.camera_script = integrate_script(frames, deltas);

  SynthObject box;
  box.class_name = "box";
  box.confidence = 0.85;
  box.dynamic_prior = false;
  box.half_w = 0.74;
  box.half_h = 0.62;
  box.center0 = Vec3(-2.6, 0.05, 1.55);
  box.velocity = Vec3(0.032, 0.0, 0.0);
  box.texture.seed = seed ^ 0xbeef;
  box.texture.base = 0.45;
  s.objects.push_back(box);
  return s;
}

// Camera pitches up past the edge of the scene plane into a featureless,
// depthless void mid-sequence ("feature-poor ceiling").
inline SynthScene make_ceiling_sweep_scene(int frames = 240, uint64_t seed = 31) {
  using namespace scenario_detail;
  SynthScene s;
  s.K = synth_intrinsics();
  s.seed = seed;
  s.background.texture.seed = seed;
  s.background.half_u = 5.0;
  s.background.half_v = 1.3;
  s.intensity_noise = 0.004;
  s.depth_noise = 0.002;

  const int b = std::max(0, frames / 2 - 20), e = std::min(frames, frames / 2 + 20);
  std::vector<Vec6> deltas(frames, twist(0.001, 0.0, 0.0, 0.0, 0.0, 0.0));
  for (int i = b; i < e; ++i) {
    // smooth pitch bump past the upper plane edge and back, zero at both
    // ends; the view goes fully off-plane (no texture, no depth) at the peak
    const double t0 = static_cast<double>(i - b) / (e - b);
    const double t1 = static_cast<double>(i + 1 - b) / (e - b);
    auto angle = [&](double t) {
      const double st = std::sin(M_PI * t);
      return deg(65.0) * st * st;
    };
    deltas[i] = twist(0.001, 0.0, 0.0, angle(t1) - angle(t0), 0.0, 0.0);
  }
  s.camera_script = integrate_script(frames, deltas);

  SynthObject person;
  person.class_name = "person";
  person.confidence = 0.95;
  person.dynamic_prior = true;
  person.half_w = 0.18;
  person.half_h = 0.42;
  person.center0 = Vec3(0.8, 0.55, 1.9);
  person.velocity = Vec3(0.0005, 0.0, 0.0);
  person.texture.seed = seed ^ 0xfeed;
  s.objects.push_back(person);

  s.motion_depth_dropout_scale = 18.0;
  s = degrade(std::move(s), b, e, DegradeMode::Textureless);
  return s;
}

// Gentle continuous roll with a violent blurred roll burst mid-sequence;
// the detector drops out during the burst.
inline SynthScene make_fast_roll_scene(int frames = 240, uint64_t seed = 41) {
  using namespace scenario_detail;
  SynthScene s;
  s.K = synth_intrinsics();
  s.seed = seed;
  s.background.texture.seed = seed;
  s.background.half_u = 5.0;
  s.background.half_v = 4.0;
  s.intensity_noise = 0.004;
  s.depth_noise = 0.002;

  std::vector<Vec6> deltas(frames, twist(0.0008, 0.0, 0.0, 0.0, 0.0, deg(0.25)));
  s.camera_script = integrate_script(frames, deltas);

  SynthObject person;
  person.class_name = "person";
  person.confidence = 0.95;
  person.dynamic_prior = true;
  person.half_w = 0.18;
  person.half_h = 0.42;
  person.center0 = Vec3(0.75, 0.5, 1.9);
  person.texture.seed = seed ^ 0xfeed;
  s.objects.push_back(person);

  const int b = std::max(0, frames / 2 - 20), e = std::min(frames, frames / 2 + 20);
  s.motion_depth_dropout_scale = 18.0;
  s = degrade(std::move(s), b, e, DegradeMode::FastRotation, 35.0);
  s = degrade(std::move(s), b, e, DegradeMode::MotionBlur, 9);
  s = degrade(std::move(s), b, e, DegradeMode::Textureless, 0.12);
  s.phantom_detections.push_back({b, e, 3, 0.15});
  return s;
}

// Long mostly-benign sequence with two short degraded windows: a ceiling
// sweep (textureless, depthless view) and a violent blurred roll burst.
inline SynthScene make_gating_sequence(int frames = 900, uint64_t seed = 53,
                                       int* ceiling_begin = nullptr,
                                       int* ceiling_end = nullptr,
                                       int* roll_begin = nullptr, int* roll_end = nullptr) {
  using namespace scenario_detail;
  SynthScene s;
  s.K = synth_intrinsics();
  s.seed = seed;
  s.background.texture.seed = seed;
  s.background.half_u = 6.0;
  s.background.half_v = 1.3;
  s.intensity_noise = 0.004;
  s.depth_noise = 0.002;

  const int ca = frames / 3, ce = ca + 18;
  const int ra = 2 * frames / 3, re = ra + 18;
  if (ceiling_begin) *ceiling_begin = ca;
  if (ceiling_end) *ceiling_end = ce;
  if (roll_begin) *roll_begin = ra;
  if (roll_end) *roll_end = re;

  // gentle drift with direction reversals so the camera stays over the plane
  std::vector<Vec6> deltas(frames);
  for (int i = 0; i < frames; ++i) {
    const double phase = 2.0 * M_PI * i / 240.0;
    deltas[i] = twist(0.0012 * std::cos(phase), 0.0006 * std::sin(phase), 0.0,
                      0.0, deg(0.02) * std::cos(phase), 0.0);
  }
  for (int i = ca; i < ce; ++i) {
    const double t0 = static_cast<double>(i - ca) / (ce - ca);
    const double t1 = static_cast<double>(i + 1 - ca) / (ce - ca);
    auto angle = [&](double t) {
      const double st = std::sin(M_PI * t);
      return deg(65.0) * st * st;
    };
    deltas[i].tail<3>().x() += angle(t1) - angle(t0);
  }
  s.camera_script = integrate_script(frames, deltas);

  SynthObject person;
  person.class_name = "person";
  person.confidence = 0.95;
  person.dynamic_prior = true;
  person.half_w = 0.18;
  person.half_h = 0.42;
  person.center0 = Vec3(0.7, 0.5, 1.9);
  person.osc_amplitude = Vec3(0.05, 0.0, 0.0);
  person.osc_period = 150.0;
  person.texture.seed = seed ^ 0xfeed;
  s.objects.push_back(person);

  s.motion_depth_dropout_scale = 18.0;
  s = degrade(std::move(s), ca, ce, DegradeMode::Textureless);
  s = degrade(std::move(s), ra, re, DegradeMode::FastRotation, 35.0);
  s = degrade(std::move(s), ra, re, DegradeMode::MotionBlur, 9);
  s = degrade(std::move(s), ra, re, DegradeMode::Textureless, 0.12);
  s.phantom_detections.push_back({ra, re, 3, 0.15});
  return s;
}

inline SynthScene make_scenario(const std::string& name, int frames = 0, uint64_t seed = 0) {
  if (name == "static") return make_static_scene(frames > 0 ? frames : 60, seed ? seed : 11);
  if (name == "dynamic_object")
    return make_dynamic_object_scene(frames > 0 ? frames : 180, seed ? seed : 23);
  if (name == "ceiling_sweep")
    return make_ceiling_sweep_scene(frames > 0 ? frames : 240, seed ? seed : 31);
  if (name == "fast_roll")
    return make_fast_roll_scene(frames > 0 ? frames : 240, seed ? seed : 41);
  throw std::invalid_argument("unknown scenario '" + name +
                              "' (valid: static, dynamic_object, ceiling_sweep, fast_roll)");
}

inline nlohmann::json detection_to_json(const Detection& det) {
  nlohmann::json j;
  j["class"] = det.class_name;
  j["conf"] = det.confidence;
  j["bbox"] = {det.x, det.y, det.w, det.h};
  j["dynamic_prior"] = det.dynamic_prior;
  if (det.mask) {
    j["mask_rle"] = encode_rle(det.mask->bits);
    j["mask_scope"] = det.mask->image_scope ? "image" : "bbox";
    j["mask_size"] = {det.mask->width, det.mask->height};
  }
  return j;
}

// Write the rendered sequence in the TUM layout so the full CLI path can be
// exercised from files.
inline void export_tum_sequence(const SynthScene& scene, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "rgb");
  fs::create_directories(fs::path(dir) / "depth");

  std::ofstream rgb_index((fs::path(dir) / "rgb.txt").string());
  std::ofstream depth_index((fs::path(dir) / "depth.txt").string());
  std::ofstream det_file((fs::path(dir) / "detections.jsonl").string());
  rgb_index << "# timestamp filename\n";
  depth_index << "# timestamp filename\n";

  {
    std::ofstream cam((fs::path(dir) / "camera.txt").string());
    cam << "# fx fy cx cy width height depth_scale\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %.9g %d %d %.9g\n", scene.K.fx,
                  scene.K.fy, scene.K.cx, scene.K.cy, scene.K.width, scene.K.height,
                  scene.K.depth_scale);
    cam << line;
  }

  SynthRenderer renderer(scene);
  Trajectory gt;
  char name[64], ts[32];
  for (int i = 0; i < scene.num_frames(); ++i) {
    const RenderedFrame frame = renderer.render(i);
    std::snprintf(ts, sizeof(ts), "%.6f", frame.timestamp);
    std::snprintf(name, sizeof(name), "%s.png", ts);
    write_intensity_png((fs::path(dir) / "rgb" / name).string(), frame.intensity);
    write_depth_png((fs::path(dir) / "depth" / name).string(), frame.depth,
                    scene.K.depth_scale);
    rgb_index << ts << " rgb/" << name << "\n";
    depth_index << ts << " depth/" << name << "\n";
    gt.push_back({frame.timestamp, frame.gt_pose});

    nlohmann::json row;
    row["timestamp"] = frame.timestamp;
    row["objects"] = nlohmann::json::array();
    for (const auto& det : frame.detections) row["objects"].push_back(detection_to_json(det));
    det_file << row.dump() << "\n";
  }
  write_trajectory(gt, (fs::path(dir) / "groundtruth.txt").string());
}

}  // namespace dynavo
