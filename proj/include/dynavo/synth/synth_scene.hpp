// Deterministic synthetic RGB-D sequences with exact ground truth: textured
// finite planes intersected analytically per pixel, dynamic rectangular
// patches composited by depth, exact detection boxes and masks, seeded noise.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynavo/core/camera.hpp"
#include "dynavo/core/image.hpp"
#include "dynavo/core/se3.hpp"
#include "dynavo/io/detections.hpp"

namespace dynavo {

namespace synth_detail {

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline double lattice_value(int64_t ix, int64_t iy, uint64_t seed) {
  const uint64_t h = mix64(mix64(static_cast<uint64_t>(ix) * 0x9e3779b97f4a7c15ull ^ seed) ^
                           static_cast<uint64_t>(iy) * 0xc2b2ae3d27d4eb4full);
  return (h >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
}

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// bilinear value noise in [-0.5, 0.5)
inline double value_noise(double u, double v, double cell, uint64_t seed) {
  const double fu = u / cell, fv = v / cell;
  const double bu = std::floor(fu), bv = std::floor(fv);
  const int64_t iu = static_cast<int64_t>(bu), iv = static_cast<int64_t>(bv);
  const double a = smoothstep(fu - bu), b = smoothstep(fv - bv);
  const double v00 = lattice_value(iu, iv, seed), v10 = lattice_value(iu + 1, iv, seed);
  const double v01 = lattice_value(iu, iv + 1, seed), v11 = lattice_value(iu + 1, iv + 1, seed);
  return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11 - 0.5;
}

}  // namespace synth_detail

struct TextureOctave {
  double cell;       // meters on the surface
  double amplitude;  // intensity units
};

struct SurfaceTexture {
  double base = 0.5;
  std::vector<TextureOctave> octaves = {
      {0.8, 0.30}, {0.20, 0.20}, {0.05, 0.12}, {0.016, 0.08}};
  double checker_cell = 0.35;
  double checker_amplitude = 0.08;
  uint64_t seed = 1;

  double sample(double u, double v, double amplitude_scale) const {
    double val = base;
    uint64_t s = seed;
    for (const auto& o : octaves) {
      val += amplitude_scale * o.amplitude * synth_detail::value_noise(u, v, o.cell, s);
      s = synth_detail::mix64(s);
    }
    if (checker_amplitude > 0.0) {
      const auto cellsum = static_cast<long long>(std::floor(u / checker_cell)) +
                           static_cast<long long>(std::floor(v / checker_cell));
      val += amplitude_scale * ((cellsum & 1) ? checker_amplitude : -checker_amplitude);
    }
    return std::clamp(val, 0.0, 1.0);
  }
};

struct SynthPlane {
  Vec3 point = Vec3(0, 0, 2.5);   // world point on the plane
  Vec3 normal = Vec3(0, 0, -1);   // unit, toward the camera
  Vec3 axis_u = Vec3(1, 0, 0);    // in-plane texture axes
  Vec3 axis_v = Vec3(0, 1, 0);
  double half_u = 1e9;            // finite extent, meters
  double half_v = 1e9;
  SurfaceTexture texture;
};

struct SynthObject {
  std::string class_name = "object";
  double confidence = 0.9;
  bool dynamic_prior = false;
  Vec3 center0 = Vec3(0, 0, 1.8);  // world position at frame 0
  Vec3 velocity = Vec3::Zero();    // meters per frame
  Vec3 osc_amplitude = Vec3::Zero();
  double osc_period = 60.0;        // frames
  double half_w = 0.3, half_h = 0.4;
  SurfaceTexture texture;

  Vec3 center_at(int frame) const {
    Vec3 c = center0 + velocity * static_cast<double>(frame);
    if (osc_amplitude.squaredNorm() > 0.0)
      c += osc_amplitude * std::sin(2.0 * M_PI * frame / osc_period);
    return c;
  }
};

enum class DegradeMode { Textureless, MotionBlur, FastRotation };

struct Degradation {
  DegradeMode mode;
  int begin = 0, end = 0;  // frame range [begin, end)
  double param = 0.0;      // Textureless: contrast scale; MotionBlur: taps;
                           // FastRotation: peak extra roll, degrees

  bool covers(int frame) const { return frame >= begin && frame < end; }
};

// Detector failure under blur: true detections replaced by low-confidence
// phantom boxes on a frame range.
struct PhantomDetections {
  int begin = 0, end = 0;
  int count = 2;
  double confidence = 0.25;

  bool covers(int frame) const { return frame >= begin && frame < end; }
};

struct SynthScene {
  CameraIntrinsics K;
  double fps = 30.0;
  std::vector<PoseSE3> camera_script;  // camera-to-world, one per frame
  SynthPlane background;
  std::vector<SynthObject> objects;
  double max_depth = 5.0;        // sensor range, beyond which depth drops out
  double void_intensity = 0.4;   // rays that miss all geometry
  double intensity_noise = 0.0;
  double depth_noise = 0.0;
  // sensor artifact: depth dropout probability |pixel motion| / scale,
  // capped at 0.95 (0 disables). Fast rotation shreds depth coverage the
  // way structured-light sensors do under motion.
  double motion_depth_dropout_scale = 0.0;
  uint64_t seed = 1;
  std::vector<Degradation> degradations;
  std::vector<std::pair<int, int>> detection_dropouts;  // [begin, end) with no detections
  std::vector<PhantomDetections> phantom_detections;

  int num_frames() const { return static_cast<int>(camera_script.size()); }
  double timestamp(int frame) const { return frame / fps; }
};

struct RenderedFrame {
  double timestamp = 0.0;
  Image2D intensity;
  Image2D depth;
  std::vector<Detection> detections;
  PoseSE3 gt_pose;  // camera-to-world, exactly the (possibly degraded) script
};

// Stress modes applied to a local frame range. Frames outside the range
// render bit-identically to the base scene.
inline SynthScene degrade(SynthScene scene, int begin, int end, DegradeMode mode,
                          double param = 0.0) {
  if (begin < 0 || end > scene.num_frames() || begin >= end)
    throw std::invalid_argument("degrade: invalid frame range");
  if (param <= 0.0) {
    switch (mode) {
      case DegradeMode::Textureless: param = 0.02; break;
      case DegradeMode::MotionBlur: param = 7; break;
      case DegradeMode::FastRotation: param = 25.0; break;
    }
  }
  scene.degradations.push_back({mode, begin, end, param});
  return scene;
}

namespace synth_detail {

struct Hit {
  double depth;  // camera-frame z
  double u, v;
  int object = -1;  // -1 = background
};

inline std::optional<double> ray_plane(const Vec3& origin, const Vec3& dir, const Vec3& p0,
                                       const Vec3& n) {
  const double denom = n.dot(dir);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double s = n.dot(p0 - origin) / denom;
  if (s <= 1e-6) return std::nullopt;
  return s;
}

}  // namespace synth_detail

class SynthRenderer {
 public:
  explicit SynthRenderer(const SynthScene& scene) : scene_(scene) { scene_.K.validate(); }

  // Ground-truth pose including scripted degradations (extra roll). The
  // roll profile is zero at both range endpoints so frames outside the
  // range render bit-identically to the base scene.
  PoseSE3 pose_at(int frame) const {
    PoseSE3 pose = scene_.camera_script.at(frame);
    for (const auto& d : scene_.degradations) {
      if (d.mode != DegradeMode::FastRotation || !d.covers(frame)) continue;
      const int len = d.end - d.begin;
      const double tau = len > 1 ? static_cast<double>(frame - d.begin) / (len - 1) : 0.0;
      const double s = std::sin(M_PI * tau);
      const double roll = d.param * M_PI / 180.0 * s * s;
      pose = pose * se3_exp((Vec6() << 0, 0, 0, 0, 0, roll).finished());
    }
    return pose;
  }

  RenderedFrame render(int frame) const {
    if (frame < 0 || frame >= scene_.num_frames())
      throw std::out_of_range("render: frame index out of range");
    const CameraIntrinsics& K = scene_.K;
    const PoseSE3 pose = pose_at(frame);

    double texture_scale = 1.0;
    int blur_taps = 0;
    for (const auto& d : scene_.degradations) {
      if (!d.covers(frame)) continue;
      if (d.mode == DegradeMode::Textureless) texture_scale = d.param;
      if (d.mode == DegradeMode::MotionBlur) blur_taps = static_cast<int>(d.param);
    }

    RenderedFrame out;
    out.timestamp = scene_.timestamp(frame);
    out.gt_pose = pose;
    out.intensity = Image2D(K.width, K.height);
    out.depth = Image2D(K.width, K.height);

    std::vector<BinaryMask> object_masks(scene_.objects.size());
    for (auto& m : object_masks) m = BinaryMask(K.width, K.height);

    const bool dropout = scene_.motion_depth_dropout_scale > 0.0 && frame > 0;
    const PoseSE3 prev_inv = dropout ? pose_at(frame - 1).inverse() : PoseSE3();

    for (int y = 0; y < K.height; ++y)
      for (int x = 0; x < K.width; ++x) {
        const auto hit = cast(pose, frame, x, y);
        if (!hit) {
          out.intensity.at(x, y) = scene_.void_intensity;
          out.depth.at(x, y) = 0.0;
          continue;
        }
        out.intensity.at(x, y) = shade(*hit, frame, texture_scale);
        double depth = hit->depth <= scene_.max_depth ? hit->depth : 0.0;
        if (dropout && depth > 0.0) {
          const Vec3 dir_cam((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
          const Vec3 world = pose * (hit->depth * dir_cam);
          const Vec3 prev_cam = prev_inv * world;
          double motion = 1e3;  // behind the previous camera: treat as violent
          if (prev_cam.z() > kMinProjectDepth) {
            const double u = K.fx * prev_cam.x() / prev_cam.z() + K.cx;
            const double v = K.fy * prev_cam.y() / prev_cam.z() + K.cy;
            motion = std::hypot(u - x, v - y);
          }
          const double ramp = std::min(1.0, motion / scene_.motion_depth_dropout_scale);
          const double p = std::min(0.95, ramp);
          if (synth_detail::lattice_value(x + 131071LL * frame, y,
                                          scene_.seed ^ 0xd5a7be11ull) < p) {
            depth = 0.0;
          } else {
            // survivors smear between surfaces ("flying pixels"); quadratic
            // ramp keeps benign frames untouched
            const double sigma = 0.4 * ramp * ramp;
            const double u = synth_detail::lattice_value(x + 524287LL * frame, y,
                                                         scene_.seed ^ 0xf1e77e57ull);
            depth = std::max(0.05, depth + (2.0 * u - 1.0) * 1.732 * sigma);
          }
        }
        out.depth.at(x, y) = depth;
        if (hit->object >= 0) object_masks[hit->object].set(x, y);
      }

    if (blur_taps > 1) apply_motion_blur(out.intensity, pose, frame, blur_taps);
    apply_noise(out, frame);
    if (const PhantomDetections* ph = phantom_at(frame)) {
      emit_phantoms(out, *ph, frame);
    } else if (!in_dropout(frame)) {
      emit_detections(out, object_masks);
    }
    return out;
  }

 private:
  std::optional<synth_detail::Hit> cast(const PoseSE3& pose, int frame, int x, int y) const {
    const CameraIntrinsics& K = scene_.K;
    const Vec3 dir_cam((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
    const Vec3 origin = pose.translation();
    const Vec3 dir = pose.rotation() * dir_cam;

    std::optional<synth_detail::Hit> best;
    const auto& bg = scene_.background;
    if (auto s = synth_detail::ray_plane(origin, dir, bg.point, bg.normal)) {
      const Vec3 h = origin + *s * dir - bg.point;
      const double u = h.dot(bg.axis_u), v = h.dot(bg.axis_v);
      if (std::abs(u) <= bg.half_u && std::abs(v) <= bg.half_v)
        best = synth_detail::Hit{*s, u, v, -1};
    }
    for (size_t i = 0; i < scene_.objects.size(); ++i) {
      const auto& obj = scene_.objects[i];
      const Vec3 c = obj.center_at(frame);
      if (auto s = synth_detail::ray_plane(origin, dir, c, scene_.background.normal)) {
        if (best && *s >= best->depth) continue;
        const Vec3 h = origin + *s * dir - c;
        const double u = h.dot(scene_.background.axis_u), v = h.dot(scene_.background.axis_v);
        if (std::abs(u) <= obj.half_w && std::abs(v) <= obj.half_h)
          best = synth_detail::Hit{*s, u, v, static_cast<int>(i)};
      }
    }
    return best;
  }

  double shade(const synth_detail::Hit& hit, int frame, double texture_scale) const {
    if (hit.object < 0) return scene_.background.texture.sample(hit.u, hit.v, texture_scale);
    return scene_.objects[hit.object].texture.sample(hit.u, hit.v, texture_scale);
  }

  // Box blur along the per-pixel motion against the previous frame's pose.
  void apply_motion_blur(Image2D& intensity, const PoseSE3& pose, int frame, int taps) const {
    const CameraIntrinsics& K = scene_.K;
    const PoseSE3 prev_pose = frame > 0 ? pose_at(frame - 1) : pose;
    const PoseSE3 to_prev = prev_pose.inverse() * pose;
    Image2D src = intensity;
    for (int y = 0; y < K.height; ++y)
      for (int x = 0; x < K.width; ++x) {
        const double d = scene_.background.point.z();  // nominal scene depth
        const Vec3 p = to_prev * backproject(x, y, d, K);
        const auto uv = project(p, K);
        if (!uv) continue;
        const Vec2 motion = Vec2(x, y) - *uv;
        double sum = src.at(x, y);
        int n = 1;
        for (int t = 1; t < taps; ++t) {
          const double f = static_cast<double>(t) / (taps - 1);
          const auto s = sample_bilinear(src, x - f * motion.x(), y - f * motion.y());
          if (!s) continue;
          sum += *s;
          ++n;
        }
        intensity.at(x, y) = sum / n;
      }
  }

  void apply_noise(RenderedFrame& out, int frame) const {
    if (scene_.intensity_noise <= 0.0 && scene_.depth_noise <= 0.0) return;
    std::mt19937_64 rng(synth_detail::mix64(scene_.seed ^ (0x5851f42d4c957f2dull +
                                                           static_cast<uint64_t>(frame))));
    std::normal_distribution<double> ni(0.0, 1.0);
    for (int y = 0; y < out.intensity.height(); ++y)
      for (int x = 0; x < out.intensity.width(); ++x) {
        if (scene_.intensity_noise > 0.0)
          out.intensity.at(x, y) = std::clamp(
              out.intensity.at(x, y) + scene_.intensity_noise * ni(rng), 0.0, 1.0);
        if (scene_.depth_noise > 0.0 && is_valid_depth(out.depth.at(x, y)))
          out.depth.at(x, y) =
              std::max(1e-3, out.depth.at(x, y) + scene_.depth_noise * ni(rng));
      }
  }

  bool in_dropout(int frame) const {
    for (const auto& [b, e] : scene_.detection_dropouts)
      if (frame >= b && frame < e) return true;
    return false;
  }

  const PhantomDetections* phantom_at(int frame) const {
    for (const auto& p : scene_.phantom_detections)
      if (p.covers(frame)) return &p;
    return nullptr;
  }

  // hash-positioned junk boxes standing in for a detector misfiring on blur
  void emit_phantoms(RenderedFrame& out, const PhantomDetections& ph, int frame) const {
    const int W = scene_.K.width, H = scene_.K.height;
    for (int k = 0; k < ph.count; ++k) {
      const uint64_t s = scene_.seed ^ 0x9e1f00d5ull;
      const double hx = synth_detail::lattice_value(frame * 31 + k, 0, s);
      const double hy = synth_detail::lattice_value(frame * 31 + k, 1, s);
      const double hw = synth_detail::lattice_value(frame * 31 + k, 2, s);
      const double hh = synth_detail::lattice_value(frame * 31 + k, 3, s);
      Detection det;
      det.class_name = "blur_artifact";
      det.confidence = ph.confidence;
      det.dynamic_prior = false;
      det.w = W * (0.2 + 0.3 * hw);
      det.h = H * (0.2 + 0.3 * hh);
      det.x = (W - det.w) * hx;
      det.y = (H - det.h) * hy;
      out.detections.push_back(std::move(det));
    }
  }

  void emit_detections(RenderedFrame& out, const std::vector<BinaryMask>& masks) const {
    for (size_t i = 0; i < scene_.objects.size(); ++i) {
      const auto& m = masks[i];
      int min_x = m.width(), min_y = m.height(), max_x = -1, max_y = -1;
      for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
          if (m.at(x, y)) {
            min_x = std::min(min_x, x);
            min_y = std::min(min_y, y);
            max_x = std::max(max_x, x);
            max_y = std::max(max_y, y);
          }
      if (max_x < 0) continue;  // object not visible
      Detection det;
      det.class_name = scene_.objects[i].class_name;
      det.confidence = scene_.objects[i].confidence;
      det.dynamic_prior = scene_.objects[i].dynamic_prior;
      det.x = min_x;
      det.y = min_y;
      det.w = max_x - min_x + 1;
      det.h = max_y - min_y + 1;
      DetectionMask mask;
      mask.image_scope = true;
      mask.width = m.width();
      mask.height = m.height();
      mask.bits = m.bits();
      det.mask = std::move(mask);
      out.detections.push_back(std::move(det));
    }
  }

  SynthScene scene_;
};

inline RenderedFrame render(const SynthScene& scene, int frame) {
  return SynthRenderer(scene).render(frame);
}

}  // namespace dynavo
