// Frame signatures (depth histogram + motion statistics) and the pool of
// recent reliable frames that pose refinement draws references from.
#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <memory>
#include <vector>

#include "dynavo/core/image.hpp"
#include "dynavo/core/optical_flow.hpp"
#include "dynavo/core/pyramid.hpp"
#include "dynavo/core/se3.hpp"

namespace dynavo {

struct FrameSignature {
  static constexpr int kBins = 16;
  static constexpr double kMaxDepth = 8.0;  // histogram range [0, 8) m

  std::array<double, kBins> depth_hist{};  // normalized; all-zero when no valid depth
  Vec2 motion_desc = Vec2::Zero();         // (mean |flow| px, direction circular variance)
};

inline FrameSignature make_signature(const Image2D& depth, const FlowField* flow = nullptr) {
  FrameSignature sig;
  size_t n = 0;
  for (double d : depth.data()) {
    if (!is_valid_depth(d)) continue;
    int bin = static_cast<int>(d / (FrameSignature::kMaxDepth / FrameSignature::kBins));
    bin = std::clamp(bin, 0, FrameSignature::kBins - 1);
    sig.depth_hist[bin] += 1.0;
    ++n;
  }
  if (n > 0)
    for (double& b : sig.depth_hist) b /= static_cast<double>(n);

  if (flow) {
    double mag_sum = 0.0;
    size_t m = 0;
    Vec2 dir_sum = Vec2::Zero();
    size_t dirs = 0;
    for (size_t i = 0; i < flow->size(); ++i) {
      if (!flow->valid[i]) continue;
      const double mag = flow->flow[i].norm();
      mag_sum += mag;
      ++m;
      if (mag > 1e-9) {
        dir_sum += flow->flow[i] / mag;
        ++dirs;
      }
    }
    if (m > 0) sig.motion_desc.x() = mag_sum / m;
    if (dirs > 0) sig.motion_desc.y() = 1.0 - dir_sum.norm() / dirs;
  }
  return sig;
}

// Sum of the two Euclidean distances; a metric on signatures.
inline double signature_distance(const FrameSignature& a, const FrameSignature& b) {
  double hist2 = 0.0;
  for (int i = 0; i < FrameSignature::kBins; ++i) {
    const double d = a.depth_hist[i] - b.depth_hist[i];
    hist2 += d * d;
  }
  return std::sqrt(hist2) + (a.motion_desc - b.motion_desc).norm();
}

// Image content a reference frame must retain for dense alignment. The
// optional mask marks the frame's own dynamic pixels so they can be
// downweighted when the frame serves as an alignment source.
struct AlignFrame {
  Pyramid intensity;
  Pyramid depth;
  std::vector<BinaryMask> mask_levels;  // empty = no dynamic pixels

  static AlignFrame build(const Image2D& intensity_img, const Image2D& depth_img,
                          int levels, const BinaryMask& dyn_mask = {}) {
    AlignFrame f{build_pyramid(intensity_img, levels, PyramidKind::Intensity),
                 build_pyramid(depth_img, levels, PyramidKind::Depth),
                 {}};
    if (!dyn_mask.empty() && dyn_mask.count() > 0) {
      f.mask_levels.push_back(dyn_mask);
      for (int l = 1; l < levels; ++l)
        f.mask_levels.push_back(downsample_mask2(f.mask_levels.back()));
    }
    return f;
  }

  bool masked_at(int level, int x, int y) const {
    return !mask_levels.empty() && mask_levels[level].test(x, y);
  }
};

struct RefEntry {
  double timestamp = 0.0;
  FrameSignature signature;
  PoseSE3 world_pose;  // camera-to-world at the time the frame was accepted
  std::shared_ptr<const AlignFrame> frame;
};

class RefPool {
 public:
  explicit RefPool(size_t capacity = 3) : capacity_(capacity) {}

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  size_t capacity() const { return capacity_; }
  const std::deque<RefEntry>& entries() const { return entries_; }

  void push(RefEntry entry) {
    entries_.push_back(std::move(entry));
    while (entries_.size() > capacity_) entries_.pop_front();
  }

 private:
  size_t capacity_;
  std::deque<RefEntry> entries_;
};

// References within th_keyframes of the query signature, most recent first.
// Empty result = no usable reference; the caller falls back to feature VO.
inline std::vector<RefEntry> select_references(const RefPool& pool, const FrameSignature& sig,
                                               double th_keyframes) {
  std::vector<RefEntry> out;
  for (auto it = pool.entries().rbegin(); it != pool.entries().rend(); ++it)
    if (signature_distance(it->signature, sig) <= th_keyframes) out.push_back(*it);
  return out;
}

}  // namespace dynavo
