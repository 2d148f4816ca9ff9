// Frame providers: stream a sequence from the TUM on-disk layout or render
// frames of a synthetic scene on demand.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dynavo/io/png_io.hpp"
#include "dynavo/io/tum_dataset.hpp"
#include "dynavo/pipeline/pipeline.hpp"
#include "dynavo/synth/synth_scene.hpp"

namespace dynavo {

class TumFrameProvider : public FrameProvider {
 public:
  TumFrameProvider(SequenceData sequence, const CameraIntrinsics& K, size_t limit = 0)
      : seq_(std::move(sequence)), K_(K) {
    count_ = limit > 0 && limit < seq_.frames.size() ? limit : seq_.frames.size();
  }

  size_t size() const override { return count_; }

  FrameInput load(size_t index) override {
    const FrameRecord& rec = seq_.frames.at(index);
    FrameInput in;
    in.timestamp = rec.timestamp;
    in.intensity = load_intensity_png(rec.rgb_path);
    in.depth = load_depth_png(rec.depth_path, K_.depth_scale);
    in.detections = rec.detections;
    in.gt_pose = rec.gt_pose;
    return in;
  }

 private:
  SequenceData seq_;
  CameraIntrinsics K_;
  size_t count_;
};

class SynthFrameProvider : public FrameProvider {
 public:
  explicit SynthFrameProvider(const SynthScene& scene) : renderer_(scene), frames_(scene.num_frames()) {}

  size_t size() const override { return frames_; }

  FrameInput load(size_t index) override {
    RenderedFrame f = renderer_.render(static_cast<int>(index));
    FrameInput in;
    in.timestamp = f.timestamp;
    in.intensity = std::move(f.intensity);
    in.depth = std::move(f.depth);
    in.detections = std::move(f.detections);
    in.gt_pose = f.gt_pose;
    return in;
  }

 private:
  SynthRenderer renderer_;
  size_t frames_;
};

class MemoryFrameProvider : public FrameProvider {
 public:
  explicit MemoryFrameProvider(std::vector<FrameInput> frames) : frames_(std::move(frames)) {}
  size_t size() const override { return frames_.size(); }
  FrameInput load(size_t index) override { return frames_.at(index); }

 private:
  std::vector<FrameInput> frames_;
};

}  // namespace dynavo
