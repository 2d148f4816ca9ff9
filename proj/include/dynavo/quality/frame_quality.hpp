// Per-frame quality components and their weighted combination, plus the
// adaptive-threshold initialization that picks the first benchmark frame.
//
// The four component scores are concrete instantiations of one-line
// descriptions ("detection confidence", "object size and position",
// "feature response strength and distribution uniformity", "depth
// coverage, consistency and smoothness"); every knob is config-exposed.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dynavo/core/camera.hpp"
#include "dynavo/core/corners.hpp"
#include "dynavo/core/image.hpp"
#include "dynavo/core/optical_flow.hpp"
#include "dynavo/io/detections.hpp"

namespace dynavo {

struct QualityWeights {
  double w_conf = 0.3;
  double w_spatial = 0.2;
  double w_feature = 0.3;
  double w_depth = 0.2;

  void validate() const {
    if (w_conf < 0 || w_spatial < 0 || w_feature < 0 || w_depth < 0)
      throw std::invalid_argument("quality weights must be non-negative");
    if (std::abs(w_conf + w_spatial + w_feature + w_depth - 1.0) > 1e-9)
      throw std::invalid_argument("quality weights must sum to 1");
  }
};

struct QualityReport {
  double s_conf = 0.0;
  double s_spatial = 0.0;
  double s_feature = 0.0;
  double s_depth = 0.0;
  double s_total = 0.0;
};

struct FeatureScoreConfig {
  int top_n = 500;
  double r_sat = 0.01;              // mean-response saturation on [0,1] intensities
  double min_response = 1e-4;       // below this a pixel is not a corner
  int grid = 8;                     // uniformity grid (grid x grid cells)
};

struct DepthScoreConfig {
  double g_sat = 0.5;  // |grad depth| saturation, m/px
};

inline double score_confidence(const std::vector<Detection>& dets) {
  if (dets.empty()) return 0.5;  // neutral: no evidence either way
  double sum = 0.0;
  for (const auto& d : dets) sum += d.confidence;
  return sum / dets.size();
}

inline double score_spatial(const std::vector<Detection>& dets, const CameraIntrinsics& K) {
  if (dets.empty()) return 1.0;  // nothing occludes the scene
  const double img_area = static_cast<double>(K.width) * K.height;
  const double half_diag = 0.5 * std::hypot(K.width, K.height);
  double sum = 0.0;
  for (const auto& d : dets) {
    const double size_term = 1.0 - std::clamp(d.area() / img_area / 0.5, 0.0, 1.0);
    const double dist = std::hypot(d.center_x() - 0.5 * K.width, d.center_y() - 0.5 * K.height);
    const double centrality = 1.0 - std::clamp(dist / half_diag, 0.0, 1.0);
    sum += size_term * centrality;
  }
  return sum / dets.size();
}

inline double score_feature(const Image2D& img, const FeatureScoreConfig& cfg = {}) {
  if (img.width() < 32 || img.height() < 32)
    throw std::invalid_argument("score_feature: image smaller than 32x32");
  const Image2D resp = corner_response(img);

  std::vector<double> responses;
  std::vector<int> cell_counts(cfg.grid * cfg.grid, 0);
  const double cw = static_cast<double>(img.width()) / cfg.grid;
  const double ch = static_cast<double>(img.height()) / cfg.grid;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double r = resp.at(x, y);
      if (r < cfg.min_response) continue;
      responses.push_back(r);
      const int cx = std::min(cfg.grid - 1, static_cast<int>(x / cw));
      const int cy = std::min(cfg.grid - 1, static_cast<int>(y / ch));
      ++cell_counts[cy * cfg.grid + cx];
    }
  if (responses.empty()) return 0.0;

  const size_t top = std::min<size_t>(cfg.top_n, responses.size());
  std::partial_sort(responses.begin(), responses.begin() + top, responses.end(),
                    std::greater<double>());
  double mean_top = 0.0;
  for (size_t i = 0; i < top; ++i) mean_top += responses[i];
  mean_top /= top;
  const double strength = std::clamp(mean_top / cfg.r_sat, 0.0, 1.0);

  const double total = static_cast<double>(responses.size());
  double entropy = 0.0;
  for (int c : cell_counts) {
    if (c == 0) continue;
    const double p = c / total;
    entropy -= p * std::log(p);
  }
  const double uniformity = entropy / std::log(static_cast<double>(cfg.grid * cfg.grid));

  // uniformity modulates strength rather than adding to it: sensor noise
  // scatters near-threshold responses uniformly and must not lift a
  // texture-poor frame to 0.5 on distribution alone
  return strength * (0.5 + 0.5 * uniformity);
}

inline double score_depth(const Image2D& depth, const DepthScoreConfig& cfg = {}) {
  const int w = depth.width(), h = depth.height();
  size_t valid = 0;
  double sum = 0.0, sum2 = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = depth.at(x, y);
      if (!is_valid_depth(d)) continue;
      ++valid;
      sum += d;
      sum2 += d * d;
    }
  if (valid == 0) return 0.0;

  const double total = static_cast<double>(w) * h;
  const double coverage = valid / total;
  const double mean = sum / valid;
  const double var = std::max(0.0, sum2 / valid - mean * mean);
  const double consistency = std::clamp(1.0 - std::sqrt(var) / mean, 0.0, 1.0);

  double grad_sum = 0.0;
  size_t grad_n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = depth.at(x, y);
      if (!is_valid_depth(d)) continue;
      if (x + 1 < w && is_valid_depth(depth.at(x + 1, y))) {
        grad_sum += std::abs(depth.at(x + 1, y) - d);
        ++grad_n;
      }
      if (y + 1 < h && is_valid_depth(depth.at(x, y + 1))) {
        grad_sum += std::abs(depth.at(x, y + 1) - d);
        ++grad_n;
      }
    }
  const double smoothness =
      grad_n == 0 ? 0.0 : std::clamp(1.0 - (grad_sum / grad_n) / cfg.g_sat, 0.0, 1.0);

  return (coverage + consistency + smoothness) / 3.0;
}

inline double combine(const QualityWeights& w, double s_conf, double s_spatial,
                      double s_feature, double s_depth) {
  w.validate();
  return w.w_conf * s_conf + w.w_spatial * s_spatial + w.w_feature * s_feature +
         w.w_depth * s_depth;
}

inline QualityReport make_report(const QualityWeights& w, double s_conf, double s_spatial,
                                 double s_feature, double s_depth) {
  QualityReport r;
  r.s_conf = s_conf;
  r.s_spatial = s_spatial;
  r.s_feature = s_feature;
  r.s_depth = s_depth;
  r.s_total = combine(w, s_conf, s_spatial, s_feature, s_depth);
  return r;
}

// --- benchmark initialization with adaptive thresholds ---

// th_f <- min(th_fmax, th_f * e^{max(0, n/th_f - 1)})
inline double update_frame_threshold(double th_f, int n, double th_fmax) {
  return std::min(th_fmax, th_f * std::exp(std::max(0.0, n / th_f - 1.0)));
}

// th_s <- max(th_smin, beta * th_s * ln(th_f / n))
inline double update_quality_threshold(double th_s, double th_f, int n, double beta,
                                       double th_smin) {
  return std::max(th_smin, beta * th_s * std::log(th_f / std::max(1, n)));
}

struct InitConfig {
  double th_s = 0.5;
  double th_f = 30.0;
  double th_fmax = 120.0;
  double th_smin = 0.3;
  double beta = 0.9;
};

struct InitDecision {
  bool selected = false;
  int reference_index = 0;  // 1-based frame index of the chosen reference
  QualityReport reference_report;
};

class InitState {
 public:
  explicit InitState(const InitConfig& cfg = {}) : cfg_(cfg), th_s_(cfg.th_s), th_f_(cfg.th_f) {}

  int frame_count() const { return n_; }
  double th_s() const { return th_s_; }
  double th_f() const { return th_f_; }
  bool has_qualifier() const { return best_qualifier_.has_value(); }
  int best_qualifier_index() const { return best_qualifier_ ? best_qualifier_->first : 0; }
  int best_overall_index() const { return best_overall_ ? best_overall_->first : 0; }

  // One call per frame, in order. Frames qualify against the threshold in
  // force on arrival; thresholds adapt only when a selection attempt at
  // n >= th_f finds no suitable frame.
  InitDecision step(const QualityReport& report) {
    ++n_;
    // a frame qualifies when its quality clears th_s and its index is within th_f
    if (report.s_total >= th_s_ && n_ <= th_f_) {
      if (!best_qualifier_ || report.s_total > best_qualifier_->second.s_total)
        best_qualifier_ = {n_, report};
    }
    if (!best_overall_ || report.s_total > best_overall_->second.s_total)
      best_overall_ = {n_, report};

    if (n_ >= th_f_) {
      if (best_qualifier_) return {true, best_qualifier_->first, best_qualifier_->second};
      if (n_ >= cfg_.th_fmax && best_overall_) {
        // no frame ever qualified; take the global best to guarantee progress
        return {true, best_overall_->first, best_overall_->second};
      }
      th_f_ = update_frame_threshold(th_f_, n_, cfg_.th_fmax);
      th_s_ = update_quality_threshold(th_s_, th_f_, n_, cfg_.beta, cfg_.th_smin);
    }
    return {};
  }

 private:
  InitConfig cfg_;
  double th_s_;
  double th_f_;
  int n_ = 0;
  std::optional<std::pair<int, QualityReport>> best_qualifier_;
  std::optional<std::pair<int, QualityReport>> best_overall_;
};

// --- dynamic-object observation ---

struct DynamicObservation {
  BinaryMask mask;
  double dynamic_ratio = 0.0;
  std::vector<uint8_t> detection_dynamic;  // parallel to the detection list
};

struct DynamicObserveConfig {
  double flow_dyn_thresh = 1.5;  // px deviation from background median
  int min_box_samples = 3;
};

namespace detail {

inline double median_of(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const auto lower = std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + *lower);
  }
  return m;
}

inline bool point_in_bbox(const Detection& d, double x, double y) {
  return x >= d.x && x < d.x + d.w && y >= d.y && y < d.y + d.h;
}

}  // namespace detail

// A detection is dynamic if its class carries a dynamic prior, or if the
// median flow magnitude inside its box deviates from the background median
// by more than flow_dyn_thresh. Without flow (first frame) the prior decides.
inline DynamicObservation dynamic_observe(const std::vector<Detection>& dets,
                                          const FlowField& flow, const Image2D& depth,
                                          const CameraIntrinsics& K,
                                          const DynamicObserveConfig& cfg = {}) {
  (void)depth;
  DynamicObservation obs;
  obs.mask = BinaryMask(K.width, K.height);
  obs.detection_dynamic.assign(dets.size(), 0);

  const bool have_flow = flow.size() > 0;
  double bg_median = 0.0;
  if (have_flow) {
    std::vector<double> bg;
    for (size_t i = 0; i < flow.size(); ++i) {
      if (!flow.valid[i]) continue;
      bool inside_any = false;
      for (const auto& d : dets)
        if (detail::point_in_bbox(d, flow.points[i].x(), flow.points[i].y())) {
          inside_any = true;
          break;
        }
      if (!inside_any) bg.push_back(flow.flow[i].norm());
    }
    bg_median = detail::median_of(bg);
  }

  for (size_t di = 0; di < dets.size(); ++di) {
    const auto& det = dets[di];
    bool dynamic = det.dynamic_prior;
    if (!dynamic && have_flow) {
      std::vector<double> inside;
      for (size_t i = 0; i < flow.size(); ++i)
        if (flow.valid[i] && detail::point_in_bbox(det, flow.points[i].x(), flow.points[i].y()))
          inside.push_back(flow.flow[i].norm());
      if (static_cast<int>(inside.size()) >= cfg.min_box_samples) {
        const double med = detail::median_of(inside);
        dynamic = std::abs(med - bg_median) > cfg.flow_dyn_thresh;
      }
    }
    obs.detection_dynamic[di] = dynamic ? 1 : 0;
    if (dynamic) paint_detection(det, obs.mask);
  }

  obs.dynamic_ratio =
      static_cast<double>(obs.mask.count()) / (static_cast<double>(K.width) * K.height);
  return obs;
}

}  // namespace dynavo
