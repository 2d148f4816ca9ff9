// Flat key/value configuration covering every threshold and weight in the
// pipeline. Unknown keys are hard errors so typos cannot silently fall back
// to defaults.
#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dynavo/core/camera.hpp"
#include "dynavo/core/optical_flow.hpp"
#include "dynavo/decision/scene_decision.hpp"
#include "dynavo/quality/frame_quality.hpp"
#include "dynavo/refine/direct_align.hpp"
#include "dynavo/refine/feature_vo.hpp"
#include "dynavo/refine/fusion.hpp"

namespace dynavo {

struct PipelineConfig {
  QualityWeights quality_weights;
  FeatureScoreConfig feature_score;
  DepthScoreConfig depth_score;
  InitConfig init;
  DynamicObserveConfig dyn;
  ChangeWeights change_weights;
  ResidualSaturation saturation;
  DecisionConfig decision;
  RobustCostConfig robust;
  FusionConfig fusion;
  size_t pool_capacity = 3;
  LkConfig lk;
  int flow_levels = 3;
  int flow_grid_step = 16;
  FeatureVoConfig vo;
  double assoc_tolerance = 0.02;
  CameraIntrinsics camera{535.4, 539.2, 320.1, 247.6, 640, 480, 5000.0};

  void validate() const {
    quality_weights.validate();
    change_weights.validate();
    decision.validate();
    robust.validate();
    fusion.validate();
    camera.validate();
    if (flow_levels < 1 || flow_grid_step < 2)
      throw std::invalid_argument("config: invalid flow parameters");
    if (pool_capacity < 1) throw std::invalid_argument("config: refine.pool_capacity must be >= 1");
  }
};

namespace config_detail {

using Setter = std::function<void(PipelineConfig&, const std::string&)>;

inline double to_double(const std::string& v) {
  size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("not a number: " + v);
  return d;
}

inline int to_int(const std::string& v) {
  size_t used = 0;
  const int i = std::stoi(v, &used);
  if (used != v.size()) throw std::invalid_argument("not an integer: " + v);
  return i;
}

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto add_d = [&m](const std::string& key, auto setter) {
      m[key] = [setter](PipelineConfig& c, const std::string& v) { setter(c, to_double(v)); };
    };
    auto add_i = [&m](const std::string& key, auto setter) {
      m[key] = [setter](PipelineConfig& c, const std::string& v) { setter(c, to_int(v)); };
    };

    add_d("quality.w_conf", [](PipelineConfig& c, double v) { c.quality_weights.w_conf = v; });
    add_d("quality.w_spatial", [](PipelineConfig& c, double v) { c.quality_weights.w_spatial = v; });
    add_d("quality.w_feature", [](PipelineConfig& c, double v) { c.quality_weights.w_feature = v; });
    add_d("quality.w_depth", [](PipelineConfig& c, double v) { c.quality_weights.w_depth = v; });
    add_d("quality.r_sat", [](PipelineConfig& c, double v) { c.feature_score.r_sat = v; });
    add_d("quality.min_response", [](PipelineConfig& c, double v) { c.feature_score.min_response = v; });
    add_i("quality.top_n", [](PipelineConfig& c, int v) { c.feature_score.top_n = v; });
    add_d("quality.g_sat", [](PipelineConfig& c, double v) { c.depth_score.g_sat = v; });

    add_d("init.th_s", [](PipelineConfig& c, double v) { c.init.th_s = v; });
    add_d("init.th_f", [](PipelineConfig& c, double v) { c.init.th_f = v; });
    add_d("init.th_fmax", [](PipelineConfig& c, double v) { c.init.th_fmax = v; });
    add_d("init.th_smin", [](PipelineConfig& c, double v) { c.init.th_smin = v; });
    add_d("init.beta", [](PipelineConfig& c, double v) { c.init.beta = v; });

    add_d("dyn.flow_thresh", [](PipelineConfig& c, double v) { c.dyn.flow_dyn_thresh = v; });
    add_i("dyn.min_box_samples", [](PipelineConfig& c, int v) { c.dyn.min_box_samples = v; });

    add_d("change.w_mc", [](PipelineConfig& c, double v) { c.change_weights.w_mc = v; });
    add_d("change.w_dc", [](PipelineConfig& c, double v) { c.change_weights.w_dc = v; });
    add_d("change.w_dec", [](PipelineConfig& c, double v) { c.change_weights.w_dec = v; });
    add_d("change.mc_sat", [](PipelineConfig& c, double v) { c.saturation.mc_sat = v; });
    add_d("change.dc_sat", [](PipelineConfig& c, double v) { c.saturation.dc_sat = v; });

    add_d("decision.w_base0", [](PipelineConfig& c, double v) { c.decision.w_base0 = v; });
    add_d("decision.a", [](PipelineConfig& c, double v) { c.decision.a = v; });
    add_d("decision.th_static", [](PipelineConfig& c, double v) { c.decision.th_static = v; });
    add_d("decision.th_dynamic", [](PipelineConfig& c, double v) { c.decision.th_dynamic = v; });
    add_d("decision.s_static", [](PipelineConfig& c, double v) { c.decision.s_static = v; });
    add_d("decision.th_obj", [](PipelineConfig& c, double v) { c.decision.th_obj = v; });
    add_d("decision.th_differ", [](PipelineConfig& c, double v) { c.decision.th_differ = v; });
    add_d("decision.boost_static", [](PipelineConfig& c, double v) { c.decision.boost_static = v; });
    add_d("decision.boost_conf", [](PipelineConfig& c, double v) { c.decision.boost_conf = v; });

    add_d("refine.lambda", [](PipelineConfig& c, double v) { c.robust.lambda = v; });
    add_d("refine.mu", [](PipelineConfig& c, double v) { c.fusion.mu = v; });
    add_d("refine.th_keyframes", [](PipelineConfig& c, double v) { c.fusion.th_keyframes = v; });
    add_i("refine.pool_capacity", [](PipelineConfig& c, int v) { c.pool_capacity = v; });
    add_d("refine.alpha_i", [](PipelineConfig& c, double v) { c.robust.alpha_i = v; });
    add_d("refine.cauchy_i", [](PipelineConfig& c, double v) { c.robust.cauchy_scale_i = v; });
    add_d("refine.cauchy_d", [](PipelineConfig& c, double v) { c.robust.cauchy_scale_d = v; });
    add_d("refine.gamma_fg", [](PipelineConfig& c, double v) { c.robust.gamma_fg = v; });
    add_i("refine.pyramid_levels", [](PipelineConfig& c, int v) { c.robust.pyramid_levels = v; });
    add_i("refine.max_iters", [](PipelineConfig& c, int v) { c.robust.max_iters = v; });
    add_d("refine.step_tolerance", [](PipelineConfig& c, double v) { c.robust.step_tolerance = v; });
    add_i("refine.min_valid_pixels", [](PipelineConfig& c, int v) { c.robust.min_valid_pixels = v; });

    add_i("flow.window", [](PipelineConfig& c, int v) { c.lk.window = v; });
    add_i("flow.iters", [](PipelineConfig& c, int v) { c.lk.max_iters = v; });
    add_d("flow.eps", [](PipelineConfig& c, double v) { c.lk.eps = v; });
    add_d("flow.min_eig", [](PipelineConfig& c, double v) { c.lk.min_eig = v; });
    add_i("flow.levels", [](PipelineConfig& c, int v) { c.flow_levels = v; });
    add_i("flow.grid_step", [](PipelineConfig& c, int v) { c.flow_grid_step = v; });

    add_i("vo.max_corners", [](PipelineConfig& c, int v) { c.vo.max_corners = v; });
    add_d("vo.min_response", [](PipelineConfig& c, double v) { c.vo.min_corner_response = v; });
    add_d("vo.min_distance", [](PipelineConfig& c, double v) { c.vo.min_corner_distance = v; });
    add_i("vo.ransac_iters", [](PipelineConfig& c, int v) { c.vo.ransac_iters = v; });
    add_d("vo.inlier_thresh", [](PipelineConfig& c, double v) { c.vo.inlier_threshold = v; });
    add_i("vo.min_inliers", [](PipelineConfig& c, int v) { c.vo.min_inliers = v; });

    add_d("dataset.assoc_tolerance", [](PipelineConfig& c, double v) { c.assoc_tolerance = v; });
    add_d("dataset.depth_scale", [](PipelineConfig& c, double v) { c.camera.depth_scale = v; });

    add_d("camera.fx", [](PipelineConfig& c, double v) { c.camera.fx = v; });
    add_d("camera.fy", [](PipelineConfig& c, double v) { c.camera.fy = v; });
    add_d("camera.cx", [](PipelineConfig& c, double v) { c.camera.cx = v; });
    add_d("camera.cy", [](PipelineConfig& c, double v) { c.camera.cy = v; });
    add_i("camera.width", [](PipelineConfig& c, int v) { c.camera.width = v; });
    add_i("camera.height", [](PipelineConfig& c, int v) { c.camera.height = v; });
    return m;
  }();
  return table;
}

}  // namespace config_detail

inline void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                               const std::string& value) {
  const auto& table = config_detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument("unknown config key: " + key);
  it->second(cfg, value);
}

// Lines of "key = value"; '#' starts a comment; blank lines ignored.
inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  PipelineConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace dynavo
