// Adaptive pose fusion: blend the feature-based and direct estimates along
// the SE(3) geodesic. w_diff = e^{-mu * s_change} is the fraction kept from
// the feature pose; small deviation trusts features, large deviation trusts
// the dense refinement.
#pragma once

#include <cmath>
#include <stdexcept>

#include "dynavo/core/se3.hpp"

namespace dynavo {

struct FusionConfig {
  double mu = 2.0;           // decay of feature trust with scene change
  double th_keyframes = 8.0; // signature distance gate for reference frames

  void validate() const {
    if (mu < 0.0) throw std::invalid_argument("fusion: mu must be >= 0");
    if (!(th_keyframes > 0.0)) throw std::invalid_argument("fusion: th_keyframes must be > 0");
  }
};

inline PoseSE3 fuse(const PoseSE3& t_feature, const PoseSE3& t_direct, double s_change,
                    double mu) {
  if (s_change < 0.0 || s_change > 1.0)
    throw std::invalid_argument("fuse: s_change must be in [0,1]");
  const double w_diff = std::exp(-mu * s_change);
  return interpolate(t_direct, t_feature, w_diff);
}

}  // namespace dynavo
