#pragma once

#include <cstdint>

#include "gil/datasets.hpp"

namespace gil {

// Built-in binary task with informative missingness. Values carry a weak
// class signal (x_j ~ N(±value_signal, 1)); the first d/2 features go missing
// at class-dependent rates, so the mask pattern alone separates the classes
// much better than the observed values do.
//
// base_missing_rate r and mask_signal t in [0,1) set the class-conditional
// missing probabilities r(1 ± t) on informative features; the remaining
// features are masked at rate r independently of the class.
struct SyntheticMnarParams {
  std::size_t n = 2000;
  std::size_t d = 20;
  double mask_signal = 0.6;
  double value_signal = 0.117;
  double base_missing_rate = 0.3;
  std::uint64_t seed = 0;
  double placeholder = 0.0;
};

struct SyntheticMnarData {
  Dataset truth;   // fully observed
  Dataset masked;  // same values with the MNAR mask applied
};

SyntheticMnarData make_synthetic_mnar(const SyntheticMnarParams& params);

}  // namespace gil
