#pragma once

#include <cstdint>
#include <string>

#include "gil/datasets.hpp"

namespace gil {

enum class MaskMechanism { Mcar, MarImage, MnarThreshold };

const char* to_string(MaskMechanism m);
MaskMechanism mask_mechanism_from_string(const std::string& s);

struct MaskSpec {
  MaskMechanism mechanism = MaskMechanism::Mcar;
  double rate = 0.0;                 // mcar
  std::uint64_t seed = 0;
  std::size_t observable_rows = 14;  // mar_image
  double steepness = 4.0;            // mar_image
  double quantile = 0.5;             // mnar_threshold
};

// Each entry goes missing independently with probability rate. Already
// missing entries stay missing.
Dataset apply_mcar(const Dataset& ds, double rate, std::uint64_t seed);

// For 28x28 images: the top observable_rows rows stay observed; every lower
// pixel is masked with probability logistic(steepness * (mean_top - 0.5)),
// conditioning only on the observable region.
Dataset apply_mar_image(const Dataset& ds, std::size_t observable_rows, double steepness,
                        std::uint64_t seed);

// Self-censoring: an entry is masked iff its value exceeds its feature's
// q-quantile over the observed values.
Dataset apply_mnar_threshold(const Dataset& ds, double quantile, std::uint64_t seed);

Dataset apply_mask(const Dataset& ds, const MaskSpec& spec);

// Fraction of entries with m = 0.
double missing_rate(const Dataset& ds);

}  // namespace gil
