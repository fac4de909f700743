#include "gil/missingness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gil {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void mask_entry(Vector& x, Vector& m, std::size_t j) {
  m[j] = 0.0;
  x[j] = kNaN;
}

void finalize(Dataset& ds) {
  refill_placeholder(ds, ds.placeholder);
  recompute_column_means(ds);
}

}  // namespace

const char* to_string(MaskMechanism m) {
  switch (m) {
    case MaskMechanism::Mcar: return "mcar";
    case MaskMechanism::MarImage: return "mar_image";
    case MaskMechanism::MnarThreshold: return "mnar_threshold";
  }
  return "?";
}

MaskMechanism mask_mechanism_from_string(const std::string& s) {
  if (s == "mcar") return MaskMechanism::Mcar;
  if (s == "mar_image") return MaskMechanism::MarImage;
  if (s == "mnar_threshold") return MaskMechanism::MnarThreshold;
  throw std::invalid_argument("unknown mask mechanism: " + s);
}

Dataset apply_mcar(const Dataset& ds, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("apply_mcar: rate must be in [0,1)");
  Dataset out = ds;
  Rng rng(seed);
  for (Sample& s : out.samples) {
    for (std::size_t j = 0; j < out.d; ++j) {
      if (rng.uniform() < rate) mask_entry(s.x, s.m, j);
    }
  }
  for (SequenceSample& s : out.sequences) {
    for (std::size_t t = 0; t < s.horizon(); ++t) {
      for (std::size_t j = 0; j < out.d; ++j) {
        if (rng.uniform() < rate) mask_entry(s.x[t], s.m[t], j);
      }
    }
  }
  finalize(out);
  return out;
}

Dataset apply_mar_image(const Dataset& ds, std::size_t observable_rows, double steepness,
                        std::uint64_t seed) {
  if (ds.sequential() || ds.d != 784)
    throw std::invalid_argument("apply_mar_image: expects tabular 28x28 images (d = 784)");
  if (observable_rows < 1 || observable_rows >= 28)
    throw std::invalid_argument("apply_mar_image: observable_rows must be in [1, 27]");
  Dataset out = ds;
  Rng rng(seed);
  const std::size_t boundary = observable_rows * 28;
  for (Sample& s : out.samples) {
    double top_sum = 0.0;
    std::size_t top_count = 0;
    for (std::size_t j = 0; j < boundary; ++j) {
      if (s.m[j] != 0.0) {
        top_sum += s.x[j];
        ++top_count;
      }
    }
    const double mean_top = top_count > 0 ? top_sum / static_cast<double>(top_count) : 0.0;
    const double p_miss = sigmoid(steepness * (mean_top - 0.5));
    for (std::size_t j = boundary; j < 784; ++j) {
      if (rng.uniform() < p_miss) mask_entry(s.x, s.m, j);
    }
  }
  finalize(out);
  return out;
}

Dataset apply_mnar_threshold(const Dataset& ds, double quantile, std::uint64_t seed) {
  (void)seed;  // mechanism is deterministic; kept for MaskSpec uniformity
  if (!(quantile > 0.0 && quantile < 1.0))
    throw std::invalid_argument("apply_mnar_threshold: quantile must be in (0,1)");
  Dataset out = ds;
  // per-feature thresholds from observed values
  Vector thresholds(out.d, std::numeric_limits<double>::infinity());
  std::vector<Vector> columns(out.d);
  auto collect = [&](const Vector& x, const Vector& m) {
    for (std::size_t j = 0; j < out.d; ++j) {
      if (m[j] != 0.0) columns[j].push_back(x[j]);
    }
  };
  for (const Sample& s : out.samples) collect(s.x, s.m);
  for (const SequenceSample& s : out.sequences) {
    for (std::size_t t = 0; t < s.horizon(); ++t) collect(s.x[t], s.m[t]);
  }
  for (std::size_t j = 0; j < out.d; ++j) {
    if (columns[j].empty()) continue;
    std::sort(columns[j].begin(), columns[j].end());
    const std::size_t n = columns[j].size();
    // k-th order statistic with k = ceil(q * n); values above it are masked
    std::size_t k = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n)));
    k = std::min(std::max<std::size_t>(k, 1), n);
    thresholds[j] = columns[j][k - 1];
  }
  auto censor = [&](Vector& x, Vector& m) {
    for (std::size_t j = 0; j < out.d; ++j) {
      if (m[j] != 0.0 && x[j] > thresholds[j]) mask_entry(x, m, j);
    }
  };
  for (Sample& s : out.samples) censor(s.x, s.m);
  for (SequenceSample& s : out.sequences) {
    for (std::size_t t = 0; t < s.horizon(); ++t) censor(s.x[t], s.m[t]);
  }
  finalize(out);
  return out;
}

Dataset apply_mask(const Dataset& ds, const MaskSpec& spec) {
  switch (spec.mechanism) {
    case MaskMechanism::Mcar: return apply_mcar(ds, spec.rate, spec.seed);
    case MaskMechanism::MarImage:
      return apply_mar_image(ds, spec.observable_rows, spec.steepness, spec.seed);
    case MaskMechanism::MnarThreshold:
      return apply_mnar_threshold(ds, spec.quantile, spec.seed);
  }
  throw std::logic_error("bad mask mechanism");
}

double missing_rate(const Dataset& ds) {
  std::size_t total = 0, missing = 0;
  auto count = [&](const Vector& m) {
    total += m.size();
    for (double v : m) {
      if (v == 0.0) ++missing;
    }
  };
  for (const Sample& s : ds.samples) count(s.m);
  for (const SequenceSample& s : ds.sequences) {
    for (const Vector& m : s.m) count(m);
  }
  if (total == 0) return 0.0;
  return static_cast<double>(missing) / static_cast<double>(total);
}

}  // namespace gil
