#include "gil/synthetic.hpp"

#include <limits>
#include <stdexcept>

namespace gil {

SyntheticMnarData make_synthetic_mnar(const SyntheticMnarParams& params) {
  if (params.n < 2 || params.d < 2) throw std::invalid_argument("synthetic_mnar: n, d too small");
  if (!(params.mask_signal >= 0.0 && params.mask_signal < 1.0))
    throw std::invalid_argument("synthetic_mnar: mask_signal must be in [0,1)");
  const double r = params.base_missing_rate;
  if (!(r >= 0.0 && r * (1.0 + params.mask_signal) < 1.0))
    throw std::invalid_argument("synthetic_mnar: base_missing_rate too large");

  Rng rng(params.seed);
  const std::size_t informative = params.d / 2;
  const double q_pos = r * (1.0 + params.mask_signal);
  const double q_neg = r * (1.0 - params.mask_signal);

  SyntheticMnarData data;
  for (Dataset* ds : {&data.truth, &data.masked}) {
    ds->d = params.d;
    ds->num_classes = 2;
    ds->placeholder = params.placeholder;
    ds->samples.reserve(params.n);
  }

  // exactly balanced labels, order shuffled
  std::vector<int> labels(params.n);
  for (std::size_t i = 0; i < params.n; ++i) labels[i] = i < params.n / 2 ? 1 : 0;
  shuffle(labels, rng);

  for (std::size_t i = 0; i < params.n; ++i) {
    const int y = labels[i];
    const double mu = (y == 1 ? 1.0 : -1.0) * params.value_signal;
    Sample truth;
    truth.y = y;
    truth.x.resize(params.d);
    truth.m.assign(params.d, 1.0);
    for (std::size_t j = 0; j < params.d; ++j) truth.x[j] = rng.normal(mu, 1.0);
    truth.x_filled = truth.x;

    Sample masked = truth;
    for (std::size_t j = 0; j < params.d; ++j) {
      const double p_miss = j < informative ? (y == 1 ? q_pos : q_neg) : r;
      if (rng.uniform() < p_miss) {
        masked.m[j] = 0.0;
        masked.x[j] = std::numeric_limits<double>::quiet_NaN();
      }
    }
    data.truth.samples.push_back(std::move(truth));
    data.masked.samples.push_back(std::move(masked));
  }
  refill_placeholder(data.masked, params.placeholder);
  recompute_column_means(data.truth);
  recompute_column_means(data.masked);
  return data;
}

}  // namespace gil
