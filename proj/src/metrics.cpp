#include "gil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gil {

namespace {

void require_both_classes(const std::vector<int>& labels) {
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (!has_pos || !has_neg)
    throw std::invalid_argument("metric undefined: needs both classes present");
}

}  // namespace

double accuracy(const Vector& scores, const std::vector<int>& labels) {
  if (scores.empty() || scores.size() != labels.size())
    throw std::invalid_argument("accuracy: empty or mismatched inputs");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int pred = scores[i] >= 0.5 ? 1 : 0;
    if (pred == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double accuracy(const std::vector<Vector>& prob_rows, const std::vector<int>& labels) {
  if (prob_rows.empty() || prob_rows.size() != labels.size())
    throw std::invalid_argument("accuracy: empty or mismatched inputs");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < prob_rows.size(); ++i) {
    const auto it = std::max_element(prob_rows[i].begin(), prob_rows[i].end());
    const int pred = static_cast<int>(it - prob_rows[i].begin());
    if (pred == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(prob_rows.size());
}

double roc_auc(const Vector& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("roc_auc: empty or mismatched inputs");
  require_both_classes(labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // midranks handle ties exactly like the pairwise 1/2 convention
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum_pos += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(const Vector& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("average_precision: empty or mismatched inputs");
  require_both_classes(labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double total_pos =
      static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  double ap = 0.0;
  double tp = 0.0, fp = 0.0;
  double prev_recall = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1)
        tp += 1.0;
      else
        fp += 1.0;
    }
    const double recall = tp / total_pos;
    const double precision = tp / (tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double imputation_mse(const Dataset& imputed, const Dataset& ground_truth) {
  if (imputed.size() != ground_truth.size() || imputed.d != ground_truth.d)
    throw std::invalid_argument("imputation_mse: dataset shapes differ");
  double acc = 0.0;
  std::size_t count = 0;
  auto tally = [&](const Vector& fill, const Vector& m, const Vector& truth) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] == 0.0) {
        const double d = fill[j] - truth[j];
        acc += d * d;
        ++count;
      }
    }
  };
  if (imputed.sequential()) {
    for (std::size_t idx = 0; idx < imputed.size(); ++idx) {
      const SequenceSample& a = imputed.sequences[idx];
      const SequenceSample& b = ground_truth.sequences[idx];
      if (a.horizon() != b.horizon())
        throw std::invalid_argument("imputation_mse: sequence horizons differ");
      for (std::size_t t = 0; t < a.horizon(); ++t) tally(a.x_filled[t], a.m[t], b.x[t]);
    }
  } else {
    for (std::size_t idx = 0; idx < imputed.size(); ++idx) {
      tally(imputed.samples[idx].x_filled, imputed.samples[idx].m, ground_truth.samples[idx].x);
    }
  }
  if (count == 0) throw std::invalid_argument("imputation_mse: no masked entries");
  return acc / static_cast<double>(count);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

PearsonResult pearson(const Vector& xs, const Vector& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("pearson: needs n >= 3 paired points");
  const auto n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x, dy = ys[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson: zero variance input");
  PearsonResult res;
  res.r = sxy / std::sqrt(sxx * syy);
  res.low_n = xs.size() < 5;
  const double df = n - 2.0;
  const double r2 = std::min(res.r * res.r, 1.0);
  if (r2 >= 1.0) {
    res.p_value = 0.0;
    return res;
  }
  const double t2 = r2 * df / (1.0 - r2);
  // two-sided tail of Student-t with df degrees of freedom
  res.p_value = incomplete_beta(df / 2.0, 0.5, df / (df + t2));
  return res;
}

}  // namespace gil
