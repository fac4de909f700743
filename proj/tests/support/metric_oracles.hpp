#pragma once

// Brute-force metric references shared by the metrics tests and the
// acceptance suite.

#include <algorithm>
#include <functional>
#include <vector>

#include "gil/linalg.hpp"

namespace gil::testing {

// O(n^2) comparison oracle: P(score_pos > score_neg) with ties counted half
inline double pairwise_auc(const Vector& scores, const std::vector<int>& labels) {
  double wins = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// recompute precision/recall from scratch at every distinct threshold
inline double sweep_ap(const Vector& scores, const std::vector<int>& labels) {
  Vector thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const double total_pos =
      static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  double ap = 0, prev_recall = 0;
  for (double thr : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= thr) {
        if (labels[i] == 1)
          tp += 1;
        else
          fp += 1;
      }
    }
    const double recall = tp / total_pos;
    const double precision = tp / (tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

// direct covariance-formula correlation
inline double direct_pearson_r(const Vector& xs, const Vector& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  sx /= n;
  sy /= n;
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cov += (xs[i] - sx) * (ys[i] - sy);
    vx += (xs[i] - sx) * (xs[i] - sx);
    vy += (ys[i] - sy) * (ys[i] - sy);
  }
  return cov / std::sqrt(vx * vy);
}

}  // namespace gil::testing
