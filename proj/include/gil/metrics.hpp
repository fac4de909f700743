#pragma once

#include <vector>

#include "gil/datasets.hpp"
#include "gil/linalg.hpp"

namespace gil {

// Binary accuracy at the fixed 0.5 threshold (score >= 0.5 predicts 1).
double accuracy(const Vector& scores, const std::vector<int>& labels);

// Multiclass accuracy by argmax over per-sample probability rows.
double accuracy(const std::vector<Vector>& prob_rows, const std::vector<int>& labels);

// Probability that a random positive outranks a random negative; ties 1/2.
// Throws if only one class is present.
double roc_auc(const Vector& scores, const std::vector<int>& labels);

// Area under the precision-recall curve, AP = sum (R_k - R_{k-1}) P_k over
// descending-score thresholds.
double average_precision(const Vector& scores, const std::vector<int>& labels);

// Mean squared error over masked entries only. Requires identical masks and
// at least one masked entry.
double imputation_mse(const Dataset& imputed, const Dataset& ground_truth);

struct PearsonResult {
  double r = 0.0;
  double p_value = 1.0;
  bool low_n = false;  // n < 5: the t-approximation is shaky
};

// Pearson correlation with a two-sided p-value from the Student-t tail.
PearsonResult pearson(const Vector& xs, const Vector& ys);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

}  // namespace gil
