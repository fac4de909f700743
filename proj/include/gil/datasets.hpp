#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gil/linalg.hpp"
#include "gil/rng.hpp"

namespace gil {

// One observation. Missing entries of x hold NaN; m marks them (1 = observed,
// 0 = missing); x_filled has the placeholder substituted.
struct Sample {
  Vector x;
  Vector m;
  Vector x_filled;
  int y = 0;
};

struct SequenceSample {
  std::vector<Vector> x;
  std::vector<Vector> m;
  std::vector<Vector> x_filled;
  int y = 0;

  std::size_t horizon() const { return x.size(); }
};

struct Dataset {
  std::vector<Sample> samples;
  std::vector<SequenceSample> sequences;
  std::size_t d = 0;
  int num_classes = 0;
  Vector column_means;  // over observed entries only
  double placeholder = 0.0;

  bool sequential() const { return !sequences.empty(); }
  std::size_t size() const { return sequential() ? sequences.size() : samples.size(); }
  int label(std::size_t idx) const { return sequential() ? sequences[idx].y : samples[idx].y; }
};

struct CsvOptions {
  std::string label_column;
  std::vector<std::string> missing_tokens = {"", "NaN", "NA"};
  bool standardize = false;  // (v - mean) / std over observed entries, per column
  double placeholder = 0.0;
};

// Comma-separated file with a header row. Cells equal to a missing token
// become missing entries. Throws on unparseable cells, naming row and column.
Dataset load_csv(const std::string& path, const CsvOptions& opts);

// Big-endian IDX pair (magic 2051 images / 2049 labels). Pixels scaled to
// [0,1]; everything starts fully observed.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

// Deterministic shuffled partition; returns (train, test).
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed);

// Rebuild every x_filled with a new placeholder value.
void refill_placeholder(Dataset& ds, double placeholder);

// Recompute column_means from the current masks/values.
void recompute_column_means(Dataset& ds);

// Epoch reshuffling batch stream over sample indices. Incomplete trailing
// batches are dropped.
class BatchIterator {
 public:
  BatchIterator(const Dataset& ds, std::size_t batch_size, std::uint64_t seed);

  // next batch of indices, reshuffling when an epoch ends
  std::vector<std::size_t> next();
  std::size_t batches_per_epoch() const { return order_.size() / batch_size_; }

 private:
  void reshuffle();

  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

// Binary-label batches laid out as [positives | negatives], exactly half each.
class BalancedBatchIterator {
 public:
  BalancedBatchIterator(const Dataset& ds, std::size_t batch_size, std::uint64_t seed);

  std::vector<std::size_t> next();
  std::size_t batch_size() const { return batch_size_; }

 private:
  void reshuffle();

  std::size_t batch_size_;
  std::vector<std::size_t> positives_, negatives_;
  std::size_t cursor_ = 0;  // batches consumed this epoch
  std::size_t batches_per_epoch_ = 0;
  Rng rng_;
};

}  // namespace gil
