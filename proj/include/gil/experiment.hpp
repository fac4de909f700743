#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gil/datasets.hpp"
#include "gil/missingness.hpp"
#include "gil/synthetic.hpp"
#include "gil/train.hpp"

namespace gil {

// Configuration / input errors that should abort before any run starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  enum class Kind { Csv, Mnist, SyntheticMnar };
  Kind kind = Kind::SyntheticMnar;
  // csv
  std::string path;
  std::string label_column;
  bool standardize = false;
  // mnist
  std::string images;
  std::string labels;
  // synthetic_mnar
  SyntheticMnarParams synthetic;
  // common
  std::size_t limit = 0;  // keep only the first `limit` samples (0 = all)
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;
};

struct RunSpec {
  std::string name;
  TrainConfig base;
  std::vector<std::uint64_t> seeds = {0};
  bool save_checkpoint = false;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::optional<MaskSpec> mask;
  std::vector<RunSpec> runs;
  std::string out_dir = "results";
  std::string raw_text;  // echoed into report.json
};

// Parses the flat `key = value` format with [section] headers; throws
// ConfigError naming the offending line.
ExperimentConfig parse_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_text(const std::string& text, const std::string& origin);

struct RunResult {
  std::string name;
  Variant variant = Variant::Gil;
  Imputer imputer = Imputer::Zero;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  TrainReport report;
};

struct ExperimentData {
  Dataset train, eval;
  std::optional<Dataset> truth_train, truth_eval;  // when the mask generator knows the values
};

// Load + mask + split as configured.
ExperimentData prepare_data(const ExperimentConfig& cfg);

// Execute every run (possibly in parallel worker threads, GIL_THREADS env)
// and write metrics.csv, summary.csv and report.json into out_dir.
// Returns 0 when every run succeeded, 1 otherwise.
int run_experiment(const ExperimentConfig& cfg);

// Pearson correlation between baseline imputation MSE and accuracy over the
// rows of <results_dir>/summary.csv; writes correlation.csv. Needs >= 3
// usable points.
int correlate(const std::string& results_dir);

}  // namespace gil
