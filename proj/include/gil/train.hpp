#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gil/datasets.hpp"
#include "gil/lstm.hpp"
#include "gil/mlp.hpp"
#include "gil/optim.hpp"
#include "gil/rl.hpp"

namespace gil {

enum class Variant { Gil, GilH, GilD, AblationInput, Baseline };
enum class Imputer { Zero, Mean, CarryForward, NoiseMean };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);
const char* to_string(Imputer i);
Imputer imputer_from_string(const std::string& s);

// Test/diagnostic override of the behavioral policy.
enum class ForcedAction { None, Ones, Mask };

struct ModelSpec {
  enum class Kind { Mlp, Lstm };
  Kind kind = Kind::Mlp;
  std::vector<std::size_t> hidden = {64, 64};
  Activation hidden_act = Activation::Relu;
  std::size_t lstm_hidden = 32;
};

struct TrainConfig {
  Variant variant = Variant::Gil;
  Imputer imputer = Imputer::Zero;  // baseline only
  double noise_std = 1.0;           // noise_mean imputer
  ModelSpec model;
  std::size_t max_iter = 2000;
  std::size_t batch_size = 128;
  OptimizerConfig optimizer;
  RlConfig rl;
  double gil_d_coeff = 1.0;    // c > 0
  double placeholder = 0.0;    // value substituted for missing entries
  std::uint64_t seed = 0;
  std::size_t eval_every = 100;
  bool balanced_batches = false;       // forced on for GIL-D
  bool per_batch_action = false;       // one action per batch instead of per sample
  bool importance_after_precondition = false;
  ForcedAction forced_action = ForcedAction::None;
  bool ablation_freeze_identity = false;  // pin the input weighting net to 1
  // called after every weight update (iteration index, current model)
  std::function<void(std::size_t, const MlpModel&)> snapshot_hook;
};

struct EvalPoint {
  std::size_t iter = 0;
  double train_loss = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;  // NaN for multiclass
  double ap = 0.0;   // NaN for multiclass
};

struct TrainReport {
  std::vector<EvalPoint> evals;
  double final_accuracy = 0.0;
  double final_auc = 0.0;
  double final_ap = 0.0;
  double wall_clock_sec = 0.0;
  std::uint64_t seed = 0;
  double train_missing_rate = 0.0;
  std::vector<double> reward_trace;  // one reward per iteration (RL variants)
  bool diverged = false;
  std::string error;
  std::optional<double> imputation_mse;  // baselines with known ground truth
};

struct TrainOutput {
  bool is_lstm = false;
  MlpModel mlp;
  LstmModel lstm;
  std::optional<ActorCritic> ac;
  std::optional<MlpModel> weighter;  // the input-weighting net (ablation only)
  TrainReport report;
};

// Classifier/network construction shared by every variant: binary tasks get a
// single sigmoid output, multiclass a softmax row.
MlpModel build_classifier(const ModelSpec& spec, std::size_t input_dim, int num_classes,
                          std::uint64_t seed);
// The ablation's input-weighting network h(x): same hidden architecture as
// the policy net, sigmoid outputs over the input features.
MlpModel build_input_weighter(const TrainConfig& cfg, std::size_t input_dim);

TrainOutput train_gil(const Dataset& train, const Dataset& eval, const TrainConfig& cfg);
TrainOutput train_gil_h(const Dataset& train, const Dataset& eval, const TrainConfig& cfg);
TrainOutput train_gil_d(const Dataset& train, const Dataset& eval, const TrainConfig& cfg);
TrainOutput train_ablation_input(const Dataset& train, const Dataset& eval,
                                 const TrainConfig& cfg);
TrainOutput train_baseline(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                           const Dataset* ground_truth_eval = nullptr);

// Dispatch on cfg.variant.
TrainOutput train_variant(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                          const Dataset* ground_truth_eval = nullptr);

// Contrastive feature-separation term for GIL-D over a balanced batch of
// features, positives first:
//   D = MSE(F+[0:q], F-[0:q]) + MSE(F+[q:2q], F-[q:2q])
//     - MSE(F+[0:q], F+[q:2q]) - MSE(F-[0:q], F-[q:2q])      with q = b/4.
double gil_d_distance(const std::vector<Vector>& pos_features,
                      const std::vector<Vector>& neg_features);

// Impute a dataset the way the two-step baselines do. Column means/noise are
// taken from `stats` (normally the training split).
Dataset impute(const Dataset& ds, Imputer imputer, const Dataset& stats, double noise_std,
               std::uint64_t seed);

// Evaluate a model on a dataset: accuracy plus AUC/AP for binary tasks.
EvalPoint evaluate_mlp(const MlpModel& model, const Dataset& ds);
EvalPoint evaluate_lstm(const LstmModel& model, const Dataset& ds);

}  // namespace gil
