#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "gil/linalg.hpp"

namespace gil {

enum class OptimizerKind { Sgd, Adam };

const char* to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // exponential decay: lr * decay_rate^(t / decay_steps); 0 steps disables it
  std::size_t decay_steps = 500;
  double decay_rate = 0.9;
};

// Optimizer state for a single parameter tensor.
class ParamOptimizer {
 public:
  ParamOptimizer() = default;
  ParamOptimizer(const OptimizerConfig& cfg, std::size_t n);

  void step(std::span<double> params, std::span<const double> grads);
  void step(Matrix& params, const Matrix& grads);
  void step(Vector& params, const Vector& grads);

  // The update p would receive for gradient g, without applying it
  // (p_new = p - direction).
  Vector update_direction(std::span<const double> grads);

  double current_learning_rate() const;
  std::int64_t steps_taken() const { return t_; }

 private:
  void advance(std::span<const double> grads, Vector& out_direction);

  OptimizerConfig cfg_;
  Vector m_, v_;
  std::int64_t t_ = 0;
};

// Importance-weighted encoding gradient: delta (x ⊙ a)^T, which equals the
// dense gradient delta x^T with every row scaled column-wise by a.
// a must lie in [0,1]^d.
Matrix apply_importance(const Vector& delta, const Vector& x_filled, const Vector& a);

}  // namespace gil
