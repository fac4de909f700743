#pragma once

#include <cstdint>
#include <vector>

#include "gil/linalg.hpp"

namespace gil {

struct MlpLayer {
  Matrix W;
  Vector b;
  Activation act = Activation::Relu;
};

// Feed-forward network. layers[0] is the encoding layer (maps inputs to the
// feature vector); everything after it makes up the inference layers.
struct MlpModel {
  std::vector<MlpLayer> layers;

  std::size_t input_dim() const { return layers.front().W.cols(); }
  std::size_t output_dim() const { return layers.back().W.rows(); }
  std::size_t feature_dim() const { return layers.front().W.rows(); }
};

// Glorot-uniform weights, zero biases. dims = [input, hidden..., output],
// acts has one entry per weight layer.
MlpModel mlp_init(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                  std::uint64_t seed);

struct MlpForwardCache {
  Vector input;              // q_0
  std::vector<Vector> pre;   // z_i = W_i q_{i-1} + b_i
  std::vector<Vector> post;  // q_i = act_i(z_i)

  const Vector& output() const { return post.back(); }
  const Vector& feature() const { return post.front(); }
  // input to layer i
  const Vector& layer_input(std::size_t i) const { return i == 0 ? input : post[i - 1]; }
};

// Rejects non-finite inputs: missing entries must already be placeholder-filled.
MlpForwardCache mlp_forward(const MlpModel& model, const Vector& x);

// The factorized form of the weight gradients: dE/dW_i = delta[i] q_{i-1}^T
// and dE/db_i = delta[i].
struct MlpGradients {
  std::vector<Vector> delta;
};

MlpGradients mlp_backward(const MlpModel& model, const MlpForwardCache& cache, const Vector& y,
                          LossKind loss_kind);

// Backward pass from an externally supplied dE/dyhat (used by the actor-critic
// chain). The output activation must be element-wise.
MlpGradients mlp_backward_from(const MlpModel& model, const MlpForwardCache& cache,
                               const Vector& grad_output);

// Dense gradient of one layer, reconstructed from the factors.
Matrix mlp_weight_gradient(const MlpGradients& grads, const MlpForwardCache& cache,
                           std::size_t layer);

// dE/dx = W_1^T delta_1
Vector mlp_input_gradient(const MlpModel& model, const MlpGradients& grads);

}  // namespace gil
