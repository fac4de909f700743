#include "gil/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "gil/rng.hpp"

namespace gil {

namespace {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : m.data()) v = rng.uniform(-limit, limit);
  return m;
}

}  // namespace

MlpModel mlp_init(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                  std::uint64_t seed) {
  if (dims.size() < 3)
    throw std::invalid_argument("mlp_init: need at least input, one hidden and output dim");
  if (acts.size() != dims.size() - 1)
    throw std::invalid_argument("mlp_init: one activation per weight layer");
  Rng rng(seed);
  MlpModel model;
  model.layers.reserve(dims.size() - 1);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    MlpLayer layer;
    layer.W = glorot_uniform(dims[i + 1], dims[i], rng);
    layer.b = Vector(dims[i + 1], 0.0);
    layer.act = acts[i];
    model.layers.push_back(std::move(layer));
  }
  return model;
}

MlpForwardCache mlp_forward(const MlpModel& model, const Vector& x) {
  if (x.size() != model.input_dim()) throw std::invalid_argument("mlp_forward: input dim mismatch");
  for (double v : x) {
    if (!std::isfinite(v))
      throw std::invalid_argument("mlp_forward: non-finite input (placeholder not applied?)");
  }
  MlpForwardCache cache;
  cache.input = x;
  cache.pre.reserve(model.layers.size());
  cache.post.reserve(model.layers.size());
  const Vector* q = &cache.input;
  for (const MlpLayer& layer : model.layers) {
    Vector z = matvec(layer.W, *q);
    axpy(z, 1.0, layer.b);
    cache.post.push_back(activate(layer.act, z));
    cache.pre.push_back(std::move(z));
    q = &cache.post.back();
  }
  return cache;
}

namespace {

// Shared delta back-substitution once the output-layer delta is known.
MlpGradients backprop_from_output_delta(const MlpModel& model, const MlpForwardCache& cache,
                                        Vector delta_out) {
  const std::size_t L = model.layers.size();
  MlpGradients grads;
  grads.delta.resize(L);
  grads.delta[L - 1] = std::move(delta_out);
  for (std::size_t i = L - 1; i-- > 0;) {
    Vector back = matvec_transpose(model.layers[i + 1].W, grads.delta[i + 1]);
    grads.delta[i] = hadamard(back, activate_derivative(model.layers[i].act, cache.pre[i]));
  }
  return grads;
}

}  // namespace

MlpGradients mlp_backward(const MlpModel& model, const MlpForwardCache& cache, const Vector& y,
                          LossKind loss_kind) {
  if (cache.post.size() != model.layers.size() ||
      cache.post.back().size() != model.output_dim())
    throw std::invalid_argument("mlp_backward: cache does not match model");
  const MlpLayer& out = model.layers.back();
  const Vector& yhat = cache.output();
  Vector delta_out;
  const bool fused_ce =
      loss_kind == LossKind::CrossEntropy &&
      (out.act == Activation::Softmax || (out.act == Activation::Sigmoid && yhat.size() == 1));
  if (fused_ce) {
    // softmax+CE (and sigmoid+binary-CE) collapse to yhat - y
    delta_out = yhat;
    axpy(delta_out, -1.0, y);
  } else {
    if (out.act == Activation::Softmax)
      throw std::invalid_argument("mlp_backward: softmax output requires cross-entropy loss");
    delta_out = hadamard(loss_gradient(loss_kind, yhat, y),
                         activate_derivative(out.act, cache.pre.back()));
  }
  return backprop_from_output_delta(model, cache, std::move(delta_out));
}

MlpGradients mlp_backward_from(const MlpModel& model, const MlpForwardCache& cache,
                               const Vector& grad_output) {
  const MlpLayer& out = model.layers.back();
  Vector delta_out =
      hadamard(grad_output, activate_derivative(out.act, cache.pre.back()));
  return backprop_from_output_delta(model, cache, std::move(delta_out));
}

Matrix mlp_weight_gradient(const MlpGradients& grads, const MlpForwardCache& cache,
                           std::size_t layer) {
  return outer(grads.delta[layer], cache.layer_input(layer));
}

Vector mlp_input_gradient(const MlpModel& model, const MlpGradients& grads) {
  return matvec_transpose(model.layers.front().W, grads.delta.front());
}

}  // namespace gil
