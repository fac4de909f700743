#pragma once

// Finite-difference gradient checks shared by the unit tests and the
// acceptance suite.

#include <algorithm>
#include <cmath>

#include "gil/lstm.hpp"
#include "gil/mlp.hpp"
#include "support/oracles.hpp"

namespace gil::testing {

// Central differences are only a valid oracle where the loss is
// differentiable; reject configurations with a relu pre-activation close
// enough to the kink for the FD stencil to straddle it.
inline bool relu_near_kink(const MlpModel& model, const Vector& x, double margin = 1e-3) {
  const MlpForwardCache cache = mlp_forward(model, x);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    if (model.layers[i].act != Activation::Relu) continue;
    for (double z : cache.pre[i]) {
      if (std::fabs(z) < margin) return true;
    }
  }
  return false;
}

// Max relative error between every layer's factorized gradient (weights and
// biases) and central finite differences of the loss.
inline double mlp_gradcheck(const MlpModel& model, const Vector& x, const Vector& y,
                            LossKind kind, double h) {
  const MlpForwardCache cache = mlp_forward(model, x);
  const MlpGradients grads = mlp_backward(model, cache, y, kind);
  double worst = 0.0;
  for (std::size_t layer = 0; layer < model.layers.size(); ++layer) {
    const Matrix analytic = mlp_weight_gradient(grads, cache, layer);
    for (std::size_t r = 0; r < analytic.rows(); ++r) {
      for (std::size_t c = 0; c < analytic.cols(); ++c) {
        const double w0 = model.layers[layer].W(r, c);
        const double fd = (mlp_loss_at(model, layer, r, c, w0 + h, x, y, kind) -
                           mlp_loss_at(model, layer, r, c, w0 - h, x, y, kind)) /
                          (2.0 * h);
        worst = std::max(worst, rel_error(analytic(r, c), fd));
      }
    }
    for (std::size_t k = 0; k < grads.delta[layer].size(); ++k) {
      const double b0 = model.layers[layer].b[k];
      const double fd = (mlp_bias_loss_at(model, layer, k, b0 + h, x, y, kind) -
                         mlp_bias_loss_at(model, layer, k, b0 - h, x, y, kind)) /
                        (2.0 * h);
      worst = std::max(worst, rel_error(grads.delta[layer][k], fd));
    }
  }
  return worst;
}

inline double lstm_loss_with(const LstmModel& model, const std::vector<Vector>& xs,
                             const Vector& y, LossKind kind) {
  return loss(kind, lstm_forward(model, xs).yhat, y);
}

// Finite differences over one tensor of an LSTM, via a mutator giving access
// to the tensor's flat storage.
template <typename GetTensor>
double lstm_tensor_gradcheck(const LstmModel& model, const std::vector<Vector>& xs,
                             const Vector& y, LossKind kind, const Vector& analytic,
                             GetTensor get_tensor, double h) {
  double worst = 0.0;
  LstmModel probe = model;
  Vector& tensor = get_tensor(probe);
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    const double v0 = tensor[i];
    tensor[i] = v0 + h;
    const double up = lstm_loss_with(probe, xs, y, kind);
    tensor[i] = v0 - h;
    const double down = lstm_loss_with(probe, xs, y, kind);
    tensor[i] = v0;
    worst = std::max(worst, rel_error(analytic[i], (up - down) / (2.0 * h)));
  }
  return worst;
}

// Max relative error across all 14 LSTM tensors: the four factorized
// input-weight blocks plus the dense recurrent/bias/output gradients.
inline double lstm_gradcheck(const LstmModel& model, const std::vector<Vector>& xs,
                             const Vector& y, LossKind kind, double h) {
  const LstmForwardCache cache = lstm_forward(model, xs);
  const LstmGradients grads = lstm_backward(model, cache, y, kind);
  double worst = 0.0;
  const auto check_matrix = [&](const Matrix& analytic, auto member) {
    worst = std::max(
        worst, lstm_tensor_gradcheck(
                   model, xs, y, kind, analytic.data(),
                   [member](LstmModel& m) -> Vector& { return (m.*member).data(); }, h));
  };
  const auto check_vector = [&](const Vector& analytic, auto member) {
    worst = std::max(worst,
                     lstm_tensor_gradcheck(model, xs, y, kind, analytic,
                                           [member](LstmModel& m) -> Vector& { return m.*member; },
                                           h));
  };
  check_matrix(lstm_input_weight_gradient(grads, cache, Gate::Output), &LstmModel::Wo);
  check_matrix(lstm_input_weight_gradient(grads, cache, Gate::Input), &LstmModel::Wi);
  check_matrix(lstm_input_weight_gradient(grads, cache, Gate::Cell), &LstmModel::Wg);
  check_matrix(lstm_input_weight_gradient(grads, cache, Gate::Forget), &LstmModel::Wf);
  check_matrix(grads.dUo, &LstmModel::Uo);
  check_matrix(grads.dUi, &LstmModel::Ui);
  check_matrix(grads.dUg, &LstmModel::Ug);
  check_matrix(grads.dUf, &LstmModel::Uf);
  check_matrix(grads.dWout, &LstmModel::Wout);
  check_vector(grads.dbo, &LstmModel::bo);
  check_vector(grads.dbi, &LstmModel::bi);
  check_vector(grads.dbg, &LstmModel::bg);
  check_vector(grads.dbf, &LstmModel::bf);
  check_vector(grads.dbout, &LstmModel::bout);
  return worst;
}

}  // namespace gil::testing
