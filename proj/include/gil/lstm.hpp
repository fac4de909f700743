#pragma once

#include <cstdint>
#include <vector>

#include "gil/linalg.hpp"

namespace gil {

enum class Gate { Output, Input, Cell, Forget };

// Single-layer LSTM encoder with a dense head on the final hidden state.
// The four input-weight matrices are the encoding weights; the recurrent
// matrices and biases are updated by plain gradient steps only.
struct LstmModel {
  Matrix Wo, Wi, Wg, Wf;  // e x d
  Matrix Uo, Ui, Ug, Uf;  // e x e
  Vector bo, bi, bg, bf;  // e
  Matrix Wout;            // out x e
  Vector bout;
  Activation out_act = Activation::Softmax;

  std::size_t input_dim() const { return Wo.cols(); }
  std::size_t hidden_dim() const { return Wo.rows(); }
  std::size_t output_dim() const { return Wout.rows(); }

  const Matrix& input_weights(Gate g) const;
  Matrix& input_weights(Gate g);
};

// Glorot-uniform weights, forget-gate bias 1, other biases 0.
LstmModel lstm_init(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                    Activation out_act, std::uint64_t seed);

struct LstmForwardCache {
  std::vector<Vector> x;                // inputs per step
  std::vector<Vector> o, i, f, g, c, h; // gate/cell/hidden per step
  Vector z_out;                         // Wout h_T + bout
  Vector yhat;

  std::size_t horizon() const { return x.size(); }
  const Vector& output() const { return yhat; }
};

LstmForwardCache lstm_forward(const LstmModel& model, const std::vector<Vector>& xs);

// Per-timestep gate deltas: the input-weight gradient at step t is
// delta_*[t] x_t^T, summed over t. Everything recurrent is dense.
struct LstmGradients {
  std::vector<Vector> delta_o, delta_i, delta_g, delta_f;
  Matrix dUo, dUi, dUg, dUf;
  Vector dbo, dbi, dbg, dbf;
  Matrix dWout;
  Vector dbout;

  const std::vector<Vector>& gate_deltas(Gate g) const;
};

LstmGradients lstm_backward(const LstmModel& model, const LstmForwardCache& cache, const Vector& y,
                            LossKind loss_kind);

// sum_t delta_*[t] x_t^T, the dense input-weight gradient for one gate
Matrix lstm_input_weight_gradient(const LstmGradients& grads, const LstmForwardCache& cache,
                                  Gate gate);

}  // namespace gil
