#include "gil/lstm.hpp"

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

Vector tanh_vec(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

}  // namespace

const Matrix& LstmModel::input_weights(Gate g) const {
  switch (g) {
    case Gate::Output: return Wo;
    case Gate::Input: return Wi;
    case Gate::Cell: return Wg;
    case Gate::Forget: return Wf;
  }
  throw std::logic_error("bad gate");
}

Matrix& LstmModel::input_weights(Gate g) {
  return const_cast<Matrix&>(static_cast<const LstmModel*>(this)->input_weights(g));
}

const std::vector<Vector>& LstmGradients::gate_deltas(Gate g) const {
  switch (g) {
    case Gate::Output: return delta_o;
    case Gate::Input: return delta_i;
    case Gate::Cell: return delta_g;
    case Gate::Forget: return delta_f;
  }
  throw std::logic_error("bad gate");
}

LstmModel lstm_init(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                    Activation out_act, std::uint64_t seed) {
  Rng rng(seed);
  LstmModel m;
  m.Wo = glorot_uniform(hidden_dim, input_dim, rng);
  m.Wi = glorot_uniform(hidden_dim, input_dim, rng);
  m.Wg = glorot_uniform(hidden_dim, input_dim, rng);
  m.Wf = glorot_uniform(hidden_dim, input_dim, rng);
  m.Uo = glorot_uniform(hidden_dim, hidden_dim, rng);
  m.Ui = glorot_uniform(hidden_dim, hidden_dim, rng);
  m.Ug = glorot_uniform(hidden_dim, hidden_dim, rng);
  m.Uf = glorot_uniform(hidden_dim, hidden_dim, rng);
  m.bo = Vector(hidden_dim, 0.0);
  m.bi = Vector(hidden_dim, 0.0);
  m.bg = Vector(hidden_dim, 0.0);
  m.bf = Vector(hidden_dim, 1.0);  // start with an open forget gate
  m.Wout = glorot_uniform(output_dim, hidden_dim, rng);
  m.bout = Vector(output_dim, 0.0);
  m.out_act = out_act;
  return m;
}

LstmForwardCache lstm_forward(const LstmModel& model, const std::vector<Vector>& xs) {
  if (xs.empty()) throw std::invalid_argument("lstm_forward: empty sequence");
  const std::size_t e = model.hidden_dim();
  LstmForwardCache cache;
  const std::size_t T = xs.size();
  cache.x = xs;
  cache.o.resize(T);
  cache.i.resize(T);
  cache.f.resize(T);
  cache.g.resize(T);
  cache.c.resize(T);
  cache.h.resize(T);
  Vector h_prev(e, 0.0), c_prev(e, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    if (xs[t].size() != model.input_dim())
      throw std::invalid_argument("lstm_forward: input dim mismatch");
    for (double v : xs[t]) {
      if (!std::isfinite(v)) throw std::invalid_argument("lstm_forward: non-finite input");
    }
    auto gate = [&](const Matrix& W, const Matrix& U, const Vector& b, Activation act) {
      Vector z = matvec(W, xs[t]);
      axpy(z, 1.0, matvec(U, h_prev));
      axpy(z, 1.0, b);
      return activate(act, z);
    };
    cache.o[t] = gate(model.Wo, model.Uo, model.bo, Activation::Sigmoid);
    cache.i[t] = gate(model.Wi, model.Ui, model.bi, Activation::Sigmoid);
    cache.f[t] = gate(model.Wf, model.Uf, model.bf, Activation::Sigmoid);
    cache.g[t] = gate(model.Wg, model.Ug, model.bg, Activation::Tanh);
    Vector c = hadamard(cache.f[t], c_prev);
    axpy(c, 1.0, hadamard(cache.i[t], cache.g[t]));
    cache.c[t] = c;
    cache.h[t] = hadamard(cache.o[t], tanh_vec(c));
    h_prev = cache.h[t];
    c_prev = cache.c[t];
  }
  cache.z_out = matvec(model.Wout, cache.h.back());
  axpy(cache.z_out, 1.0, model.bout);
  cache.yhat = activate(model.out_act, cache.z_out);
  return cache;
}

LstmGradients lstm_backward(const LstmModel& model, const LstmForwardCache& cache, const Vector& y,
                            LossKind loss_kind) {
  const std::size_t T = cache.horizon();
  const std::size_t e = model.hidden_dim();
  LstmGradients grads;
  grads.delta_o.resize(T);
  grads.delta_i.resize(T);
  grads.delta_g.resize(T);
  grads.delta_f.resize(T);
  grads.dUo = Matrix(e, e);
  grads.dUi = Matrix(e, e);
  grads.dUg = Matrix(e, e);
  grads.dUf = Matrix(e, e);
  grads.dbo = Vector(e, 0.0);
  grads.dbi = Vector(e, 0.0);
  grads.dbg = Vector(e, 0.0);
  grads.dbf = Vector(e, 0.0);

  // output head (loss attaches at the final step only)
  const Vector& yhat = cache.yhat;
  Vector delta_out;
  const bool fused_ce =
      loss_kind == LossKind::CrossEntropy &&
      (model.out_act == Activation::Softmax ||
       (model.out_act == Activation::Sigmoid && yhat.size() == 1));
  if (fused_ce) {
    delta_out = yhat;
    axpy(delta_out, -1.0, y);
  } else {
    if (model.out_act == Activation::Softmax)
      throw std::invalid_argument("lstm_backward: softmax output requires cross-entropy loss");
    delta_out = hadamard(loss_gradient(loss_kind, yhat, y),
                         activate_derivative(model.out_act, cache.z_out));
  }
  grads.dWout = outer(delta_out, cache.h.back());
  grads.dbout = delta_out;

  Vector dh = matvec_transpose(model.Wout, delta_out);  // dE/dh_t, accumulated
  Vector dc(e, 0.0);                                    // dE/dc_t carried across steps
  const Vector zeros(e, 0.0);
  for (std::size_t t = T; t-- > 0;) {
    const Vector& c_prev = t > 0 ? cache.c[t - 1] : zeros;
    const Vector& h_prev = t > 0 ? cache.h[t - 1] : zeros;
    const Vector tanh_c = tanh_vec(cache.c[t]);
    Vector& d_o = grads.delta_o[t];
    Vector& d_i = grads.delta_i[t];
    Vector& d_g = grads.delta_g[t];
    Vector& d_f = grads.delta_f[t];
    d_o.resize(e);
    d_i.resize(e);
    d_g.resize(e);
    d_f.resize(e);
    for (std::size_t k = 0; k < e; ++k) {
      const double o = cache.o[t][k], i = cache.i[t][k], f = cache.f[t][k], g = cache.g[t][k];
      const double th = tanh_c[k];
      d_o[k] = dh[k] * th * o * (1.0 - o);
      dc[k] += dh[k] * o * (1.0 - th * th);
      d_i[k] = dc[k] * g * i * (1.0 - i);
      d_g[k] = dc[k] * i * (1.0 - g * g);
      d_f[k] = dc[k] * c_prev[k] * f * (1.0 - f);
    }
    add_outer(grads.dUo, 1.0, d_o, h_prev);
    add_outer(grads.dUi, 1.0, d_i, h_prev);
    add_outer(grads.dUg, 1.0, d_g, h_prev);
    add_outer(grads.dUf, 1.0, d_f, h_prev);
    axpy(grads.dbo, 1.0, d_o);
    axpy(grads.dbi, 1.0, d_i);
    axpy(grads.dbg, 1.0, d_g);
    axpy(grads.dbf, 1.0, d_f);
    if (t > 0) {
      dh = matvec_transpose(model.Uo, d_o);
      axpy(dh, 1.0, matvec_transpose(model.Ui, d_i));
      axpy(dh, 1.0, matvec_transpose(model.Ug, d_g));
      axpy(dh, 1.0, matvec_transpose(model.Uf, d_f));
      for (std::size_t k = 0; k < e; ++k) dc[k] *= cache.f[t][k];
    }
  }
  return grads;
}

Matrix lstm_input_weight_gradient(const LstmGradients& grads, const LstmForwardCache& cache,
                                  Gate gate) {
  const std::vector<Vector>& deltas = grads.gate_deltas(gate);
  Matrix acc(deltas.front().size(), cache.x.front().size());
  for (std::size_t t = 0; t < cache.horizon(); ++t) add_outer(acc, 1.0, deltas[t], cache.x[t]);
  return acc;
}

}  // namespace gil
