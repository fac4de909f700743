#include "gil/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace gil {

const char* to_string(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::Sgd;
  if (s == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer: " + s);
}

ParamOptimizer::ParamOptimizer(const OptimizerConfig& cfg, std::size_t n) : cfg_(cfg) {
  if (cfg.learning_rate < 0.0) throw std::invalid_argument("optimizer: negative learning rate");
  if (cfg.kind == OptimizerKind::Adam) {
    m_.assign(n, 0.0);
    v_.assign(n, 0.0);
  }
}

double ParamOptimizer::current_learning_rate() const {
  if (cfg_.decay_steps == 0 || cfg_.decay_rate == 1.0) return cfg_.learning_rate;
  const double exponent = static_cast<double>(t_) / static_cast<double>(cfg_.decay_steps);
  return cfg_.learning_rate * std::pow(cfg_.decay_rate, exponent);
}

void ParamOptimizer::advance(std::span<const double> grads, Vector& direction) {
  const double lr = current_learning_rate();
  ++t_;
  direction.resize(grads.size());
  if (cfg_.kind == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < grads.size(); ++i) direction[i] = lr * grads[i];
    return;
  }
  if (m_.size() != grads.size()) throw std::invalid_argument("optimizer: tensor size changed");
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double mhat = m_[i] / bias1;
    const double vhat = v_[i] / bias2;
    direction[i] = lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
  }
}

void ParamOptimizer::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("optimizer: shape mismatch");
  Vector direction;
  advance(grads, direction);
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= direction[i];
}

void ParamOptimizer::step(Matrix& params, const Matrix& grads) {
  if (!params.same_shape(grads)) throw std::invalid_argument("optimizer: shape mismatch");
  step(std::span<double>(params.data()), std::span<const double>(grads.data()));
}

void ParamOptimizer::step(Vector& params, const Vector& grads) {
  step(std::span<double>(params), std::span<const double>(grads));
}

Vector ParamOptimizer::update_direction(std::span<const double> grads) {
  Vector direction;
  advance(grads, direction);
  return direction;
}

Matrix apply_importance(const Vector& delta, const Vector& x_filled, const Vector& a) {
  if (x_filled.size() != a.size()) throw std::invalid_argument("apply_importance: dim mismatch");
  for (double v : a) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("apply_importance: importance outside [0,1]");
  }
  return outer(delta, hadamard(x_filled, a));
}

}  // namespace gil
