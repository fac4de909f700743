#include "gil/rl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gil {

namespace {

Vector concat(const Vector& a, const Vector& b) {
  Vector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<std::size_t> net_dims(std::size_t in, const std::vector<std::size_t>& hidden,
                                  std::size_t out) {
  std::vector<std::size_t> dims;
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

std::vector<Activation> net_acts(std::size_t hidden_layers, Activation out_act) {
  std::vector<Activation> acts(hidden_layers, Activation::Relu);
  acts.push_back(out_act);
  return acts;
}

std::vector<ParamOptimizer> make_opts(const MlpModel& model, double lr, OptimizerKind kind) {
  OptimizerConfig cfg;
  cfg.kind = kind;
  cfg.learning_rate = lr;
  cfg.decay_steps = 0;  // RL updates use constant step sizes
  cfg.decay_rate = 1.0;
  std::vector<ParamOptimizer> opts;
  for (const MlpLayer& layer : model.layers) {
    opts.emplace_back(cfg, layer.W.size());
    opts.emplace_back(cfg, layer.b.size());
  }
  return opts;
}

void apply_steps(MlpModel& model, std::vector<ParamOptimizer>& opts,
                 const std::vector<Matrix>& w_grads, const std::vector<Vector>& b_grads) {
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    opts[2 * i].step(model.layers[i].W, w_grads[i]);
    opts[2 * i + 1].step(model.layers[i].b, b_grads[i]);
  }
}

void soft_update(MlpModel& target, const MlpModel& online, double tau) {
  for (std::size_t i = 0; i < online.layers.size(); ++i) {
    auto blend = [tau](Vector& t, const Vector& o) {
      for (std::size_t k = 0; k < t.size(); ++k) t[k] = tau * o[k] + (1.0 - tau) * t[k];
    };
    blend(target.layers[i].W.data(), online.layers[i].W.data());
    blend(target.layers[i].b, online.layers[i].b);
  }
}

struct GradAccum {
  std::vector<Matrix> w;
  std::vector<Vector> b;

  explicit GradAccum(const MlpModel& model) {
    for (const MlpLayer& layer : model.layers) {
      w.emplace_back(layer.W.rows(), layer.W.cols());
      b.emplace_back(layer.b.size(), 0.0);
    }
  }

  void add(const MlpGradients& grads, const MlpForwardCache& cache, double scale) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      add_outer(w[i], scale, grads.delta[i], cache.layer_input(i));
      axpy(b[i], scale, grads.delta[i]);
    }
  }
};

}  // namespace

Vector GilState::flatten() const {
  Vector out;
  out.reserve(dim());
  out.insert(out.end(), x_filled.begin(), x_filled.end());
  out.insert(out.end(), m.begin(), m.end());
  out.insert(out.end(), zeta.begin(), zeta.end());
  out.insert(out.end(), yhat.begin(), yhat.end());
  return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer: zero capacity");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[head_] = std::move(t);  // overwrite the oldest
    head_ = (head_ + 1) % capacity_;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (storage_.empty()) throw std::runtime_error("replay buffer: sampling from empty buffer");
  std::vector<const Transition*> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(&storage_[rng.uniform_int(storage_.size())]);
  }
  return out;
}

ActorCritic make_actor_critic(std::size_t state_dim, std::size_t action_dim, const RlConfig& cfg,
                              std::uint64_t seed) {
  if (std::fabs(cfg.p_actor + cfg.p_mask + cfg.p_random - 1.0) > 1e-9)
    throw std::invalid_argument("behavioral mixture probabilities must sum to 1");
  ActorCritic ac;
  ac.cfg = cfg;
  ac.state_dim = state_dim;
  ac.action_dim = action_dim;
  ac.actor = mlp_init(net_dims(state_dim, cfg.actor_hidden, action_dim),
                      net_acts(cfg.actor_hidden.size(), Activation::Sigmoid), seed);
  ac.critic = mlp_init(net_dims(state_dim + action_dim, cfg.critic_hidden, 1),
                       net_acts(cfg.critic_hidden.size(), Activation::Identity), seed + 1);
  if (cfg.use_target_networks) {
    ac.actor_target = ac.actor;
    ac.critic_target = ac.critic;
  }
  ac.actor_opt = make_opts(ac.actor, cfg.actor_lr, cfg.optimizer);
  ac.critic_opt = make_opts(ac.critic, cfg.critic_lr, cfg.optimizer);
  return ac;
}

Vector actor_forward(const ActorCritic& ac, const Vector& state_flat) {
  return mlp_forward(ac.actor, state_flat).output();
}

Vector actor_forward(const ActorCritic& ac, const GilState& s) {
  return actor_forward(ac, s.flatten());
}

double critic_forward(const ActorCritic& ac, const Vector& state_flat, const Vector& a) {
  return mlp_forward(ac.critic, concat(state_flat, a)).output()[0];
}

double critic_forward(const ActorCritic& ac, const GilState& s, const Vector& a) {
  return critic_forward(ac, s.flatten(), a);
}

Vector behavioral(const ActorCritic& ac, const GilState& s, Rng& rng) {
  const double u = rng.uniform();
  if (u < ac.cfg.p_actor) {
    Vector a = actor_forward(ac, s);
    if (ac.cfg.exploration_noise > 0.0) {
      for (double& v : a) {
        v = std::clamp(v + rng.normal(0.0, ac.cfg.exploration_noise), 0.0, 1.0);
      }
    }
    return a;
  }
  if (u < ac.cfg.p_actor + ac.cfg.p_mask) return s.m;
  Vector a(ac.action_dim);
  for (double& v : a) v = rng.uniform();
  return a;
}

namespace {

double td_error(const ActorCritic& ac, const Transition& t, const MlpForwardCache& critic_cache) {
  const Vector s2 = t.s_next.flatten();
  const bool targets = ac.cfg.use_target_networks;
  const MlpModel& actor_b = targets ? ac.actor_target : ac.actor;
  const MlpModel& critic_b = targets ? ac.critic_target : ac.critic;
  const Vector a2 = mlp_forward(actor_b, s2).output();
  const double q2 = mlp_forward(critic_b, concat(s2, a2)).output()[0];
  const double q = critic_cache.output()[0];
  const double delta = t.r + ac.cfg.gamma * q2 - q;
  if (!std::isfinite(delta))
    throw std::runtime_error("rl_update: TD error is not finite, training aborted");
  return delta;
}

}  // namespace

double rl_update(ActorCritic& ac, const Transition& t) {
  const std::vector<const Transition*> batch = {&t};
  return rl_update(ac, batch);
}

double rl_update(ActorCritic& ac, const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw std::invalid_argument("rl_update: empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  // both updates are gradient ascents; accumulate the negated gradients so
  // the optimizer's descent step applies them directly
  GradAccum critic_acc(ac.critic);
  GradAccum actor_acc(ac.actor);
  double mean_delta = 0.0;
  const Vector unit{1.0};
  for (const Transition* t : batch) {
    const Vector s = t->s.flatten();
    // critic: nu += lr * delta * dQ/dnu at (s, a)
    const MlpForwardCache q_cache = mlp_forward(ac.critic, concat(s, t->a));
    const double delta = td_error(ac, *t, q_cache);
    mean_delta += delta * scale;
    const MlpGradients q_grads = mlp_backward_from(ac.critic, q_cache, unit);
    critic_acc.add(q_grads, q_cache, -delta * scale);
    // actor: theta += lr * dpi/dtheta * dQ/da at a = pi(s)
    const MlpForwardCache pi_cache = mlp_forward(ac.actor, s);
    const MlpForwardCache q_pi_cache = mlp_forward(ac.critic, concat(s, pi_cache.output()));
    const MlpGradients q_pi_grads = mlp_backward_from(ac.critic, q_pi_cache, unit);
    const Vector dq_dinput = mlp_input_gradient(ac.critic, q_pi_grads);
    const Vector dq_da(dq_dinput.end() - static_cast<std::ptrdiff_t>(ac.action_dim),
                       dq_dinput.end());
    const MlpGradients pi_grads = mlp_backward_from(ac.actor, pi_cache, dq_da);
    actor_acc.add(pi_grads, pi_cache, -scale);
  }
  apply_steps(ac.critic, ac.critic_opt, critic_acc.w, critic_acc.b);
  apply_steps(ac.actor, ac.actor_opt, actor_acc.w, actor_acc.b);
  if (ac.cfg.use_target_networks) {
    soft_update(ac.actor_target, ac.actor, ac.cfg.tau);
    soft_update(ac.critic_target, ac.critic, ac.cfg.tau);
  }
  return mean_delta;
}

}  // namespace gil
