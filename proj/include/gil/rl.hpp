#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gil/linalg.hpp"
#include "gil/mlp.hpp"
#include "gil/optim.hpp"
#include "gil/rng.hpp"

namespace gil {

// The 4-tuple fed to the policy. Flattened as [x_filled | m | zeta | yhat].
struct GilState {
  Vector x_filled;
  Vector m;
  Vector zeta;
  Vector yhat;

  std::size_t dim() const {
    return x_filled.size() + m.size() + zeta.size() + yhat.size();
  }
  Vector flatten() const;
};

struct Transition {
  GilState s;
  Vector a;
  double r = 0.0;
  GilState s_next;
};

struct RlConfig {
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double gamma = 0.99;
  // behavioral mixture: actor (noisy) / missing indicator / uniform random
  double p_actor = 0.8;
  double p_mask = 0.1;
  double p_random = 0.1;
  double exploration_noise = 0.1;
  std::vector<std::size_t> actor_hidden = {256, 256};
  std::vector<std::size_t> critic_hidden = {256, 256};
  OptimizerKind optimizer = OptimizerKind::Sgd;  // plain joint updates by default
  bool use_target_networks = false;
  double tau = 0.005;
  bool use_replay = false;
  std::size_t replay_capacity = 10000;
  std::size_t replay_minibatch = 64;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return storage_[i]; }

  // uniform with replacement; throws when empty
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t head_ = 0;
};

struct ActorCritic {
  MlpModel actor;   // state -> action in (0,1)^action_dim
  MlpModel critic;  // [state | action] -> scalar
  MlpModel actor_target;
  MlpModel critic_target;
  RlConfig cfg;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  // per-tensor optimizer state, [W0, b0, W1, b1, ...] for actor then critic
  std::vector<ParamOptimizer> actor_opt;
  std::vector<ParamOptimizer> critic_opt;
};

ActorCritic make_actor_critic(std::size_t state_dim, std::size_t action_dim, const RlConfig& cfg,
                              std::uint64_t seed);

Vector actor_forward(const ActorCritic& ac, const Vector& state_flat);
Vector actor_forward(const ActorCritic& ac, const GilState& s);
double critic_forward(const ActorCritic& ac, const Vector& state_flat, const Vector& a);
double critic_forward(const ActorCritic& ac, const GilState& s, const Vector& a);

// Exploration mixture: noisy actor output w.p. p_actor, the missing indicator
// w.p. p_mask, uniform random w.p. p_random. Always lands in [0,1]^d.
Vector behavioral(const ActorCritic& ac, const GilState& s, Rng& rng);

// One joint actor/critic update from a single transition; returns the TD
// error computed with pre-update parameters.
double rl_update(ActorCritic& ac, const Transition& t);

// Minibatch variant (averaged gradients); returns the mean TD error.
double rl_update(ActorCritic& ac, const std::vector<const Transition*>& batch);

}  // namespace gil
