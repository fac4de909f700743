#include "gil/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gil/metrics.hpp"
#include "gil/missingness.hpp"

namespace gil {

namespace {

// Independent deterministic streams derived from the run seed.
constexpr std::uint64_t kDataStreamSalt = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kRlStreamSalt = 0xD1B54A32D192ED03ull;
constexpr std::uint64_t kRlInitSalt = 0x94D049BB133111EBull;
constexpr std::uint64_t kImputeSalt = 0xBF58476D1CE4E5B9ull;

const char* kVariantNames[] = {"gil", "gil_h", "gil_d", "ablation_input", "baseline"};
const char* kImputerNames[] = {"zero", "mean", "carry_forward", "noise_mean"};

std::size_t model_output_dim(int num_classes) {
  return num_classes == 2 ? 1 : static_cast<std::size_t>(num_classes);
}

Activation model_output_act(int num_classes) {
  return num_classes == 2 ? Activation::Sigmoid : Activation::Softmax;
}

MlpModel build_mlp(const ModelSpec& spec, std::size_t input_dim, int num_classes,
                   std::uint64_t seed) {
  return build_classifier(spec, input_dim, num_classes, seed);
}

Vector target_vector(int label, std::size_t output_dim) {
  if (output_dim == 1) return Vector{static_cast<double>(label)};
  return one_hot(label, output_dim);
}

// Per-tensor optimizer state for an MLP, [W_i, b_i] in layer order.
struct MlpOpt {
  std::vector<ParamOptimizer> w, b;

  MlpOpt(const MlpModel& model, const OptimizerConfig& cfg) {
    for (const MlpLayer& layer : model.layers) {
      w.emplace_back(cfg, layer.W.size());
      b.emplace_back(cfg, layer.b.size());
    }
  }

  // Plain descent step on every tensor from dense gradients.
  void step_dense(MlpModel& model, const std::vector<Matrix>& wg, const std::vector<Vector>& bg) {
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
      w[i].step(model.layers[i].W, wg[i]);
      b[i].step(model.layers[i].b, bg[i]);
    }
  }

  // Training step with the importance vector applied to the encoding weights. By
  // default the weighted gradient feeds the optimizer (so masked columns
  // accumulate no momentum); the alternative order preconditions the raw
  // gradient first and weights the resulting update.
  void step_importance(MlpModel& model, const MlpGradients& grads, const MlpForwardCache& cache,
                       const Vector& a, bool after_precondition) {
    MlpLayer& enc = model.layers.front();
    if (!after_precondition) {
      const Matrix g = apply_importance(grads.delta.front(), cache.input, a);
      w.front().step(enc.W, g);
    } else {
      const Matrix g = outer(grads.delta.front(), cache.input);
      const Vector dir = w.front().update_direction(g.data());
      const std::size_t cols = enc.W.cols();
      for (std::size_t r = 0; r < enc.W.rows(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) enc.W(r, c) -= dir[r * cols + c] * a[c];
      }
    }
    b.front().step(enc.b, grads.delta.front());
    for (std::size_t i = 1; i < model.layers.size(); ++i) {
      w[i].step(model.layers[i].W, outer(grads.delta[i], cache.post[i - 1]));
      b[i].step(model.layers[i].b, grads.delta[i]);
    }
  }
};

// Sample-at-a-time source; balanced mode walks [positives | negatives]
// batches and reports when a new batch begins.
struct SampleSource {
  std::optional<BatchIterator> plain;
  std::optional<BalancedBatchIterator> balanced;
  std::vector<std::size_t> batch;
  std::size_t pos = 0;
  bool fresh_batch = false;

  SampleSource(const Dataset& ds, bool use_balanced, std::size_t batch_size, std::uint64_t seed) {
    if (use_balanced)
      balanced.emplace(ds, batch_size, seed);
    else
      plain.emplace(ds, 1, seed);
  }

  std::size_t next() {
    if (plain) {
      fresh_batch = false;
      return plain->next()[0];
    }
    if (pos >= batch.size()) {
      batch = balanced->next();
      pos = 0;
      fresh_batch = true;
    } else {
      fresh_batch = false;
    }
    return batch[pos++];
  }
};

bool uses_rl(Variant v) { return v == Variant::Gil || v == Variant::GilD; }

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

EvalPoint evaluate_scores(const Vector& scores, const std::vector<Vector>& prob_rows,
                          const std::vector<int>& labels) {
  EvalPoint pt;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool binary = !scores.empty();
  if (binary) {
    pt.accuracy = accuracy(scores, labels);
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (has_pos && has_neg) {
      pt.auc = roc_auc(scores, labels);
      pt.ap = average_precision(scores, labels);
    } else {
      pt.auc = nan;
      pt.ap = nan;
    }
  } else {
    pt.accuracy = accuracy(prob_rows, labels);
    pt.auc = nan;
    pt.ap = nan;
  }
  return pt;
}

// GIL-D batch features under the current weights; batch is [pos | neg].
double mlp_batch_d_term(const MlpModel& model, const Dataset& ds,
                        const std::vector<std::size_t>& batch) {
  const std::size_t half = batch.size() / 2;
  std::vector<Vector> pos, neg;
  pos.reserve(half);
  neg.reserve(half);
  for (std::size_t i = 0; i < half; ++i)
    pos.push_back(mlp_forward(model, ds.samples[batch[i]].x_filled).feature());
  for (std::size_t i = half; i < batch.size(); ++i)
    neg.push_back(mlp_forward(model, ds.samples[batch[i]].x_filled).feature());
  return gil_d_distance(pos, neg);
}

double lstm_batch_d_term(const LstmModel& model, const Dataset& ds,
                         const std::vector<std::size_t>& batch) {
  const std::size_t half = batch.size() / 2;
  std::vector<Vector> pos, neg;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const LstmForwardCache c = lstm_forward(model, ds.sequences[batch[i]].x_filled);
    (i < half ? pos : neg).push_back(c.h.back());
  }
  return gil_d_distance(pos, neg);
}

struct BestTracker {
  double best_accuracy = -1.0;
  bool has_best = false;

  template <typename Model>
  void consider(const EvalPoint& pt, const Model& model, Model& best_model) {
    if (!has_best || pt.accuracy > best_accuracy) {
      best_accuracy = pt.accuracy;
      best_model = model;
      has_best = true;
    }
  }
};

void finish_report(TrainReport& report, const std::vector<EvalPoint>& evals,
                   const EvalPoint& final_pt, double t0) {
  report.evals = evals;
  report.final_accuracy = final_pt.accuracy;
  report.final_auc = final_pt.auc;
  report.final_ap = final_pt.ap;
  report.wall_clock_sec = now_seconds() - t0;
}

}  // namespace

const char* to_string(Variant v) { return kVariantNames[static_cast<int>(v)]; }

Variant variant_from_string(const std::string& s) {
  for (int i = 0; i < 5; ++i) {
    if (s == kVariantNames[i]) return static_cast<Variant>(i);
  }
  throw std::invalid_argument("unknown variant: " + s);
}

const char* to_string(Imputer i) { return kImputerNames[static_cast<int>(i)]; }

Imputer imputer_from_string(const std::string& s) {
  for (int i = 0; i < 4; ++i) {
    if (s == kImputerNames[i]) return static_cast<Imputer>(i);
  }
  throw std::invalid_argument("unknown imputer: " + s);
}

MlpModel build_classifier(const ModelSpec& spec, std::size_t input_dim, int num_classes,
                          std::uint64_t seed) {
  std::vector<std::size_t> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(model_output_dim(num_classes));
  std::vector<Activation> acts(spec.hidden.size(), spec.hidden_act);
  acts.push_back(model_output_act(num_classes));
  return mlp_init(dims, acts, seed);
}

MlpModel build_input_weighter(const TrainConfig& cfg, std::size_t input_dim) {
  std::vector<std::size_t> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), cfg.rl.actor_hidden.begin(), cfg.rl.actor_hidden.end());
  dims.push_back(input_dim);
  std::vector<Activation> acts(cfg.rl.actor_hidden.size(), Activation::Relu);
  acts.push_back(Activation::Sigmoid);
  return mlp_init(dims, acts, cfg.seed ^ kRlInitSalt);
}

double gil_d_distance(const std::vector<Vector>& pos_features,
                      const std::vector<Vector>& neg_features) {
  if (pos_features.size() != neg_features.size() || pos_features.size() < 2 ||
      pos_features.size() % 2 != 0)
    throw std::invalid_argument(
        "gil_d_distance: needs equal even-sized feature sets (batch divisible by 4)");
  const std::size_t q = pos_features.size() / 2;
  const std::size_t e = pos_features.front().size();
  auto block_mse = [&](const std::vector<Vector>& a, std::size_t a0, const std::vector<Vector>& b,
                       std::size_t b0) {
    double acc = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
      for (std::size_t j = 0; j < e; ++j) {
        const double d = a[a0 + k][j] - b[b0 + k][j];
        acc += d * d;
      }
    }
    return acc / static_cast<double>(q * e);
  };
  return block_mse(pos_features, 0, neg_features, 0) +
         block_mse(pos_features, q, neg_features, q) -
         block_mse(pos_features, 0, pos_features, q) -
         block_mse(neg_features, 0, neg_features, q);
}

EvalPoint evaluate_mlp(const MlpModel& model, const Dataset& ds) {
  if (ds.sequential()) throw std::invalid_argument("evaluate_mlp: sequential dataset");
  Vector scores;
  std::vector<Vector> prob_rows;
  std::vector<int> labels;
  labels.reserve(ds.size());
  const bool binary = model.output_dim() == 1;
  for (const Sample& s : ds.samples) {
    const MlpForwardCache cache = mlp_forward(model, s.x_filled);
    if (binary)
      scores.push_back(cache.output()[0]);
    else
      prob_rows.push_back(cache.output());
    labels.push_back(s.y);
  }
  return evaluate_scores(scores, prob_rows, labels);
}

EvalPoint evaluate_lstm(const LstmModel& model, const Dataset& ds) {
  if (!ds.sequential()) throw std::invalid_argument("evaluate_lstm: tabular dataset");
  Vector scores;
  std::vector<Vector> prob_rows;
  std::vector<int> labels;
  const bool binary = model.output_dim() == 1;
  for (const SequenceSample& s : ds.sequences) {
    const LstmForwardCache cache = lstm_forward(model, s.x_filled);
    if (binary)
      scores.push_back(cache.yhat[0]);
    else
      prob_rows.push_back(cache.yhat);
    labels.push_back(s.y);
  }
  return evaluate_scores(scores, prob_rows, labels);
}

Dataset impute(const Dataset& ds, Imputer imputer, const Dataset& stats, double noise_std,
               std::uint64_t seed) {
  Dataset out = ds;
  Rng rng(seed);
  switch (imputer) {
    case Imputer::Zero:
      refill_placeholder(out, 0.0);
      break;
    case Imputer::Mean:
    case Imputer::NoiseMean: {
      const bool noisy = imputer == Imputer::NoiseMean;
      auto fill = [&](Vector& filled, const Vector& m) {
        for (std::size_t j = 0; j < m.size(); ++j) {
          if (m[j] == 0.0) {
            filled[j] = stats.column_means[j] + (noisy ? rng.normal(0.0, noise_std) : 0.0);
          }
        }
      };
      for (Sample& s : out.samples) fill(s.x_filled, s.m);
      for (SequenceSample& s : out.sequences) {
        for (std::size_t t = 0; t < s.horizon(); ++t) fill(s.x_filled[t], s.m[t]);
      }
      break;
    }
    case Imputer::CarryForward: {
      if (!ds.sequential())
        throw std::invalid_argument("carry_forward imputer requires sequence data");
      for (SequenceSample& s : out.sequences) {
        Vector last = stats.column_means;  // no earlier observation: fall back to the mean
        for (std::size_t t = 0; t < s.horizon(); ++t) {
          for (std::size_t j = 0; j < s.x[t].size(); ++j) {
            if (s.m[t][j] == 0.0)
              s.x_filled[t][j] = last[j];
            else
              last[j] = s.x[t][j];
          }
        }
      }
      break;
    }
  }
  return out;
}

namespace {

GilState make_state(const Sample& sample, const MlpForwardCache& cache) {
  return GilState{sample.x_filled, sample.m, cache.feature(), cache.output()};
}

// ---------------------------------------------------------------------------
// GIL / GIL-H / GIL-D on tabular data, one sample per iteration (the default)
// ---------------------------------------------------------------------------
TrainOutput train_gil_mlp(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                          Variant mode) {
  const double t0 = now_seconds();
  const std::size_t d = train.d;
  TrainOutput out;
  out.is_lstm = false;
  out.report.seed = cfg.seed;
  out.report.train_missing_rate = missing_rate(train);

  MlpModel model = build_mlp(cfg.model, d, train.num_classes, cfg.seed);
  MlpOpt opt(model, cfg.optimizer);
  const std::size_t out_dim = model.output_dim();
  const LossKind loss_kind = LossKind::CrossEntropy;

  const bool rl = uses_rl(mode) && cfg.forced_action == ForcedAction::None;
  const std::size_t state_dim = d + d + model.feature_dim() + out_dim;
  std::optional<ActorCritic> ac;
  if (uses_rl(mode))
    ac.emplace(make_actor_critic(state_dim, d, cfg.rl, cfg.seed ^ kRlInitSalt));
  Rng rl_rng(cfg.seed ^ kRlStreamSalt);
  std::optional<ReplayBuffer> replay;
  if (rl && cfg.rl.use_replay) replay.emplace(cfg.rl.replay_capacity);

  const bool balanced = cfg.balanced_batches || mode == Variant::GilD;
  SampleSource source(train, balanced, cfg.batch_size, cfg.seed ^ kDataStreamSalt);

  auto pick_action = [&](const GilState& s, const Vector& mask) -> Vector {
    switch (cfg.forced_action) {
      case ForcedAction::Ones: return Vector(d, 1.0);
      case ForcedAction::Mask: return mask;
      case ForcedAction::None: break;
    }
    if (mode == Variant::GilH) return mask;
    return behavioral(*ac, s, rl_rng);
  };

  std::size_t idx = source.next();
  double d_term = 0.0;
  if (mode == Variant::GilD) d_term = mlp_batch_d_term(model, train, source.batch);
  const Sample* cur = &train.samples[idx];
  Vector y_target = target_vector(cur->y, out_dim);
  MlpForwardCache cache = mlp_forward(model, cur->x_filled);
  GilState s = make_state(*cur, cache);

  std::vector<EvalPoint> evals;
  MlpModel best = model;
  BestTracker tracker;
  double loss_accum = 0.0;
  std::size_t loss_count = 0;

  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    const Vector a = pick_action(s, cur->m);
    const MlpGradients grads = mlp_backward(model, cache, y_target, loss_kind);
    opt.step_importance(model, grads, cache, a, cfg.importance_after_precondition);
    if (cfg.snapshot_hook) cfg.snapshot_hook(iter, model);

    // prediction for the same sample under the updated weights -> reward
    const MlpForwardCache updated = mlp_forward(model, cur->x_filled);
    const double err = loss(loss_kind, updated.output(), y_target);
    double reward = -err;
    if (mode == Variant::GilD) reward += cfg.gil_d_coeff * d_term;
    out.report.reward_trace.push_back(reward);
    loss_accum += err;
    ++loss_count;
    if (!std::isfinite(err)) {
      out.report.diverged = true;
      out.report.error = "training loss is not finite at iteration " + std::to_string(iter);
      break;
    }

    // next sample and next state
    const std::size_t idx2 = source.next();
    if (mode == Variant::GilD && source.fresh_batch)
      d_term = mlp_batch_d_term(model, train, source.batch);
    const Sample* nxt = &train.samples[idx2];
    MlpForwardCache cache2 = mlp_forward(model, nxt->x_filled);
    GilState s2 = make_state(*nxt, cache2);

    if (rl) {
      Transition tr{std::move(s), a, reward, s2};
      try {
        if (replay) {
          replay->push(std::move(tr));
          rl_update(*ac, replay->sample(cfg.rl.replay_minibatch, rl_rng));
        } else {
          rl_update(*ac, tr);
        }
      } catch (const std::runtime_error& e) {
        out.report.diverged = true;
        out.report.error = e.what();
        break;
      }
    }

    s = std::move(s2);
    cur = nxt;
    y_target = target_vector(cur->y, out_dim);
    cache = std::move(cache2);

    if (iter % cfg.eval_every == 0 || iter == cfg.max_iter) {
      EvalPoint pt = evaluate_mlp(model, eval);
      pt.iter = iter;
      pt.train_loss = loss_count ? loss_accum / static_cast<double>(loss_count) : 0.0;
      loss_accum = 0.0;
      loss_count = 0;
      evals.push_back(pt);
      tracker.consider(pt, model, best);
    }
  }

  EvalPoint final_pt = tracker.has_best ? evaluate_mlp(best, eval) : evaluate_mlp(model, eval);
  finish_report(out.report, evals, final_pt, t0);
  out.mlp = tracker.has_best ? std::move(best) : std::move(model);
  if (ac) out.ac = std::move(ac);
  return out;
}

// Per-batch action mode: one importance vector per batch, gradient factors
// averaged over the batch; the RL state mixes the first sample's (x, m) with
// the batch-mean feature and prediction.
TrainOutput train_gil_mlp_batched(const Dataset& train, const Dataset& eval,
                                  const TrainConfig& cfg, Variant mode) {
  const double t0 = now_seconds();
  const std::size_t d = train.d;
  TrainOutput out;
  out.report.seed = cfg.seed;
  out.report.train_missing_rate = missing_rate(train);

  MlpModel model = build_mlp(cfg.model, d, train.num_classes, cfg.seed);
  MlpOpt opt(model, cfg.optimizer);
  const std::size_t out_dim = model.output_dim();
  const LossKind loss_kind = LossKind::CrossEntropy;
  const std::size_t b = cfg.batch_size;

  const bool rl = uses_rl(mode) && cfg.forced_action == ForcedAction::None;
  const std::size_t state_dim = d + d + model.feature_dim() + out_dim;
  std::optional<ActorCritic> ac;
  if (uses_rl(mode))
    ac.emplace(make_actor_critic(state_dim, d, cfg.rl, cfg.seed ^ kRlInitSalt));
  Rng rl_rng(cfg.seed ^ kRlStreamSalt);

  const bool balanced = cfg.balanced_batches || mode == Variant::GilD;
  std::optional<BatchIterator> plain;
  std::optional<BalancedBatchIterator> bal;
  if (balanced)
    bal.emplace(train, b, cfg.seed ^ kDataStreamSalt);
  else
    plain.emplace(train, b, cfg.seed ^ kDataStreamSalt);
  auto next_batch = [&]() { return balanced ? bal->next() : plain->next(); };

  struct BatchView {
    std::vector<std::size_t> idx;
    std::vector<MlpForwardCache> caches;
    GilState state;
    double mean_loss = 0.0;
  };
  auto forward_batch = [&](const std::vector<std::size_t>& idxs) {
    BatchView view;
    view.idx = idxs;
    Vector mean_zeta(model.feature_dim(), 0.0), mean_yhat(out_dim, 0.0);
    double acc_loss = 0.0;
    for (std::size_t i : idxs) {
      const Sample& smp = train.samples[i];
      view.caches.push_back(mlp_forward(model, smp.x_filled));
      axpy(mean_zeta, 1.0 / static_cast<double>(idxs.size()), view.caches.back().feature());
      axpy(mean_yhat, 1.0 / static_cast<double>(idxs.size()), view.caches.back().output());
      acc_loss += loss(loss_kind, view.caches.back().output(),
                       target_vector(smp.y, out_dim));
    }
    view.mean_loss = acc_loss / static_cast<double>(idxs.size());
    const Sample& first = train.samples[idxs.front()];
    view.state = GilState{first.x_filled, first.m, mean_zeta, mean_yhat};
    return view;
  };

  auto pick_action = [&](const GilState& s, const Vector& mask) -> Vector {
    switch (cfg.forced_action) {
      case ForcedAction::Ones: return Vector(d, 1.0);
      case ForcedAction::Mask: return mask;
      case ForcedAction::None: break;
    }
    if (mode == Variant::GilH) return mask;
    return behavioral(*ac, s, rl_rng);
  };

  BatchView cur = forward_batch(next_batch());
  std::vector<EvalPoint> evals;
  MlpModel best = model;
  BestTracker tracker;
  double loss_accum = 0.0;
  std::size_t loss_count = 0;

  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    const Vector a = pick_action(cur.state, train.samples[cur.idx.front()].m);
    // averaged gradient factors
    std::vector<Matrix> wg;
    std::vector<Vector> bg;
    for (const MlpLayer& layer : model.layers) {
      wg.emplace_back(layer.W.rows(), layer.W.cols());
      bg.emplace_back(layer.b.size(), 0.0);
    }
    const double scale = 1.0 / static_cast<double>(cur.idx.size());
    for (std::size_t k = 0; k < cur.idx.size(); ++k) {
      const Sample& smp = train.samples[cur.idx[k]];
      const MlpGradients g =
          mlp_backward(model, cur.caches[k], target_vector(smp.y, out_dim), loss_kind);
      for (std::size_t i = 0; i < model.layers.size(); ++i) {
        add_outer(wg[i], scale, g.delta[i], cur.caches[k].layer_input(i));
        axpy(bg[i], scale, g.delta[i]);
      }
    }
    // encoding update with the shared action: scale gradient columns by a
    if (!cfg.importance_after_precondition) {
      for (std::size_t r = 0; r < wg[0].rows(); ++r) {
        double* row = wg[0].row(r);
        for (std::size_t c = 0; c < d; ++c) row[c] *= a[c];
      }
      opt.step_dense(model, wg, bg);
    } else {
      const Vector dir = opt.w.front().update_direction(wg[0].data());
      MlpLayer& enc = model.layers.front();
      for (std::size_t r = 0; r < enc.W.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) enc.W(r, c) -= dir[r * d + c] * a[c];
      }
      opt.b.front().step(enc.b, bg[0]);
      for (std::size_t i = 1; i < model.layers.size(); ++i) {
        opt.w[i].step(model.layers[i].W, wg[i]);
        opt.b[i].step(model.layers[i].b, bg[i]);
      }
    }
    if (cfg.snapshot_hook) cfg.snapshot_hook(iter, model);

    // batch loss under updated weights -> reward
    BatchView updated = forward_batch(cur.idx);
    double reward = -updated.mean_loss;
    if (mode == Variant::GilD) {
      const std::size_t half = cur.idx.size() / 2;
      std::vector<Vector> pos, neg;
      for (std::size_t k = 0; k < cur.idx.size(); ++k)
        (k < half ? pos : neg).push_back(updated.caches[k].feature());
      reward += cfg.gil_d_coeff * gil_d_distance(pos, neg);
    }
    out.report.reward_trace.push_back(reward);
    loss_accum += updated.mean_loss;
    ++loss_count;
    if (!std::isfinite(updated.mean_loss)) {
      out.report.diverged = true;
      out.report.error = "training loss is not finite at iteration " + std::to_string(iter);
      break;
    }

    BatchView nxt = forward_batch(next_batch());
    if (rl) {
      Transition tr{cur.state, a, reward, nxt.state};
      try {
        rl_update(*ac, tr);
      } catch (const std::runtime_error& e) {
        out.report.diverged = true;
        out.report.error = e.what();
        break;
      }
    }
    cur = std::move(nxt);

    if (iter % cfg.eval_every == 0 || iter == cfg.max_iter) {
      EvalPoint pt = evaluate_mlp(model, eval);
      pt.iter = iter;
      pt.train_loss = loss_count ? loss_accum / static_cast<double>(loss_count) : 0.0;
      loss_accum = 0.0;
      loss_count = 0;
      evals.push_back(pt);
      tracker.consider(pt, model, best);
    }
  }

  EvalPoint final_pt = tracker.has_best ? evaluate_mlp(best, eval) : evaluate_mlp(model, eval);
  finish_report(out.report, evals, final_pt, t0);
  out.mlp = tracker.has_best ? std::move(best) : std::move(model);
  if (ac) out.ac = std::move(ac);
  return out;
}

// ---------------------------------------------------------------------------
// GIL / GIL-H / GIL-D on sequences: one sequence per iteration, one action per
// timestep, reward from the sequence-level loss shared by the sequence's
// transitions.
// ---------------------------------------------------------------------------
struct LstmOpt {
  ParamOptimizer wo, wi, wg, wf, uo, ui, ug, uf, bo, bi, bg, bf, wout, bout;

  LstmOpt(const LstmModel& m, const OptimizerConfig& cfg)
      : wo(cfg, m.Wo.size()),
        wi(cfg, m.Wi.size()),
        wg(cfg, m.Wg.size()),
        wf(cfg, m.Wf.size()),
        uo(cfg, m.Uo.size()),
        ui(cfg, m.Ui.size()),
        ug(cfg, m.Ug.size()),
        uf(cfg, m.Uf.size()),
        bo(cfg, m.bo.size()),
        bi(cfg, m.bi.size()),
        bg(cfg, m.bg.size()),
        bf(cfg, m.bf.size()),
        wout(cfg, m.Wout.size()),
        bout(cfg, m.bout.size()) {}

  // dense step on everything that is never importance-weighted
  void step_recurrent(LstmModel& m, const LstmGradients& g) {
    uo.step(m.Uo, g.dUo);
    ui.step(m.Ui, g.dUi);
    ug.step(m.Ug, g.dUg);
    uf.step(m.Uf, g.dUf);
    bo.step(m.bo, g.dbo);
    bi.step(m.bi, g.dbi);
    bg.step(m.bg, g.dbg);
    bf.step(m.bf, g.dbf);
    wout.step(m.Wout, g.dWout);
    bout.step(m.bout, g.dbout);
  }
};

std::vector<GilState> per_step_states(const SequenceSample& seq, const LstmForwardCache& cache) {
  std::vector<GilState> states;
  states.reserve(seq.horizon());
  for (std::size_t t = 0; t < seq.horizon(); ++t) {
    states.push_back(GilState{seq.x_filled[t], seq.m[t], cache.h[t], cache.yhat});
  }
  return states;
}

TrainOutput train_gil_lstm(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                           Variant mode) {
  const double t0 = now_seconds();
  if (cfg.importance_after_precondition)
    throw std::invalid_argument(
        "importance_after_precondition is not defined for per-timestep LSTM actions");
  const std::size_t d = train.d;
  TrainOutput out;
  out.is_lstm = true;
  out.report.seed = cfg.seed;
  out.report.train_missing_rate = missing_rate(train);

  LstmModel model = lstm_init(d, cfg.model.lstm_hidden, model_output_dim(train.num_classes),
                              model_output_act(train.num_classes), cfg.seed);
  LstmOpt opt(model, cfg.optimizer);
  const std::size_t out_dim = model.output_dim();
  const std::size_t e = model.hidden_dim();
  const LossKind loss_kind = LossKind::CrossEntropy;

  const bool rl = uses_rl(mode) && cfg.forced_action == ForcedAction::None;
  const std::size_t state_dim = d + d + e + out_dim;
  std::optional<ActorCritic> ac;
  if (uses_rl(mode))
    ac.emplace(make_actor_critic(state_dim, d, cfg.rl, cfg.seed ^ kRlInitSalt));
  Rng rl_rng(cfg.seed ^ kRlStreamSalt);
  std::optional<ReplayBuffer> replay;
  if (rl && cfg.rl.use_replay) replay.emplace(cfg.rl.replay_capacity);

  const bool balanced = cfg.balanced_batches || mode == Variant::GilD;
  SampleSource source(train, balanced, cfg.batch_size, cfg.seed ^ kDataStreamSalt);

  auto pick_action = [&](const GilState& s, const Vector& mask) -> Vector {
    switch (cfg.forced_action) {
      case ForcedAction::Ones: return Vector(d, 1.0);
      case ForcedAction::Mask: return mask;
      case ForcedAction::None: break;
    }
    if (mode == Variant::GilH) return mask;
    return behavioral(*ac, s, rl_rng);
  };

  std::size_t idx = source.next();
  double d_term = 0.0;
  if (mode == Variant::GilD) d_term = lstm_batch_d_term(model, train, source.batch);
  const SequenceSample* cur = &train.sequences[idx];
  Vector y_target = target_vector(cur->y, out_dim);
  LstmForwardCache cache = lstm_forward(model, cur->x_filled);
  std::vector<GilState> states = per_step_states(*cur, cache);

  std::vector<EvalPoint> evals;
  LstmModel best = model;
  BestTracker tracker;
  double loss_accum = 0.0;
  std::size_t loss_count = 0;

  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    const std::size_t T = cur->horizon();
    std::vector<Vector> actions(T);
    for (std::size_t t = 0; t < T; ++t) actions[t] = pick_action(states[t], cur->m[t]);

    const LstmGradients grads = lstm_backward(model, cache, y_target, loss_kind);
    // encoding update: sum_t delta(x_t ⊙ a_t)^T per gate
    for (Gate gate : {Gate::Output, Gate::Input, Gate::Cell, Gate::Forget}) {
      Matrix g(e, d);
      const std::vector<Vector>& deltas = grads.gate_deltas(gate);
      for (std::size_t t = 0; t < T; ++t)
        add_outer(g, 1.0, deltas[t], hadamard(cur->x_filled[t], actions[t]));
      ParamOptimizer& po = gate == Gate::Output  ? opt.wo
                           : gate == Gate::Input ? opt.wi
                           : gate == Gate::Cell  ? opt.wg
                                                 : opt.wf;
      po.step(model.input_weights(gate), g);
    }
    opt.step_recurrent(model, grads);

    // reward from the sequence-level loss under updated weights
    const LstmForwardCache updated = lstm_forward(model, cur->x_filled);
    const double err = loss(loss_kind, updated.yhat, y_target);
    double reward = -err;
    if (mode == Variant::GilD) reward += cfg.gil_d_coeff * d_term;
    out.report.reward_trace.push_back(reward);
    loss_accum += err;
    ++loss_count;
    if (!std::isfinite(err)) {
      out.report.diverged = true;
      out.report.error = "training loss is not finite at iteration " + std::to_string(iter);
      break;
    }

    const std::size_t idx2 = source.next();
    if (mode == Variant::GilD && source.fresh_batch)
      d_term = lstm_batch_d_term(model, train, source.batch);
    const SequenceSample* nxt = &train.sequences[idx2];
    LstmForwardCache cache2 = lstm_forward(model, nxt->x_filled);
    std::vector<GilState> next_states = per_step_states(*nxt, cache2);

    if (rl) {
      // successor states re-encoded under the updated weights
      const std::vector<GilState> updated_states = per_step_states(*cur, updated);
      try {
        for (std::size_t t = 0; t < T; ++t) {
          Transition tr{states[t], actions[t], reward,
                        t + 1 < T ? updated_states[t + 1] : next_states.front()};
          if (replay) {
            replay->push(std::move(tr));
            rl_update(*ac, replay->sample(cfg.rl.replay_minibatch, rl_rng));
          } else {
            rl_update(*ac, tr);
          }
        }
      } catch (const std::runtime_error& ex) {
        out.report.diverged = true;
        out.report.error = ex.what();
        break;
      }
    }

    cur = nxt;
    y_target = target_vector(cur->y, out_dim);
    cache = std::move(cache2);
    states = std::move(next_states);

    if (iter % cfg.eval_every == 0 || iter == cfg.max_iter) {
      EvalPoint pt = evaluate_lstm(model, eval);
      pt.iter = iter;
      pt.train_loss = loss_count ? loss_accum / static_cast<double>(loss_count) : 0.0;
      loss_accum = 0.0;
      loss_count = 0;
      evals.push_back(pt);
      tracker.consider(pt, model, best);
    }
  }

  EvalPoint final_pt = tracker.has_best ? evaluate_lstm(best, eval) : evaluate_lstm(model, eval);
  finish_report(out.report, evals, final_pt, t0);
  out.lstm = tracker.has_best ? std::move(best) : std::move(model);
  if (ac) out.ac = std::move(ac);
  return out;
}

// ---------------------------------------------------------------------------
// Ablation: a sigmoid network h(x) re-weights the inputs, trained end-to-end
// through x ⊙ h(x); no RL.
// ---------------------------------------------------------------------------
TrainOutput train_ablation_mlp(const Dataset& train, const Dataset& eval, const TrainConfig& cfg) {
  const double t0 = now_seconds();
  const std::size_t d = train.d;
  TrainOutput out;
  out.report.seed = cfg.seed;
  out.report.train_missing_rate = missing_rate(train);

  MlpModel model = build_mlp(cfg.model, d, train.num_classes, cfg.seed);
  MlpOpt opt(model, cfg.optimizer);
  MlpModel weighter = build_input_weighter(cfg, d);
  MlpOpt weighter_opt(weighter, cfg.optimizer);

  const std::size_t out_dim = model.output_dim();
  const LossKind loss_kind = LossKind::CrossEntropy;
  SampleSource source(train, cfg.balanced_batches, cfg.batch_size, cfg.seed ^ kDataStreamSalt);

  std::vector<EvalPoint> evals;
  MlpModel best = model;
  MlpModel best_weighter = weighter;
  BestTracker tracker;
  double loss_accum = 0.0;
  std::size_t loss_count = 0;

  auto eval_weighted = [&](const MlpModel& mdl, const MlpModel& wgt) {
    Vector scores;
    std::vector<Vector> prob_rows;
    std::vector<int> labels;
    const bool binary = mdl.output_dim() == 1;
    for (const Sample& smp : eval.samples) {
      Vector xw = cfg.ablation_freeze_identity
                      ? smp.x_filled
                      : hadamard(smp.x_filled, mlp_forward(wgt, smp.x_filled).output());
      const MlpForwardCache c = mlp_forward(mdl, xw);
      if (binary)
        scores.push_back(c.output()[0]);
      else
        prob_rows.push_back(c.output());
      labels.push_back(smp.y);
    }
    return evaluate_scores(scores, prob_rows, labels);
  };

  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    const Sample& cur = train.samples[source.next()];
    const Vector y_target = target_vector(cur.y, out_dim);

    MlpForwardCache wcache;
    Vector weighted_x;
    if (cfg.ablation_freeze_identity) {
      weighted_x = cur.x_filled;
    } else {
      wcache = mlp_forward(weighter, cur.x_filled);
      weighted_x = hadamard(cur.x_filled, wcache.output());
    }
    const MlpForwardCache cache = mlp_forward(model, weighted_x);
    const MlpGradients grads = mlp_backward(model, cache, y_target, loss_kind);
    loss_accum += loss(loss_kind, cache.output(), y_target);
    ++loss_count;

    if (!cfg.ablation_freeze_identity) {
      // joint step: gradient of the loss w.r.t. h(x) flows through the product
      const Vector dx = mlp_input_gradient(model, grads);
      const Vector dw = hadamard(dx, cur.x_filled);
      const MlpGradients wgrads = mlp_backward_from(weighter, wcache, dw);
      std::vector<Matrix> wwg;
      std::vector<Vector> wbg;
      for (std::size_t i = 0; i < weighter.layers.size(); ++i) {
        wwg.push_back(mlp_weight_gradient(wgrads, wcache, i));
        wbg.push_back(wgrads.delta[i]);
      }
      std::vector<Matrix> mg;
      std::vector<Vector> bgg;
      for (std::size_t i = 0; i < model.layers.size(); ++i) {
        mg.push_back(mlp_weight_gradient(grads, cache, i));
        bgg.push_back(grads.delta[i]);
      }
      opt.step_dense(model, mg, bgg);
      weighter_opt.step_dense(weighter, wwg, wbg);
    } else {
      std::vector<Matrix> mg;
      std::vector<Vector> bgg;
      for (std::size_t i = 0; i < model.layers.size(); ++i) {
        mg.push_back(mlp_weight_gradient(grads, cache, i));
        bgg.push_back(grads.delta[i]);
      }
      opt.step_dense(model, mg, bgg);
    }
    if (cfg.snapshot_hook) cfg.snapshot_hook(iter, model);

    if (iter % cfg.eval_every == 0 || iter == cfg.max_iter) {
      EvalPoint pt = eval_weighted(model, weighter);
      pt.iter = iter;
      pt.train_loss = loss_count ? loss_accum / static_cast<double>(loss_count) : 0.0;
      loss_accum = 0.0;
      loss_count = 0;
      evals.push_back(pt);
      if (!tracker.has_best || pt.accuracy > tracker.best_accuracy) best_weighter = weighter;
      tracker.consider(pt, model, best);
    }
  }

  EvalPoint final_pt =
      tracker.has_best ? eval_weighted(best, best_weighter) : eval_weighted(model, weighter);
  finish_report(out.report, evals, final_pt, t0);
  out.mlp = tracker.has_best ? std::move(best) : std::move(model);
  out.weighter = tracker.has_best ? std::move(best_weighter) : std::move(weighter);
  return out;
}

// ---------------------------------------------------------------------------
// Two-step baseline: impute, then ordinary minibatch training.
// ---------------------------------------------------------------------------
TrainOutput train_baseline_impl(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                                const Dataset* ground_truth_eval) {
  const double t0 = now_seconds();
  TrainOutput out;
  out.report.seed = cfg.seed;
  out.report.train_missing_rate = missing_rate(train);

  const Dataset imputed_train =
      impute(train, cfg.imputer, train, cfg.noise_std, cfg.seed ^ kImputeSalt);
  const Dataset imputed_eval =
      impute(eval, cfg.imputer, train, cfg.noise_std, (cfg.seed ^ kImputeSalt) + 1);
  if (ground_truth_eval)
    out.report.imputation_mse = imputation_mse(imputed_eval, *ground_truth_eval);

  const LossKind loss_kind = LossKind::CrossEntropy;
  std::vector<EvalPoint> evals;
  BestTracker tracker;
  double loss_accum = 0.0;
  std::size_t loss_count = 0;

  if (cfg.model.kind == ModelSpec::Kind::Mlp) {
    if (train.sequential())
      throw std::invalid_argument("baseline: MLP model spec on sequence data");
    MlpModel model = build_mlp(cfg.model, train.d, train.num_classes, cfg.seed);
    MlpOpt opt(model, cfg.optimizer);
    const std::size_t out_dim = model.output_dim();
    BatchIterator batches(imputed_train, cfg.batch_size, cfg.seed ^ kDataStreamSalt);
    MlpModel best = model;
    for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
      const std::vector<std::size_t> batch = batches.next();
      std::vector<Matrix> wg;
      std::vector<Vector> bg;
      for (const MlpLayer& layer : model.layers) {
        wg.emplace_back(layer.W.rows(), layer.W.cols());
        bg.emplace_back(layer.b.size(), 0.0);
      }
      const double scale = 1.0 / static_cast<double>(batch.size());
      double batch_loss = 0.0;
      for (std::size_t i : batch) {
        const Sample& smp = imputed_train.samples[i];
        const Vector y_target = target_vector(smp.y, out_dim);
        const MlpForwardCache cache = mlp_forward(model, smp.x_filled);
        batch_loss += loss(loss_kind, cache.output(), y_target) * scale;
        const MlpGradients grads = mlp_backward(model, cache, y_target, loss_kind);
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
          add_outer(wg[l], scale, grads.delta[l], cache.layer_input(l));
          axpy(bg[l], scale, grads.delta[l]);
        }
      }
      opt.step_dense(model, wg, bg);
      if (cfg.snapshot_hook) cfg.snapshot_hook(iter, model);
      loss_accum += batch_loss;
      ++loss_count;
      if (!std::isfinite(batch_loss)) {
        out.report.diverged = true;
        out.report.error = "training loss is not finite at iteration " + std::to_string(iter);
        break;
      }
      if (iter % cfg.eval_every == 0 || iter == cfg.max_iter) {
        EvalPoint pt = evaluate_mlp(model, imputed_eval);
        pt.iter = iter;
        pt.train_loss = loss_count ? loss_accum / static_cast<double>(loss_count) : 0.0;
        loss_accum = 0.0;
        loss_count = 0;
        evals.push_back(pt);
        tracker.consider(pt, model, best);
      }
    }
    EvalPoint final_pt =
        tracker.has_best ? evaluate_mlp(best, imputed_eval) : evaluate_mlp(model, imputed_eval);
    finish_report(out.report, evals, final_pt, t0);
    out.mlp = tracker.has_best ? std::move(best) : std::move(model);
    return out;
  }

  // LSTM baseline
  if (!train.sequential())
    throw std::invalid_argument("baseline: LSTM model spec on tabular data");
  out.is_lstm = true;
  LstmModel model = lstm_init(train.d, cfg.model.lstm_hidden, model_output_dim(train.num_classes),
                              model_output_act(train.num_classes), cfg.seed);
  LstmOpt opt(model, cfg.optimizer);
  const std::size_t out_dim = model.output_dim();
  const std::size_t e = model.hidden_dim();
  BatchIterator batches(imputed_train, cfg.batch_size, cfg.seed ^ kDataStreamSalt);
  LstmModel best = model;
  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    const std::vector<std::size_t> batch = batches.next();
    const double scale = 1.0 / static_cast<double>(batch.size());
    Matrix gWo(e, train.d), gWi(e, train.d), gWg(e, train.d), gWf(e, train.d);
    Matrix gUo(e, e), gUi(e, e), gUg(e, e), gUf(e, e);
    Vector gbo(e, 0.0), gbi(e, 0.0), gbg(e, 0.0), gbf(e, 0.0);
    Matrix gWout(out_dim, e);
    Vector gbout(out_dim, 0.0);
    double batch_loss = 0.0;
    for (std::size_t i : batch) {
      const SequenceSample& seq = imputed_train.sequences[i];
      const Vector y_target = target_vector(seq.y, out_dim);
      const LstmForwardCache cache = lstm_forward(model, seq.x_filled);
      batch_loss += loss(loss_kind, cache.yhat, y_target) * scale;
      const LstmGradients grads = lstm_backward(model, cache, y_target, loss_kind);
      axpy(gWo, scale, lstm_input_weight_gradient(grads, cache, Gate::Output));
      axpy(gWi, scale, lstm_input_weight_gradient(grads, cache, Gate::Input));
      axpy(gWg, scale, lstm_input_weight_gradient(grads, cache, Gate::Cell));
      axpy(gWf, scale, lstm_input_weight_gradient(grads, cache, Gate::Forget));
      axpy(gUo, scale, grads.dUo);
      axpy(gUi, scale, grads.dUi);
      axpy(gUg, scale, grads.dUg);
      axpy(gUf, scale, grads.dUf);
      axpy(gbo, scale, grads.dbo);
      axpy(gbi, scale, grads.dbi);
      axpy(gbg, scale, grads.dbg);
      axpy(gbf, scale, grads.dbf);
      axpy(gWout, scale, grads.dWout);
      axpy(gbout, scale, grads.dbout);
    }
    opt.wo.step(model.Wo, gWo);
    opt.wi.step(model.Wi, gWi);
    opt.wg.step(model.Wg, gWg);
    opt.wf.step(model.Wf, gWf);
    LstmGradients rest;
    rest.dUo = gUo;
    rest.dUi = gUi;
    rest.dUg = gUg;
    rest.dUf = gUf;
    rest.dbo = gbo;
    rest.dbi = gbi;
    rest.dbg = gbg;
    rest.dbf = gbf;
    rest.dWout = gWout;
    rest.dbout = gbout;
    opt.step_recurrent(model, rest);
    loss_accum += batch_loss;
    ++loss_count;
    if (!std::isfinite(batch_loss)) {
      out.report.diverged = true;
      out.report.error = "training loss is not finite at iteration " + std::to_string(iter);
      break;
    }
    if (iter % cfg.eval_every == 0 || iter == cfg.max_iter) {
      EvalPoint pt = evaluate_lstm(model, imputed_eval);
      pt.iter = iter;
      pt.train_loss = loss_count ? loss_accum / static_cast<double>(loss_count) : 0.0;
      loss_accum = 0.0;
      loss_count = 0;
      evals.push_back(pt);
      tracker.consider(pt, model, best);
    }
  }
  EvalPoint final_pt =
      tracker.has_best ? evaluate_lstm(best, imputed_eval) : evaluate_lstm(model, imputed_eval);
  finish_report(out.report, evals, final_pt, t0);
  out.lstm = tracker.has_best ? std::move(best) : std::move(model);
  return out;
}

void validate_gil_config(const Dataset& train, const TrainConfig& cfg, Variant mode) {
  if (train.size() == 0) throw std::invalid_argument("train: empty dataset");
  if (train.num_classes < 2) throw std::invalid_argument("train: needs at least two classes");
  if (mode == Variant::GilD) {
    if (train.num_classes != 2)
      throw std::invalid_argument("gil_d requires binary labels");
    if (cfg.batch_size % 4 != 0)
      throw std::invalid_argument("gil_d requires a batch size divisible by 4");
    if (cfg.gil_d_coeff < 0.0) throw std::invalid_argument("gil_d coefficient must be >= 0");
  }
  const bool lstm = cfg.model.kind == ModelSpec::Kind::Lstm;
  if (lstm != train.sequential())
    throw std::invalid_argument("model kind does not match dataset kind");
}

TrainOutput train_gil_like(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                           Variant mode) {
  validate_gil_config(train, cfg, mode);
  if (cfg.model.kind == ModelSpec::Kind::Lstm) return train_gil_lstm(train, eval, cfg, mode);
  if (cfg.per_batch_action && mode != Variant::GilH)
    return train_gil_mlp_batched(train, eval, cfg, mode);
  return train_gil_mlp(train, eval, cfg, mode);
}

}  // namespace

TrainOutput train_gil(const Dataset& train, const Dataset& eval, const TrainConfig& cfg) {
  return train_gil_like(train, eval, cfg, Variant::Gil);
}

TrainOutput train_gil_h(const Dataset& train, const Dataset& eval, const TrainConfig& cfg) {
  return train_gil_like(train, eval, cfg, Variant::GilH);
}

TrainOutput train_gil_d(const Dataset& train, const Dataset& eval, const TrainConfig& cfg) {
  return train_gil_like(train, eval, cfg, Variant::GilD);
}

TrainOutput train_ablation_input(const Dataset& train, const Dataset& eval,
                                 const TrainConfig& cfg) {
  if (cfg.model.kind == ModelSpec::Kind::Lstm)
    throw std::invalid_argument("ablation_input is defined for MLP models only");
  if (train.sequential()) throw std::invalid_argument("ablation_input: tabular data only");
  return train_ablation_mlp(train, eval, cfg);
}

TrainOutput train_baseline(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                           const Dataset* ground_truth_eval) {
  return train_baseline_impl(train, eval, cfg, ground_truth_eval);
}

TrainOutput train_variant(const Dataset& train, const Dataset& eval, const TrainConfig& cfg,
                          const Dataset* ground_truth_eval) {
  switch (cfg.variant) {
    case Variant::Gil: return train_gil(train, eval, cfg);
    case Variant::GilH: return train_gil_h(train, eval, cfg);
    case Variant::GilD: return train_gil_d(train, eval, cfg);
    case Variant::AblationInput: return train_ablation_input(train, eval, cfg);
    case Variant::Baseline: return train_baseline(train, eval, cfg, ground_truth_eval);
  }
  throw std::logic_error("bad variant");
}

}  // namespace gil
