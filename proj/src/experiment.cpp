#include "gil/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gil/metrics.hpp"
#include "gil/model_io.hpp"

namespace gil {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, const std::string& origin, std::size_t line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(origin, line, "expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, const std::string& origin, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(origin, line, "expected a non-negative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& origin, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(origin, line, "expected true/false, got '" + v + "'");
}

std::vector<std::size_t> to_size_list(const std::string& v, const std::string& origin,
                                      std::size_t line) {
  std::vector<std::size_t> out;
  for (const std::string& item : split_list(v))
    out.push_back(static_cast<std::size_t>(to_u64(item, origin, line)));
  if (out.empty()) fail(origin, line, "expected a comma-separated list");
  return out;
}

// number formatting for CSV cells: stable, full precision not required
std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

ExperimentConfig parse_experiment_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  cfg.raw_text = text;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  enum class Section { None, Dataset, Mask, Output, Run };
  Section section = Section::None;
  RunSpec* run = nullptr;
  bool have_mask = false;
  MaskSpec mask;

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name == "dataset") {
        section = Section::Dataset;
      } else if (name == "mask") {
        section = Section::Mask;
        have_mask = true;
      } else if (name == "output") {
        section = Section::Output;
      } else if (name == "run") {
        section = Section::Run;
        cfg.runs.emplace_back();
        run = &cfg.runs.back();
      } else {
        fail(origin, line_no, "unknown section [" + name + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "empty key");

    switch (section) {
      case Section::None:
        fail(origin, line_no, "key outside of any [section]");
      case Section::Dataset: {
        DatasetSpec& d = cfg.dataset;
        if (key == "kind") {
          if (value == "csv")
            d.kind = DatasetSpec::Kind::Csv;
          else if (value == "mnist")
            d.kind = DatasetSpec::Kind::Mnist;
          else if (value == "synthetic_mnar")
            d.kind = DatasetSpec::Kind::SyntheticMnar;
          else
            fail(origin, line_no, "unknown dataset kind '" + value + "'");
        } else if (key == "path") {
          d.path = value;
        } else if (key == "label_column") {
          d.label_column = value;
        } else if (key == "standardize") {
          d.standardize = to_bool(value, origin, line_no);
        } else if (key == "images") {
          d.images = value;
        } else if (key == "labels") {
          d.labels = value;
        } else if (key == "n") {
          d.synthetic.n = static_cast<std::size_t>(to_u64(value, origin, line_no));
        } else if (key == "d") {
          d.synthetic.d = static_cast<std::size_t>(to_u64(value, origin, line_no));
        } else if (key == "mask_signal") {
          d.synthetic.mask_signal = to_double(value, origin, line_no);
        } else if (key == "value_signal") {
          d.synthetic.value_signal = to_double(value, origin, line_no);
        } else if (key == "base_missing_rate") {
          d.synthetic.base_missing_rate = to_double(value, origin, line_no);
        } else if (key == "seed") {
          d.synthetic.seed = to_u64(value, origin, line_no);
        } else if (key == "limit") {
          d.limit = static_cast<std::size_t>(to_u64(value, origin, line_no));
        } else if (key == "test_fraction") {
          d.test_fraction = to_double(value, origin, line_no);
        } else if (key == "split_seed") {
          d.split_seed = to_u64(value, origin, line_no);
        } else {
          fail(origin, line_no, "unknown dataset key '" + key + "'");
        }
        break;
      }
      case Section::Mask: {
        if (key == "mechanism") {
          try {
            mask.mechanism = mask_mechanism_from_string(value);
          } catch (const std::exception& e) {
            fail(origin, line_no, e.what());
          }
        } else if (key == "rate") {
          mask.rate = to_double(value, origin, line_no);
        } else if (key == "seed") {
          mask.seed = to_u64(value, origin, line_no);
        } else if (key == "observable_rows") {
          mask.observable_rows = static_cast<std::size_t>(to_u64(value, origin, line_no));
        } else if (key == "steepness") {
          mask.steepness = to_double(value, origin, line_no);
        } else if (key == "quantile") {
          mask.quantile = to_double(value, origin, line_no);
        } else {
          fail(origin, line_no, "unknown mask key '" + key + "'");
        }
        break;
      }
      case Section::Output: {
        if (key == "dir")
          cfg.out_dir = value;
        else
          fail(origin, line_no, "unknown output key '" + key + "'");
        break;
      }
      case Section::Run: {
        TrainConfig& t = run->base;
        try {
          if (key == "name") {
            run->name = value;
          } else if (key == "variant") {
            t.variant = variant_from_string(value);
          } else if (key == "imputer") {
            t.imputer = imputer_from_string(value);
          } else if (key == "noise_std") {
            t.noise_std = to_double(value, origin, line_no);
          } else if (key == "seeds") {
            run->seeds.clear();
            for (const std::string& s : split_list(value))
              run->seeds.push_back(to_u64(s, origin, line_no));
            if (run->seeds.empty()) fail(origin, line_no, "empty seed list");
          } else if (key == "model") {
            if (value == "mlp")
              t.model.kind = ModelSpec::Kind::Mlp;
            else if (value == "lstm")
              t.model.kind = ModelSpec::Kind::Lstm;
            else
              fail(origin, line_no, "unknown model kind '" + value + "'");
          } else if (key == "hidden") {
            t.model.hidden = to_size_list(value, origin, line_no);
          } else if (key == "hidden_activation") {
            t.model.hidden_act = activation_from_string(value);
          } else if (key == "lstm_hidden") {
            t.model.lstm_hidden = static_cast<std::size_t>(to_u64(value, origin, line_no));
          } else if (key == "max_iter") {
            t.max_iter = static_cast<std::size_t>(to_u64(value, origin, line_no));
          } else if (key == "batch_size") {
            t.batch_size = static_cast<std::size_t>(to_u64(value, origin, line_no));
          } else if (key == "optimizer") {
            t.optimizer.kind = optimizer_from_string(value);
          } else if (key == "learning_rate") {
            t.optimizer.learning_rate = to_double(value, origin, line_no);
          } else if (key == "decay_steps") {
            t.optimizer.decay_steps = static_cast<std::size_t>(to_u64(value, origin, line_no));
          } else if (key == "decay_rate") {
            t.optimizer.decay_rate = to_double(value, origin, line_no);
          } else if (key == "eval_every") {
            t.eval_every = static_cast<std::size_t>(to_u64(value, origin, line_no));
          } else if (key == "placeholder") {
            t.placeholder = to_double(value, origin, line_no);
          } else if (key == "balanced_batches") {
            t.balanced_batches = to_bool(value, origin, line_no);
          } else if (key == "per_batch_action") {
            t.per_batch_action = to_bool(value, origin, line_no);
          } else if (key == "importance_after_precondition") {
            t.importance_after_precondition = to_bool(value, origin, line_no);
          } else if (key == "gil_d_coeff") {
            t.gil_d_coeff = to_double(value, origin, line_no);
          } else if (key == "actor_lr") {
            t.rl.actor_lr = to_double(value, origin, line_no);
          } else if (key == "critic_lr") {
            t.rl.critic_lr = to_double(value, origin, line_no);
          } else if (key == "gamma") {
            t.rl.gamma = to_double(value, origin, line_no);
          } else if (key == "p_actor") {
            t.rl.p_actor = to_double(value, origin, line_no);
          } else if (key == "p_mask") {
            t.rl.p_mask = to_double(value, origin, line_no);
          } else if (key == "p_random") {
            t.rl.p_random = to_double(value, origin, line_no);
          } else if (key == "exploration_noise") {
            t.rl.exploration_noise = to_double(value, origin, line_no);
          } else if (key == "actor_hidden") {
            t.rl.actor_hidden = to_size_list(value, origin, line_no);
          } else if (key == "critic_hidden") {
            t.rl.critic_hidden = to_size_list(value, origin, line_no);
          } else if (key == "rl_optimizer") {
            t.rl.optimizer = optimizer_from_string(value);
          } else if (key == "use_target_networks") {
            t.rl.use_target_networks = to_bool(value, origin, line_no);
          } else if (key == "tau") {
            t.rl.tau = to_double(value, origin, line_no);
          } else if (key == "use_replay") {
            t.rl.use_replay = to_bool(value, origin, line_no);
          } else if (key == "replay_capacity") {
            t.rl.replay_capacity = static_cast<std::size_t>(to_u64(value, origin, line_no));
          } else if (key == "replay_minibatch") {
            t.rl.replay_minibatch = static_cast<std::size_t>(to_u64(value, origin, line_no));
          } else if (key == "save_checkpoint") {
            run->save_checkpoint = to_bool(value, origin, line_no);
          } else {
            fail(origin, line_no, "unknown run key '" + key + "'");
          }
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          fail(origin, line_no, e.what());
        }
        break;
      }
    }
  }

  if (have_mask) cfg.mask = mask;
  if (cfg.runs.empty()) throw ConfigError(origin + ": no [run] section");
  for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
    if (cfg.runs[i].name.empty())
      cfg.runs[i].name = std::string(to_string(cfg.runs[i].base.variant)) + "_" +
                         std::to_string(i);
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_text(ss.str(), path);
}

ExperimentData prepare_data(const ExperimentConfig& cfg) {
  Dataset full;
  std::optional<Dataset> truth;
  switch (cfg.dataset.kind) {
    case DatasetSpec::Kind::Csv: {
      CsvOptions opts;
      opts.label_column = cfg.dataset.label_column;
      opts.standardize = cfg.dataset.standardize;
      full = load_csv(cfg.dataset.path, opts);
      break;
    }
    case DatasetSpec::Kind::Mnist:
      full = load_mnist_idx(cfg.dataset.images, cfg.dataset.labels);
      break;
    case DatasetSpec::Kind::SyntheticMnar: {
      SyntheticMnarData data = make_synthetic_mnar(cfg.dataset.synthetic);
      full = std::move(data.masked);
      truth = std::move(data.truth);
      break;
    }
  }
  if (cfg.dataset.limit > 0 && cfg.dataset.limit < full.size()) {
    full.samples.resize(std::min(cfg.dataset.limit, full.samples.size()));
    full.sequences.resize(std::min(cfg.dataset.limit, full.sequences.size()));
    recompute_column_means(full);
    if (truth) {
      truth->samples.resize(full.samples.size());
      truth->sequences.resize(full.sequences.size());
      recompute_column_means(*truth);
    }
  }
  if (cfg.mask) {
    if (!truth) truth = full;  // pre-mask values are the ground truth
    full = apply_mask(full, *cfg.mask);
  }

  ExperimentData data;
  auto [train, eval] = split(full, cfg.dataset.test_fraction, cfg.dataset.split_seed);
  data.train = std::move(train);
  data.eval = std::move(eval);
  if (truth) {
    // same seed, same size: the shuffle pairs up with the masked split
    auto [ttrain, teval] = split(*truth, cfg.dataset.test_fraction, cfg.dataset.split_seed);
    data.truth_train = std::move(ttrain);
    data.truth_eval = std::move(teval);
  }
  return data;
}

namespace {

struct Job {
  const RunSpec* spec;
  std::uint64_t seed;
};

RunResult execute_job(const Job& job, const ExperimentData& data, const std::string& out_dir,
                      bool save_checkpoint) {
  RunResult res;
  res.name = job.spec->name;
  res.variant = job.spec->base.variant;
  res.imputer = job.spec->base.imputer;
  res.seed = job.seed;
  TrainConfig cfg = job.spec->base;
  cfg.seed = job.seed;
  try {
    const Dataset* train = &data.train;
    const Dataset* eval = &data.eval;
    Dataset train_refilled, eval_refilled;
    if (cfg.placeholder != data.train.placeholder) {
      train_refilled = data.train;
      eval_refilled = data.eval;
      refill_placeholder(train_refilled, cfg.placeholder);
      refill_placeholder(eval_refilled, cfg.placeholder);
      train = &train_refilled;
      eval = &eval_refilled;
    }
    const Dataset* truth_eval =
        data.truth_eval.has_value() ? &data.truth_eval.value() : nullptr;
    TrainOutput out = train_variant(*train, *eval, cfg, truth_eval);
    res.report = std::move(out.report);
    res.ok = !res.report.diverged;
    res.error = res.report.error;
    if (save_checkpoint && res.ok) {
      const std::string dir = out_dir + "/checkpoints";
      std::filesystem::create_directories(dir);
      const std::string path = dir + "/" + res.name + "_seed" + std::to_string(job.seed) + ".ckpt";
      if (out.is_lstm)
        save_lstm(out.lstm, path);
      else
        save_mlp(out.mlp, path);
    }
  } catch (const std::exception& e) {
    res.ok = false;
    res.error = e.what();
  }
  return res;
}

std::size_t worker_count(std::size_t jobs) {
  if (const char* env = std::getenv("GIL_THREADS")) {
    const long n = std::atol(env);
    if (n > 0) return std::min<std::size_t>(static_cast<std::size_t>(n), jobs);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::min<std::size_t>(hw > 0 ? hw : 1, jobs);
}

std::string metrics_csv(const std::vector<RunResult>& results) {
  std::string out = "run,variant,imputer,seed,iter,train_loss,accuracy,auc,ap\n";
  for (const RunResult& r : results) {
    const bool baseline = r.variant == Variant::Baseline;
    for (const EvalPoint& pt : r.report.evals) {
      out += r.name + "," + to_string(r.variant) + "," +
             (baseline ? to_string(r.imputer) : "") + "," + std::to_string(r.seed) + "," +
             std::to_string(pt.iter) + "," + fmt(pt.train_loss) + "," + fmt(pt.accuracy) + "," +
             fmt(pt.auc) + "," + fmt(pt.ap) + "\n";
    }
  }
  return out;
}

std::string summary_csv(const ExperimentConfig& cfg, const std::vector<RunResult>& results) {
  std::string out =
      "run,variant,imputer,seed,missing_rate,accuracy,auc,ap,imputation_mse,wall_clock_sec,"
      "status\n";
  for (const RunResult& r : results) {
    const bool baseline = r.variant == Variant::Baseline;
    out += r.name + "," + to_string(r.variant) + "," + (baseline ? to_string(r.imputer) : "") +
           "," + std::to_string(r.seed) + "," + fmt(r.report.train_missing_rate) + "," +
           fmt(r.report.final_accuracy) + "," + fmt(r.report.final_auc) + "," +
           fmt(r.report.final_ap) + "," +
           (r.report.imputation_mse ? fmt(*r.report.imputation_mse) : "") + "," +
           fmt(r.report.wall_clock_sec) + "," + (r.ok ? "ok" : "failed: " + r.error) + "\n";
  }
  // aggregate rows per run name, over successful seeds
  for (const RunSpec& spec : cfg.runs) {
    std::vector<const RunResult*> rows;
    for (const RunResult& r : results) {
      if (r.name == spec.name && r.ok) rows.push_back(&r);
    }
    if (rows.empty()) continue;
    auto agg = [&](auto getter) {
      double mean = 0.0;
      std::size_t n = 0;
      for (const RunResult* r : rows) {
        const double v = getter(*r);
        if (!std::isnan(v)) {
          mean += v;
          ++n;
        }
      }
      if (n == 0) return std::pair<double, double>{std::nan(""), std::nan("")};
      mean /= static_cast<double>(n);
      if (n < 2) return std::pair<double, double>{mean, std::nan("")};
      double var = 0.0;
      for (const RunResult* r : rows) {
        const double v = getter(*r);
        if (!std::isnan(v)) var += (v - mean) * (v - mean);
      }
      var /= static_cast<double>(n - 1);
      return std::pair<double, double>{mean, std::sqrt(var)};
    };
    const auto acc = agg([](const RunResult& r) { return r.report.final_accuracy; });
    const auto auc = agg([](const RunResult& r) { return r.report.final_auc; });
    const auto ap = agg([](const RunResult& r) { return r.report.final_ap; });
    const auto mse = agg([](const RunResult& r) {
      return r.report.imputation_mse ? *r.report.imputation_mse
                                     : std::numeric_limits<double>::quiet_NaN();
    });
    const auto mr = agg([](const RunResult& r) { return r.report.train_missing_rate; });
    const auto wc = agg([](const RunResult& r) { return r.report.wall_clock_sec; });
    const bool baseline = spec.base.variant == Variant::Baseline;
    const std::string imp = baseline ? to_string(spec.base.imputer) : "";
    out += spec.name + "," + to_string(spec.base.variant) + "," + imp + ",mean," + fmt(mr.first) +
           "," + fmt(acc.first) + "," + fmt(auc.first) + "," + fmt(ap.first) + "," +
           fmt(mse.first) + "," + fmt(wc.first) + ",ok\n";
    out += spec.name + "," + to_string(spec.base.variant) + "," + imp + ",std," + fmt(mr.second) +
           "," + fmt(acc.second) + "," + fmt(auc.second) + "," + fmt(ap.second) + "," +
           fmt(mse.second) + "," + fmt(wc.second) + ",ok\n";
  }
  return out;
}

std::string report_json(const ExperimentConfig& cfg, const ExperimentData& data,
                        const std::vector<RunResult>& results) {
  nlohmann::json j;
  j["schema"] = 1;
  j["tool_version"] = kToolVersion;
  j["config_echo"] = cfg.raw_text;
  j["dataset"] = {
      {"train_size", data.train.size()},         {"eval_size", data.eval.size()},
      {"d", data.train.d},                       {"num_classes", data.train.num_classes},
      {"train_missing_rate", missing_rate(data.train)},
      {"eval_missing_rate", missing_rate(data.eval)},
      {"has_ground_truth", data.truth_eval.has_value()},
  };
  nlohmann::json runs = nlohmann::json::array();
  for (const RunResult& r : results) {
    nlohmann::json run = {
        {"name", r.name},
        {"variant", to_string(r.variant)},
        {"seed", r.seed},
        {"status", r.ok ? "ok" : "failed"},
        {"accuracy", r.report.final_accuracy},
        {"wall_clock_sec", r.report.wall_clock_sec},
        {"missing_rate", r.report.train_missing_rate},
    };
    if (r.variant == Variant::Baseline) run["imputer"] = to_string(r.imputer);
    if (!std::isnan(r.report.final_auc)) run["auc"] = r.report.final_auc;
    if (!std::isnan(r.report.final_ap)) run["ap"] = r.report.final_ap;
    if (r.report.imputation_mse) run["imputation_mse"] = *r.report.imputation_mse;
    if (!r.ok) run["error"] = r.error;
    runs.push_back(std::move(run));
  }
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  const ExperimentData data = prepare_data(cfg);

  std::vector<Job> jobs;
  for (const RunSpec& spec : cfg.runs) {
    for (std::uint64_t seed : spec.seeds) jobs.push_back(Job{&spec, seed});
  }
  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const std::size_t workers = worker_count(jobs.size());
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      results[i] = execute_job(jobs[i], data, cfg.out_dir, jobs[i].spec->save_checkpoint);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  std::filesystem::create_directories(cfg.out_dir);
  write_atomic(cfg.out_dir + "/metrics.csv", metrics_csv(results));
  write_atomic(cfg.out_dir + "/summary.csv", summary_csv(cfg, results));
  write_atomic(cfg.out_dir + "/report.json", report_json(cfg, data, results));

  int failed = 0;
  for (const RunResult& r : results) {
    if (!r.ok) {
      ++failed;
      std::cerr << "run " << r.name << " seed " << r.seed << " failed: " << r.error << "\n";
    }
  }
  return failed == 0 ? 0 : 1;
}

int correlate(const std::string& results_dir) {
  const std::string path = results_dir + "/summary.csv";
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  const std::vector<std::string> header = split_list(line);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ConfigError(path + ": missing column '" + name + "'");
  };
  const std::size_t c_variant = col("variant"), c_seed = col("seed"), c_acc = col("accuracy"),
                    c_mse = col("imputation_mse"), c_status = col("status");
  Vector mses, accs;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_list(line);
    if (cells.size() <= std::max({c_variant, c_seed, c_acc, c_mse, c_status})) continue;
    if (cells[c_variant] != "baseline") continue;
    if (cells[c_seed] == "mean" || cells[c_seed] == "std") continue;
    if (cells[c_status] != "ok") continue;
    if (cells[c_mse].empty() || cells[c_acc].empty()) continue;
    mses.push_back(std::stod(cells[c_mse]));
    accs.push_back(std::stod(cells[c_acc]));
  }
  if (mses.size() < 3)
    throw ConfigError("correlate: needs at least 3 baseline runs with imputation_mse, found " +
                      std::to_string(mses.size()));
  const PearsonResult res = pearson(mses, accs);
  std::string out = "n,pearson_r,p_value,low_n\n";
  out += std::to_string(mses.size()) + "," + fmt(res.r) + "," + fmt(res.p_value) + "," +
         (res.low_n ? "true" : "false") + "\n";
  write_atomic(results_dir + "/correlation.csv", out);
  std::cout << "pearson r = " << fmt(res.r) << " (p = " << fmt(res.p_value) << ", n = "
            << mses.size() << ")\n";
  return 0;
}

}  // namespace gil
