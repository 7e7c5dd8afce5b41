#include "rlsurv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace rlsurv {

std::string run_label(const RunSpec& run) {
  return run.device + "/" + run.algorithm +
         "/test=" + format_double(run.test_fraction) +
         "/seed=" + std::to_string(run.seed);
}

std::vector<RunSpec> enumerate_runs(const ExperimentConfig& cfg) {
  if (cfg.devices.empty()) throw std::invalid_argument("no devices configured");
  if (cfg.algorithms.empty()) {
    throw std::invalid_argument("no algorithms configured");
  }
  if (cfg.test_fractions.empty()) {
    throw std::invalid_argument("no test fractions configured");
  }
  if (cfg.seeds.empty()) throw std::invalid_argument("no seeds configured");
  for (double f : cfg.test_fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw std::invalid_argument("test fractions must lie strictly in (0,1)");
    }
  }
  for (const std::string& algo : cfg.algorithms) {
    if (algo != "ddqn" && algo != "dqn" && algo != "ann") {
      throw std::invalid_argument("unknown algorithm '" + algo +
                                  "': expected ddqn, dqn, or ann");
    }
  }
  std::vector<RunSpec> runs;
  for (const std::string& device : cfg.devices) {
    for (const std::string& algo : cfg.algorithms) {
      for (double fraction : cfg.test_fractions) {
        for (std::uint64_t seed : cfg.seeds) {
          runs.push_back(RunSpec{device, algo, fraction, seed});
        }
      }
    }
  }
  return runs;
}

Dataset device_data(const std::string& device) {
  const auto names = device_preset_names();
  if (std::find(names.begin(), names.end(), device) != names.end()) {
    return generate(device_preset(device));
  }
  return load_csv(device);
}

namespace {

struct StageResult {
  std::function<std::vector<int>(const Eigen::Ref<const Matrix>&)> predictor;
  double train_seconds = 0.0;
  double val_f1 = -1.0;
};

// The whole training stage sees only the train and validation splits; the
// returned predictor is all that crosses into evaluation.
StageResult train_stage(const ExperimentConfig& cfg, const RunSpec& run,
                        const Dataset& train_set, const Dataset& val_set) {
  StageResult stage;
  if (run.algorithm == "ann") {
    AnnConfig ann_cfg = cfg.ann;
    ann_cfg.seed = run.seed;
    AnnResult res = train_ann(ann_cfg, train_set, val_set);
    stage.train_seconds = res.train_seconds;
    stage.val_f1 = res.best_val_f1;
    stage.predictor = [net = std::move(res.net)](
                          const Eigen::Ref<const Matrix>& states) {
      return predict_ann(net, states);
    };
    return stage;
  }

  AgentConfig agent_cfg = cfg.agent;
  agent_cfg.algorithm =
      run.algorithm == "dqn" ? Algorithm::dqn : Algorithm::ddqn;
  agent_cfg.seed = run.seed;
  EnvConfig env_cfg = cfg.env;
  // Environment stream depends on the run seed but not the algorithm, so
  // paired dqn/ddqn runs face identical episode shuffles.
  env_cfg.seed = mix_seed(run.seed, hash_name("env"));
  TrainResult res = train(agent_cfg, env_cfg, train_set, val_set);
  stage.train_seconds = res.train_seconds;
  stage.val_f1 = res.best_val_f1;
  stage.predictor = [agent = std::move(res.agent)](
                        const Eigen::Ref<const Matrix>& states) {
    return predict(agent, states);
  };
  return stage;
}

}  // namespace

EvalReport run_single(const ExperimentConfig& cfg, const RunSpec& run,
                      const Dataset& data) {
  if (run.algorithm != "ddqn" && run.algorithm != "dqn" &&
      run.algorithm != "ann") {
    throw std::invalid_argument("unknown algorithm '" + run.algorithm + "'");
  }
  // The split and the scaler are functions of (device, fraction, seed) only:
  // every algorithm at this cell trains and tests on the same rows.
  const std::uint64_t split_seed = mix_seed(run.seed, hash_name(run.device));
  const SplitResult parts = split(data, run.test_fraction, cfg.val_fraction,
                                  split_seed);
  const Scaler scaler = fit_scaler(parts.train, cfg.scaler);
  const Dataset train_scaled = apply_scaler(scaler, parts.train);
  const Dataset val_scaled = apply_scaler(scaler, parts.val);

  const StageResult stage = train_stage(cfg, run, train_scaled, val_scaled);

  const Dataset test_scaled = apply_scaler(scaler, parts.test);
  const std::vector<int> preds = stage.predictor(test_scaled.features);
  EvalReport report =
      make_report(run.algorithm, run.device, run.test_fraction, run.seed,
                  confusion(preds, test_scaled.labels),
                  cfg.zero_timing ? 0.0 : stage.train_seconds);
  report.val_f1 = stage.val_f1;
  return report;
}

EvalReport run_single(const ExperimentConfig& cfg, const RunSpec& run) {
  return run_single(cfg, run, device_data(run.device));
}

std::vector<EvalReport> run_comparison(const ExperimentConfig& cfg) {
  const std::vector<RunSpec> runs = enumerate_runs(cfg);

  // Load every device once, up front, so workers share immutable data.
  std::unordered_map<std::string, Dataset> data;
  for (const RunSpec& run : runs) {
    if (!data.count(run.device)) data.emplace(run.device, device_data(run.device));
  }

  std::vector<EvalReport> reports(runs.size());
  std::vector<std::exception_ptr> failures(runs.size());
  const int jobs = std::max(
      1, std::min<int>(cfg.jobs, static_cast<int>(runs.size())));

  if (jobs == 1) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      try {
        reports[i] = run_single(cfg, runs[i], data.at(runs[i].device));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next++; i < runs.size(); i = next++) {
        try {
          reports[i] = run_single(cfg, runs[i], data.at(runs[i].device));
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error(run_label(runs[i]) + ": " + e.what());
    }
  }
  return reports;
}

}  // namespace rlsurv
