#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlsurv/checkpoint.hpp"
#include "rlsurv/errors.hpp"
#include "rlsurv/experiment.hpp"
#include "rlsurv/report.hpp"

using namespace rlsurv;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string preset_list() {
  std::string out;
  for (const std::string& name : device_preset_names()) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("RLSURV_SEED");
  if (!raw) return std::nullopt;
  const std::string text(raw);
  std::uint64_t value = 0;
  const auto [ptr, err] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (err != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("RLSURV_SEED must be a non-negative integer, got '" +
                     text + "'");
  }
  return value;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

double as_real(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_double(v.get<std::string>());
  throw UsageError("config field '" + key + "' must be a number");
}

long as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw UsageError("config field '" + key + "' must be an integer");
  }
  return v.get<long>();
}

std::string as_str(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw UsageError("config field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<int> as_int_list(const json& v, const std::string& key) {
  if (!v.is_array()) {
    throw UsageError("config field '" + key + "' must be an array");
  }
  std::vector<int> out;
  for (const json& e : v) out.push_back(static_cast<int>(as_int(e, key)));
  return out;
}

// Partial override: only the keys present in the document are applied, and
// unknown keys are errors rather than silently ignored typos.
void apply_agent_json(const json& doc, AgentConfig& cfg) {
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "algorithm") cfg.algorithm = parse_algorithm(as_str(v, key));
      else if (key == "gamma") cfg.gamma = as_real(v, key);
      else if (key == "learning_rate") cfg.learning_rate = as_real(v, key);
      else if (key == "batch_size") cfg.batch_size = static_cast<int>(as_int(v, key));
      else if (key == "target_sync_period") cfg.target_sync_period = as_int(v, key);
      else if (key == "total_steps") cfg.total_steps = as_int(v, key);
      else if (key == "epsilon_start") cfg.epsilon_start = as_real(v, key);
      else if (key == "epsilon_end") cfg.epsilon_end = as_real(v, key);
      else if (key == "epsilon_decay_steps") cfg.epsilon_decay_steps = as_int(v, key);
      else if (key == "epsilon_schedule") cfg.epsilon_schedule = parse_schedule(as_str(v, key));
      else if (key == "loss") cfg.loss = parse_loss(as_str(v, key));
      else if (key == "optimizer") cfg.optimizer = parse_optimizer(as_str(v, key));
      else if (key == "layer_sizes") cfg.layer_sizes = as_int_list(v, key);
      else if (key == "replay_capacity") cfg.replay_capacity = static_cast<std::size_t>(as_int(v, key));
      else if (key == "validation_period") cfg.validation_period = as_int(v, key);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(v, key));
      else throw UsageError("unknown agent config field '" + key + "'");
    } catch (const SchemaError& e) {
      throw UsageError(std::string("agent config: ") + e.what());
    }
  }
}

void apply_ann_json(const json& doc, AnnConfig& cfg) {
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "layer_sizes") cfg.layer_sizes = as_int_list(v, key);
      else if (key == "learning_rate") cfg.learning_rate = as_real(v, key);
      else if (key == "batch_size") cfg.batch_size = static_cast<int>(as_int(v, key));
      else if (key == "epochs") cfg.epochs = static_cast<int>(as_int(v, key));
      else if (key == "class_weighting") cfg.class_weighting = parse_weighting(as_str(v, key));
      else if (key == "optimizer") cfg.optimizer = parse_optimizer(as_str(v, key));
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(v, key));
      else throw UsageError("unknown ann config field '" + key + "'");
    } catch (const SchemaError& e) {
      throw UsageError(std::string("ann config: ") + e.what());
    }
  }
}

void apply_env_json(const json& doc, EnvConfig& cfg) {
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "reward_scheme") cfg.reward_scheme = parse_reward_scheme(as_str(v, key));
      else if (key == "minority_weight") cfg.minority_weight = as_real(v, key);
      else if (key == "shuffle_each_episode") {
        if (!v.is_boolean()) throw UsageError("config field 'shuffle_each_episode' must be a boolean");
        cfg.shuffle_each_episode = v.get<bool>();
      } else if (key == "episode_length") cfg.episode_length = as_int(v, key);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(v, key));
      else throw UsageError("unknown env config field '" + key + "'");
    } catch (const SchemaError& e) {
      throw UsageError(std::string("env config: ") + e.what());
    }
  }
}

void apply_experiment_json(const json& doc, ExperimentConfig& cfg,
                           std::string& out_dir) {
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "devices") {
      cfg.devices.clear();
      for (const json& e : v) cfg.devices.push_back(as_str(e, key));
    } else if (key == "algorithms") {
      cfg.algorithms.clear();
      for (const json& e : v) cfg.algorithms.push_back(as_str(e, key));
    } else if (key == "test_fractions") {
      cfg.test_fractions.clear();
      for (const json& e : v) cfg.test_fractions.push_back(as_real(e, key));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const json& e : v) cfg.seeds.push_back(static_cast<std::uint64_t>(as_int(e, key)));
    } else if (key == "val_fraction") {
      cfg.val_fraction = as_real(v, key);
    } else if (key == "scaler") {
      const std::string mode = as_str(v, key);
      if (mode == "minmax") cfg.scaler = ScalerMode::minmax;
      else if (mode == "zscore") cfg.scaler = ScalerMode::zscore;
      else throw UsageError("config field 'scaler' must be minmax or zscore");
    } else if (key == "jobs") {
      cfg.jobs = static_cast<int>(as_int(v, key));
    } else if (key == "timing") {
      const std::string mode = as_str(v, key);
      if (mode == "wall") cfg.zero_timing = false;
      else if (mode == "zero") cfg.zero_timing = true;
      else throw UsageError("config field 'timing' must be wall or zero");
    } else if (key == "out") {
      out_dir = as_str(v, key);
    } else if (key == "agent") {
      apply_agent_json(v, cfg.agent);
    } else if (key == "ann") {
      apply_ann_json(v, cfg.ann);
    } else if (key == "env") {
      apply_env_json(v, cfg.env);
    } else {
      throw UsageError("unknown config field '" + key + "'");
    }
  }
}

DeviceSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw UsageError("device spec must hold a JSON object");
  DeviceSpec spec;
  auto vec4 = [](const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 4) {
      throw UsageError("device spec field '" + key + "' must be a 4-element array");
    }
    Eigen::Vector4d out;
    for (int i = 0; i < 4; ++i) out(i) = as_real(v.at(i), key);
    return out;
  };
  for (const auto& [key, v] : doc.items()) {
    if (key == "name") spec.name = as_str(v, key);
    else if (key == "n_normal") spec.n_normal = as_int(v, key);
    else if (key == "n_failure") spec.n_failure = as_int(v, key);
    else if (key == "normal_mean") spec.normal_mean = vec4(v, key);
    else if (key == "normal_std") spec.normal_std = vec4(v, key);
    else if (key == "failure_shift") spec.failure_shift = vec4(v, key);
    else if (key == "overlap") spec.overlap = as_real(v, key);
    else if (key == "severity_spread") spec.severity_spread = as_real(v, key);
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(as_int(v, key));
    else throw UsageError("unknown device spec field '" + key + "'");
  }
  return spec;
}

void check_fraction(double f, const char* flag) {
  if (!(f > 0.0 && f < 1.0)) {
    throw UsageError(std::string(flag) + " must lie strictly in (0,1)");
  }
}

void write_agent_curve(const std::vector<CurvePoint>& curve,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "step,epsilon,mean_loss,val_f1\n";
  for (const CurvePoint& p : curve) {
    out << p.step << ',' << format_double(p.epsilon) << ','
        << format_double(p.mean_loss) << ',' << format_double(p.val_f1) << "\n";
  }
}

void write_ann_curve(const std::vector<AnnCurvePoint>& curve,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,mean_loss,val_f1\n";
  for (const AnnCurvePoint& p : curve) {
    out << p.epoch << ',' << format_double(p.mean_loss) << ','
        << format_double(p.val_f1) << "\n";
  }
}

void print_report_line(const EvalReport& r) {
  std::cout << r.algorithm << " on " << r.device
            << " (test " << format_double(r.test_fraction) << ", seed "
            << r.seed << "): f1=" << format_double(r.f1)
            << " precision=" << format_double(r.precision)
            << " recall=" << format_double(r.recall) << " tp=" << r.cm.tp
            << " fp=" << r.cm.fp << " fn=" << r.cm.fn << " tn=" << r.cm.tn
            << "\n";
}

// ---- subcommand state ----------------------------------------------------

struct GenerateArgs {
  std::string preset;
  std::string spec_file;
  std::string out = "dataset.csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct TrainArgs {
  std::string data;
  std::string algorithm = "ddqn";
  std::string config_file;
  std::string out = "train_out";
  std::string scaler = "minmax";
  std::string reward_scheme;
  double test_fraction = 0.2;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long total_steps = -1;
  double gamma = -1.0;
  double lr = -1.0;
  int batch_size = -1;
  long target_sync = -1;
  double epsilon_end = -1.0;
};

struct EvaluateArgs {
  std::string model;
  std::string preds;
  std::string algorithm = "external";
  std::string data;
  std::string out;
  std::string export_test;
  std::string scaler = "minmax";
  double test_fraction = 0.2;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct CompareArgs {
  std::string config_file;
  std::string out = "runs";
  std::string timing;
  std::vector<std::string> devices;
  std::vector<std::string> algorithms;
  std::vector<double> fractions;
  std::vector<std::uint64_t> seeds;
  long total_steps = -1;
  double gamma = -1.0;
  int jobs = 0;
};

struct ReportArgs {
  std::string csv;
  std::string out = "report_out";
};

int cmd_generate(const GenerateArgs& args) {
  if (args.preset.empty() == args.spec_file.empty()) {
    throw UsageError("generate needs exactly one of --preset (" +
                     preset_list() + ") or --spec <json>");
  }
  DeviceSpec spec;
  if (!args.preset.empty()) {
    try {
      spec = device_preset(args.preset);
    } catch (const std::invalid_argument&) {
      throw UsageError("unknown preset '" + args.preset +
                       "'; available presets: " + preset_list());
    }
  } else {
    spec = spec_from_json(read_json_file(args.spec_file));
  }
  if (args.seed_set) spec.seed = args.seed;
  else if (const auto s = env_seed()) spec.seed = *s;

  const Dataset ds = generate(spec);
  save_csv(ds, args.out);
  std::cout << ds.name << ": " << ds.count_label(0) << " normal, "
            << ds.count_label(1) << " failure, " << ds.size()
            << " total -> " << args.out << "\n";
  return 0;
}

int cmd_train(const TrainArgs& args) {
  if (args.data.empty()) throw UsageError("train needs --data <csv or preset>");
  check_fraction(args.test_fraction, "--test-fraction");
  check_fraction(args.val_fraction, "--val-fraction");

  AgentConfig agent_cfg;
  AnnConfig ann_cfg;
  EnvConfig env_cfg;
  if (!args.config_file.empty()) {
    const json doc = read_json_file(args.config_file);
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, v] : doc.items()) {
      if (key == "agent") apply_agent_json(v, agent_cfg);
      else if (key == "ann") apply_ann_json(v, ann_cfg);
      else if (key == "env") apply_env_json(v, env_cfg);
      else throw UsageError("unknown config field '" + key + "'");
    }
  }

  std::uint64_t seed = agent_cfg.seed;
  if (args.seed_set) seed = args.seed;
  else if (const auto s = env_seed()) seed = *s;
  agent_cfg.seed = seed;
  ann_cfg.seed = seed;

  if (args.total_steps >= 0) agent_cfg.total_steps = args.total_steps;
  if (args.gamma >= 0.0) agent_cfg.gamma = args.gamma;
  if (args.lr > 0.0) {
    agent_cfg.learning_rate = args.lr;
    ann_cfg.learning_rate = args.lr;
  }
  if (args.batch_size > 0) {
    agent_cfg.batch_size = args.batch_size;
    ann_cfg.batch_size = args.batch_size;
  }
  if (args.target_sync > 0) agent_cfg.target_sync_period = args.target_sync;
  if (args.epsilon_end >= 0.0) agent_cfg.epsilon_end = args.epsilon_end;
  if (!args.reward_scheme.empty()) {
    try {
      env_cfg.reward_scheme = parse_reward_scheme(args.reward_scheme);
    } catch (const SchemaError& e) {
      throw UsageError(std::string("--reward-scheme: ") + e.what());
    }
  }
  env_cfg.seed = mix_seed(seed, hash_name("env"));

  const ScalerMode scaler_mode =
      args.scaler == "zscore" ? ScalerMode::zscore : ScalerMode::minmax;
  if (args.scaler != "minmax" && args.scaler != "zscore") {
    throw UsageError("--scaler must be minmax or zscore");
  }

  const Dataset data = device_data(args.data);
  const SplitResult parts =
      split(data, args.test_fraction, args.val_fraction,
            mix_seed(seed, hash_name(args.data)));
  const Scaler scaler = fit_scaler(parts.train, scaler_mode);
  const Dataset train_scaled = apply_scaler(scaler, parts.train);
  const Dataset val_scaled = apply_scaler(scaler, parts.val);

  std::error_code ec;
  std::filesystem::create_directories(args.out, ec);
  if (ec) throw IoError("cannot create directory: " + args.out);
  const std::string model_path = args.out + "/model.json";
  const std::string curve_path = args.out + "/curve.csv";

  if (args.algorithm == "ann") {
    const AnnResult res = train_ann(ann_cfg, train_scaled, val_scaled);
    save_ann_checkpoint(res.net, ann_cfg, res.update_count, model_path);
    write_ann_curve(res.curve, curve_path);
    std::cout << "ann trained in " << format_double(res.train_seconds)
              << "s, best val f1 " << format_double(res.best_val_f1)
              << " at epoch " << res.best_epoch << " -> " << model_path
              << "\n";
  } else if (args.algorithm == "ddqn" || args.algorithm == "dqn") {
    agent_cfg.algorithm =
        args.algorithm == "dqn" ? Algorithm::dqn : Algorithm::ddqn;
    const TrainResult res = train(agent_cfg, env_cfg, train_scaled, val_scaled);
    save_agent_checkpoint(res.agent, model_path);
    write_agent_curve(res.curve, curve_path);
    std::cout << args.algorithm << " trained in "
              << format_double(res.train_seconds) << "s, best val f1 "
              << format_double(res.best_val_f1) << " at step " << res.best_step
              << " -> " << model_path << "\n";
  } else {
    throw UsageError("--algorithm must be ddqn, dqn, or ann");
  }
  return 0;
}

int cmd_evaluate(const EvaluateArgs& args) {
  if (args.data.empty()) throw UsageError("evaluate needs --data <csv or preset>");
  if (args.model.empty() && args.preds.empty() && args.export_test.empty()) {
    throw UsageError("evaluate needs --model, --preds, or --export-test");
  }
  if (!args.model.empty() && !args.preds.empty()) {
    throw UsageError("--model and --preds are mutually exclusive");
  }
  check_fraction(args.test_fraction, "--test-fraction");
  check_fraction(args.val_fraction, "--val-fraction");
  if (args.scaler != "minmax" && args.scaler != "zscore") {
    throw UsageError("--scaler must be minmax or zscore");
  }

  // Which seed governed the split: flag, else the model's stored seed, else
  // the environment fallback, else 1.
  std::uint64_t seed = 1;
  std::string algorithm = args.algorithm;
  struct Loaded {
    bool is_agent = false;
    AgentCheckpoint agent;
    AnnCheckpoint ann;
  } model;
  if (!args.model.empty()) {
    const json doc = read_json_file(args.model);
    const std::string format =
        doc.is_object() && doc.contains("format") && doc["format"].is_string()
            ? doc["format"].get<std::string>()
            : "";
    if (format == "rlsurv-agent-v1") {
      model.is_agent = true;
      model.agent = load_agent_checkpoint(args.model);
      seed = model.agent.config.seed;
      algorithm = algorithm_name(model.agent.config.algorithm);
    } else if (format == "rlsurv-ann-v1") {
      model.ann = load_ann_checkpoint(args.model);
      seed = model.ann.config.seed;
      algorithm = "ann";
    } else {
      throw UsageError("'" + args.model +
                       "' is not an agent or ann checkpoint");
    }
  }
  if (args.seed_set) seed = args.seed;
  else if (args.model.empty()) {
    if (const auto s = env_seed()) seed = *s;
  }

  const Dataset data = device_data(args.data);
  const SplitResult parts =
      split(data, args.test_fraction, args.val_fraction,
            mix_seed(seed, hash_name(args.data)));
  const ScalerMode scaler_mode =
      args.scaler == "zscore" ? ScalerMode::zscore : ScalerMode::minmax;
  const Scaler scaler = fit_scaler(parts.train, scaler_mode);
  const Dataset test_scaled = apply_scaler(scaler, parts.test);

  if (!args.export_test.empty()) {
    save_csv(test_scaled, args.export_test);
    std::cout << "wrote test split (" << test_scaled.size() << " rows) -> "
              << args.export_test << "\n";
    if (args.model.empty() && args.preds.empty()) return 0;
  }

  std::vector<int> preds;
  if (!args.model.empty()) {
    if (model.is_agent) {
      const Agent agent = restore_agent(model.agent);
      preds = predict(agent, test_scaled.features);
    } else {
      preds = predict_ann(model.ann.net, test_scaled.features);
    }
  } else {
    preds = load_predictions_csv(args.preds, test_scaled.size());
  }

  EvalReport report = make_report(algorithm, args.data, args.test_fraction,
                                  seed, confusion(preds, test_scaled.labels),
                                  0.0);
  print_report_line(report);
  if (!args.out.empty()) {
    emit_report({report}, args.out);
    std::cout << "report written to " << args.out << "\n";
  }
  return 0;
}

int cmd_compare(const CompareArgs& args) {
  ExperimentConfig cfg;
  std::string out_dir = args.out;
  if (!args.config_file.empty()) {
    apply_experiment_json(read_json_file(args.config_file), cfg, out_dir);
  }
  // Flags win over the config file.
  if (!args.devices.empty()) cfg.devices = args.devices;
  if (!args.algorithms.empty()) cfg.algorithms = args.algorithms;
  if (!args.fractions.empty()) cfg.test_fractions = args.fractions;
  if (!args.seeds.empty()) cfg.seeds = args.seeds;
  else if (args.config_file.empty()) {
    if (const auto s = env_seed()) cfg.seeds = {*s};
  }
  if (args.total_steps >= 0) cfg.agent.total_steps = args.total_steps;
  if (args.gamma >= 0.0) cfg.agent.gamma = args.gamma;
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (args.out != "runs") out_dir = args.out;
  if (!args.timing.empty()) {
    if (args.timing == "wall") cfg.zero_timing = false;
    else if (args.timing == "zero") cfg.zero_timing = true;
    else throw UsageError("--timing must be wall or zero");
  }

  std::vector<EvalReport> reports;
  try {
    reports = run_comparison(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit_report(reports, out_dir);
  for (const EvalReport& r : reports) print_report_line(r);
  std::cout << reports.size() << " runs -> " << out_dir << "/comparison.csv\n";
  return 0;
}

int cmd_report(const ReportArgs& args) {
  const std::vector<EvalReport> reports = parse_comparison_csv(args.csv);
  if (reports.empty()) {
    throw UsageError("'" + args.csv + "' holds no comparison rows");
  }
  emit_report(reports, args.out);
  std::cout << reports.size() << " rows -> " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Failure classification on imbalanced device telemetry: "
               "synthetic data, Q-learning agents, supervised baseline, and "
               "comparison reports"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "Write a synthetic device dataset to CSV");
  generate->add_option("--preset", gen.preset,
                       "Built-in device preset (" + preset_list() + ")");
  generate->add_option("--spec", gen.spec_file, "Device spec JSON file");
  auto* gen_seed = generate->add_option("--seed", gen.seed, "Generator seed");
  generate->add_option("-o,--out", gen.out, "Output CSV path");

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train one model on one dataset and write a checkpoint");
  train_cmd->add_option("--data", tr.data, "Dataset CSV path or preset name");
  train_cmd->add_option("--algorithm", tr.algorithm, "ddqn, dqn, or ann");
  train_cmd->add_option("--test-fraction", tr.test_fraction,
                        "Held-out test share of the data");
  train_cmd->add_option("--val-fraction", tr.val_fraction,
                        "Validation share of the non-test remainder");
  auto* tr_seed = train_cmd->add_option("--seed", tr.seed, "Run seed");
  train_cmd->add_option("--total-steps", tr.total_steps,
                        "Agent interaction budget");
  train_cmd->add_option("--gamma", tr.gamma, "Discount factor");
  train_cmd->add_option("--lr", tr.lr, "Learning rate");
  train_cmd->add_option("--batch-size", tr.batch_size, "Mini-batch size");
  train_cmd->add_option("--target-sync", tr.target_sync,
                        "Target network sync period (steps)");
  train_cmd->add_option("--epsilon-end", tr.epsilon_end,
                        "Final exploration rate");
  train_cmd->add_option("--reward-scheme", tr.reward_scheme,
                        "balanced or unit");
  train_cmd->add_option("--scaler", tr.scaler, "minmax or zscore");
  train_cmd->add_option("--config", tr.config_file,
                        "JSON config with agent/ann/env sections");
  train_cmd->add_option("--out", tr.out, "Output directory");

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score a checkpoint or external predictions on a test split");
  evaluate->add_option("--model", ev.model, "Checkpoint JSON path");
  evaluate->add_option("--preds", ev.preds,
                       "External predictions CSV (row_index,pred)");
  evaluate->add_option("--algorithm", ev.algorithm,
                       "Name for externally predicted rows");
  evaluate->add_option("--data", ev.data, "Dataset CSV path or preset name");
  evaluate->add_option("--test-fraction", ev.test_fraction,
                       "Held-out test share of the data");
  evaluate->add_option("--val-fraction", ev.val_fraction,
                       "Validation share of the non-test remainder");
  auto* ev_seed = evaluate->add_option("--seed", ev.seed,
                                       "Seed that produced the split");
  evaluate->add_option("--scaler", ev.scaler, "minmax or zscore");
  evaluate->add_option("--export-test", ev.export_test,
                       "Write the scaled test split to this CSV");
  evaluate->add_option("--out", ev.out, "Also emit report artifacts here");

  CompareArgs cmp;
  CLI::App* compare = app.add_subcommand(
      "compare", "Run the full device x algorithm x split x seed grid");
  compare->add_option("--config", cmp.config_file, "Experiment JSON config");
  compare->add_option("--device", cmp.devices,
                      "Device preset or CSV (repeatable)");
  compare->add_option("--algorithm", cmp.algorithms,
                      "Algorithm subset (repeatable)");
  compare->add_option("--test-fraction", cmp.fractions,
                      "Test fraction list (repeatable)");
  compare->add_option("--seed", cmp.seeds, "Seed list (repeatable)");
  compare->add_option("--total-steps", cmp.total_steps,
                      "Agent interaction budget");
  compare->add_option("--gamma", cmp.gamma, "Discount factor");
  compare->add_option("--jobs", cmp.jobs, "Worker threads");
  compare->add_option("--timing", cmp.timing,
                      "wall (real train times) or zero (byte-stable output)");
  compare->add_option("--out", cmp.out, "Report directory");

  ReportArgs rep;
  CLI::App* report = app.add_subcommand(
      "report", "Regenerate report artifacts from a comparison.csv");
  report->add_option("csv", rep.csv, "comparison.csv path")->required();
  report->add_option("--out", rep.out, "Report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    gen.seed_set = gen_seed->count() > 0;
    tr.seed_set = tr_seed->count() > 0;
    ev.seed_set = ev_seed->count() > 0;
    if (generate->parsed()) return cmd_generate(gen);
    if (train_cmd->parsed()) return cmd_train(tr);
    if (evaluate->parsed()) return cmd_evaluate(ev);
    if (compare->parsed()) return cmd_compare(cmp);
    if (report->parsed()) return cmd_report(rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
