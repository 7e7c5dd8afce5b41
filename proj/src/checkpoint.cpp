#include "rlsurv/checkpoint.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "rlsurv/errors.hpp"

namespace rlsurv {

using json = nlohmann::json;

std::string algorithm_name(Algorithm a) {
  return a == Algorithm::dqn ? "dqn" : "ddqn";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "dqn") return Algorithm::dqn;
  if (text == "ddqn") return Algorithm::ddqn;
  throw SchemaError("unknown algorithm '" + text + "': expected dqn or ddqn");
}

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::adam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(const std::string& text) {
  if (text == "adam") return OptimizerKind::adam;
  if (text == "sgd") return OptimizerKind::sgd;
  throw SchemaError("unknown optimizer '" + text + "': expected adam or sgd");
}

std::string loss_name(LossKind k) {
  return k == LossKind::huber ? "huber" : "mse";
}

LossKind parse_loss(const std::string& text) {
  if (text == "huber") return LossKind::huber;
  if (text == "mse") return LossKind::mse;
  throw SchemaError("unknown loss '" + text + "': expected huber or mse");
}

std::string schedule_name(EpsilonSchedule s) {
  return s == EpsilonSchedule::linear ? "linear" : "exponential";
}

EpsilonSchedule parse_schedule(const std::string& text) {
  if (text == "linear") return EpsilonSchedule::linear;
  if (text == "exponential") return EpsilonSchedule::exponential;
  throw SchemaError("unknown epsilon schedule '" + text +
                    "': expected linear or exponential");
}

std::string weighting_name(ClassWeighting w) {
  return w == ClassWeighting::none ? "none" : "balanced";
}

ClassWeighting parse_weighting(const std::string& text) {
  if (text == "none") return ClassWeighting::none;
  if (text == "balanced") return ClassWeighting::balanced;
  throw SchemaError("unknown class weighting '" + text +
                    "': expected none or balanced");
}

std::string reward_scheme_name(RewardScheme s) {
  return s == RewardScheme::balanced ? "balanced" : "unit";
}

RewardScheme parse_reward_scheme(const std::string& text) {
  if (text == "balanced") return RewardScheme::balanced;
  if (text == "unit") return RewardScheme::unit;
  throw SchemaError("unknown reward scheme '" + text +
                    "': expected balanced or unit");
}

namespace {

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("checkpoint missing field '") + key + "'");
  }
  return j.at(key);
}

long need_int(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<long>();
}

std::uint64_t need_uint(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::uint64_t>();
}

std::string need_str(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_string()) {
    throw SchemaError(std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

// Reals travel as decimal strings (see format_double) so reload is bit-exact.
double need_real(const json& j, const char* key) {
  return parse_double(need_str(j, key));
}

json real(double value) { return json(format_double(value)); }

json mlp_to_json(const Mlp& net, OptimizerKind optimizer) {
  json doc;
  doc["layer_sizes"] = net.layer_sizes;
  doc["optimizer"] = optimizer_name(optimizer);
  json weights = json::array();
  json biases = json::array();
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    json w = json::array();
    const Matrix& wk = net.weights[k];
    for (long r = 0; r < wk.rows(); ++r) {
      for (long c = 0; c < wk.cols(); ++c) w.push_back(format_double(wk(r, c)));
    }
    weights.push_back(std::move(w));
    json b = json::array();
    const Vector& bk = net.biases[k];
    for (long r = 0; r < bk.size(); ++r) b.push_back(format_double(bk(r)));
    biases.push_back(std::move(b));
  }
  doc["weights"] = std::move(weights);
  doc["biases"] = std::move(biases);
  return doc;
}

ModelFile mlp_from_json(const json& doc) {
  const json& sizes = need(doc, "layer_sizes");
  if (!sizes.is_array() || sizes.size() < 2) {
    throw SchemaError("'layer_sizes' must be an array of at least two sizes");
  }
  ModelFile out;
  for (const json& s : sizes) {
    if (!s.is_number_integer() || s.get<long>() < 1) {
      throw SchemaError("'layer_sizes' entries must be positive integers");
    }
    out.net.layer_sizes.push_back(s.get<int>());
  }
  out.optimizer = parse_optimizer(need_str(doc, "optimizer"));

  const json& weights = need(doc, "weights");
  const json& biases = need(doc, "biases");
  const std::size_t layers = out.net.layer_sizes.size() - 1;
  if (!weights.is_array() || weights.size() != layers ||
      !biases.is_array() || biases.size() != layers) {
    throw SchemaError("'weights' and 'biases' must hold one array per layer");
  }
  for (std::size_t k = 0; k < layers; ++k) {
    const long rows = out.net.layer_sizes[k + 1];
    const long cols = out.net.layer_sizes[k];
    const json& w = weights.at(k);
    const json& b = biases.at(k);
    if (!w.is_array() || static_cast<long>(w.size()) != rows * cols) {
      throw SchemaError("weight array size mismatch at layer " +
                        std::to_string(k));
    }
    if (!b.is_array() || static_cast<long>(b.size()) != rows) {
      throw SchemaError("bias array size mismatch at layer " +
                        std::to_string(k));
    }
    Matrix wk(rows, cols);
    long idx = 0;
    for (long r = 0; r < rows; ++r) {
      for (long c = 0; c < cols; ++c) {
        const json& cell = w.at(idx++);
        if (!cell.is_string()) throw SchemaError("weights must be strings");
        wk(r, c) = parse_double(cell.get<std::string>());
      }
    }
    Vector bk(rows);
    for (long r = 0; r < rows; ++r) {
      const json& cell = b.at(r);
      if (!cell.is_string()) throw SchemaError("biases must be strings");
      bk(r) = parse_double(cell.get<std::string>());
    }
    out.net.weights.push_back(std::move(wk));
    out.net.biases.push_back(std::move(bk));
  }
  return out;
}

json agent_config_to_json(const AgentConfig& cfg) {
  json doc;
  doc["algorithm"] = algorithm_name(cfg.algorithm);
  doc["gamma"] = real(cfg.gamma);
  doc["learning_rate"] = real(cfg.learning_rate);
  doc["batch_size"] = cfg.batch_size;
  doc["target_sync_period"] = cfg.target_sync_period;
  doc["total_steps"] = cfg.total_steps;
  doc["epsilon_start"] = real(cfg.epsilon_start);
  doc["epsilon_end"] = real(cfg.epsilon_end);
  doc["epsilon_decay_steps"] = cfg.epsilon_decay_steps;
  doc["epsilon_schedule"] = schedule_name(cfg.epsilon_schedule);
  doc["loss"] = loss_name(cfg.loss);
  doc["optimizer"] = optimizer_name(cfg.optimizer);
  doc["layer_sizes"] = cfg.layer_sizes;
  doc["replay_capacity"] = cfg.replay_capacity;
  doc["validation_period"] = cfg.validation_period;
  doc["seed"] = cfg.seed;
  return doc;
}

AgentConfig agent_config_from_json(const json& doc) {
  AgentConfig cfg;
  cfg.algorithm = parse_algorithm(need_str(doc, "algorithm"));
  cfg.gamma = need_real(doc, "gamma");
  cfg.learning_rate = need_real(doc, "learning_rate");
  cfg.batch_size = static_cast<int>(need_int(doc, "batch_size"));
  cfg.target_sync_period = need_int(doc, "target_sync_period");
  cfg.total_steps = need_int(doc, "total_steps");
  cfg.epsilon_start = need_real(doc, "epsilon_start");
  cfg.epsilon_end = need_real(doc, "epsilon_end");
  cfg.epsilon_decay_steps = need_int(doc, "epsilon_decay_steps");
  cfg.epsilon_schedule = parse_schedule(need_str(doc, "epsilon_schedule"));
  cfg.loss = parse_loss(need_str(doc, "loss"));
  cfg.optimizer = parse_optimizer(need_str(doc, "optimizer"));
  const json& sizes = need(doc, "layer_sizes");
  if (!sizes.is_array()) throw SchemaError("'layer_sizes' must be an array");
  cfg.layer_sizes.clear();
  for (const json& s : sizes) cfg.layer_sizes.push_back(s.get<int>());
  cfg.replay_capacity = need_uint(doc, "replay_capacity");
  cfg.validation_period = need_int(doc, "validation_period");
  cfg.seed = need_uint(doc, "seed");
  return cfg;
}

json ann_config_to_json(const AnnConfig& cfg) {
  json doc;
  doc["layer_sizes"] = cfg.layer_sizes;
  doc["learning_rate"] = real(cfg.learning_rate);
  doc["batch_size"] = cfg.batch_size;
  doc["epochs"] = cfg.epochs;
  doc["class_weighting"] = weighting_name(cfg.class_weighting);
  doc["optimizer"] = optimizer_name(cfg.optimizer);
  doc["seed"] = cfg.seed;
  return doc;
}

AnnConfig ann_config_from_json(const json& doc) {
  AnnConfig cfg;
  const json& sizes = need(doc, "layer_sizes");
  if (!sizes.is_array()) throw SchemaError("'layer_sizes' must be an array");
  cfg.layer_sizes.clear();
  for (const json& s : sizes) cfg.layer_sizes.push_back(s.get<int>());
  cfg.learning_rate = need_real(doc, "learning_rate");
  cfg.batch_size = static_cast<int>(need_int(doc, "batch_size"));
  cfg.epochs = static_cast<int>(need_int(doc, "epochs"));
  cfg.class_weighting = parse_weighting(need_str(doc, "class_weighting"));
  cfg.optimizer = parse_optimizer(need_str(doc, "optimizer"));
  cfg.seed = need_uint(doc, "seed");
  return cfg;
}

void write_document(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void check_format(const json& doc, const std::string& expected) {
  const std::string got = need_str(doc, "format");
  if (got != expected) {
    throw SchemaError("expected format '" + expected + "', found '" + got +
                      "'");
  }
}

}  // namespace

void save_model(const Mlp& net, OptimizerKind optimizer,
                const std::string& path) {
  json doc = mlp_to_json(net, optimizer);
  doc["format"] = "rlsurv-model-v1";
  write_document(doc, path);
}

ModelFile load_model(const std::string& path) {
  const json doc = read_document(path);
  check_format(doc, "rlsurv-model-v1");
  return mlp_from_json(doc);
}

void save_agent_checkpoint(const Agent& agent, const std::string& path) {
  json doc;
  doc["format"] = "rlsurv-agent-v1";
  doc["model"] = mlp_to_json(agent.q_net, agent.config.optimizer);
  doc["config"] = agent_config_to_json(agent.config);
  doc["step_count"] = agent.step_count;
  write_document(doc, path);
}

AgentCheckpoint load_agent_checkpoint(const std::string& path) {
  const json doc = read_document(path);
  check_format(doc, "rlsurv-agent-v1");
  AgentCheckpoint cp;
  cp.config = agent_config_from_json(need(doc, "config"));
  ModelFile model = mlp_from_json(need(doc, "model"));
  cp.q_net = std::move(model.net);
  cp.step_count = need_int(doc, "step_count");
  if (cp.q_net.layer_sizes != cp.config.layer_sizes) {
    throw SchemaError("model topology disagrees with config layer_sizes");
  }
  return cp;
}

Agent restore_agent(const AgentCheckpoint& cp) {
  Agent agent = make_agent(cp.config);
  agent.q_net = cp.q_net;
  copy_weights(agent.q_net, agent.target_net);
  agent.step_count = cp.step_count;
  return agent;
}

void save_ann_checkpoint(const Mlp& net, const AnnConfig& config,
                         long update_count, const std::string& path) {
  json doc;
  doc["format"] = "rlsurv-ann-v1";
  doc["model"] = mlp_to_json(net, config.optimizer);
  doc["config"] = ann_config_to_json(config);
  doc["update_count"] = update_count;
  write_document(doc, path);
}

AnnCheckpoint load_ann_checkpoint(const std::string& path) {
  const json doc = read_document(path);
  check_format(doc, "rlsurv-ann-v1");
  AnnCheckpoint cp;
  cp.config = ann_config_from_json(need(doc, "config"));
  ModelFile model = mlp_from_json(need(doc, "model"));
  cp.net = std::move(model.net);
  cp.update_count = need_int(doc, "update_count");
  if (cp.net.layer_sizes != cp.config.layer_sizes) {
    throw SchemaError("model topology disagrees with config layer_sizes");
  }
  return cp;
}

}  // namespace rlsurv
