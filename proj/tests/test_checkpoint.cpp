#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "rlsurv/checkpoint.hpp"
#include "rlsurv/errors.hpp"

using namespace rlsurv;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& body = "")
      : path(name) {
    if (!body.empty()) {
      std::ofstream out(path);
      out << body;
    }
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("model file round-trips parameters bit for bit") {
  Mlp net = init_mlp({4, 128, 64, 32, 2}, 99);
  // Sprinkle in values whose decimal forms are easy to get subtly wrong.
  net.weights[0](0, 0) = 0.1;
  net.weights[0](0, 1) = 1.0 / 3.0;
  net.weights[1](5, 5) = 1e-300;
  net.weights[2](3, 1) = -0.0;
  net.biases[0](7) = 12345678.90123456;
  net.biases[3](1) = -2.2250738585072014e-308;

  TempFile tmp("tmp_model.json");
  save_model(net, OptimizerKind::sgd, tmp.path);
  const ModelFile back = load_model(tmp.path);
  CHECK(back.optimizer == OptimizerKind::sgd);
  CHECK(parameters_equal(net, back.net));
  CHECK(std::signbit(back.net.weights[2](3, 1)));
}

TEST_CASE("saving the same model twice is byte-identical") {
  const Mlp net = init_mlp({4, 16, 2}, 7);
  TempFile a("tmp_model_a.json");
  TempFile b("tmp_model_b.json");
  save_model(net, OptimizerKind::adam, a.path);
  save_model(net, OptimizerKind::adam, b.path);
  CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("agent checkpoint echoes the config and restores a working agent") {
  AgentConfig cfg;
  cfg.algorithm = Algorithm::dqn;
  cfg.gamma = 0.37;
  cfg.learning_rate = 0.00125;
  cfg.batch_size = 16;
  cfg.target_sync_period = 123;
  cfg.total_steps = 4567;
  cfg.epsilon_end = 0.25;
  cfg.epsilon_decay_steps = 2000;
  cfg.epsilon_schedule = EpsilonSchedule::exponential;
  cfg.loss = LossKind::mse;
  cfg.optimizer = OptimizerKind::sgd;
  cfg.layer_sizes = {4, 8, 2};
  cfg.replay_capacity = 500;
  cfg.validation_period = 250;
  cfg.seed = 0xDEADBEEFCAFEF00DULL;

  Agent agent = make_agent(cfg);
  agent.step_count = 321;

  TempFile tmp("tmp_agent.json");
  save_agent_checkpoint(agent, tmp.path);
  const AgentCheckpoint cp = load_agent_checkpoint(tmp.path);

  CHECK(cp.step_count == 321);
  CHECK(parameters_equal(cp.q_net, agent.q_net));
  CHECK(cp.config.algorithm == Algorithm::dqn);
  CHECK(cp.config.gamma == 0.37);
  CHECK(cp.config.learning_rate == 0.00125);
  CHECK(cp.config.batch_size == 16);
  CHECK(cp.config.target_sync_period == 123);
  CHECK(cp.config.total_steps == 4567);
  CHECK(cp.config.epsilon_start == 1.0);
  CHECK(cp.config.epsilon_end == 0.25);
  CHECK(cp.config.epsilon_decay_steps == 2000);
  CHECK(cp.config.epsilon_schedule == EpsilonSchedule::exponential);
  CHECK(cp.config.loss == LossKind::mse);
  CHECK(cp.config.optimizer == OptimizerKind::sgd);
  CHECK(cp.config.layer_sizes == std::vector<int>{4, 8, 2});
  CHECK(cp.config.replay_capacity == 500);
  CHECK(cp.config.validation_period == 250);
  CHECK(cp.config.seed == 0xDEADBEEFCAFEF00DULL);

  const Agent restored = restore_agent(cp);
  CHECK(parameters_equal(restored.q_net, agent.q_net));
  CHECK(parameters_equal(restored.target_net, agent.q_net));
  CHECK(restored.step_count == 321);
  CHECK(restored.config.seed == cfg.seed);
}

TEST_CASE("ann checkpoint round-trips net, config, and update counter") {
  AnnConfig cfg;
  cfg.layer_sizes = {4, 12, 6, 2};
  cfg.learning_rate = 0.005;
  cfg.batch_size = 8;
  cfg.epochs = 42;
  cfg.class_weighting = ClassWeighting::balanced;
  cfg.optimizer = OptimizerKind::adam;
  cfg.seed = 31;

  const Mlp net = init_mlp(cfg.layer_sizes, 5);
  TempFile tmp("tmp_ann.json");
  save_ann_checkpoint(net, cfg, 777, tmp.path);
  const AnnCheckpoint cp = load_ann_checkpoint(tmp.path);
  CHECK(parameters_equal(cp.net, net));
  CHECK(cp.update_count == 777);
  CHECK(cp.config.layer_sizes == cfg.layer_sizes);
  CHECK(cp.config.learning_rate == 0.005);
  CHECK(cp.config.batch_size == 8);
  CHECK(cp.config.epochs == 42);
  CHECK(cp.config.class_weighting == ClassWeighting::balanced);
  CHECK(cp.config.seed == 31);
}

TEST_CASE("load failures are reported by category") {
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model("definitely_absent.json"), IoError);
  }
  SUBCASE("malformed json") {
    TempFile tmp("tmp_broken.json", "{ not json");
    CHECK_THROWS_AS(load_model(tmp.path), ParseError);
  }
  SUBCASE("wrong document kind") {
    const Mlp net = init_mlp({4, 2}, 1);
    TempFile tmp("tmp_kind.json");
    save_model(net, OptimizerKind::adam, tmp.path);
    CHECK_THROWS_AS(load_agent_checkpoint(tmp.path), SchemaError);
  }
  SUBCASE("tampered weight shape") {
    TempFile tmp(
        "tmp_shape.json",
        R"({"format":"rlsurv-model-v1","layer_sizes":[2,2],"optimizer":"adam",
            "weights":[["1","2","3"]],"biases":[["0","0"]]})");
    CHECK_THROWS_AS(load_model(tmp.path), SchemaError);
  }
  SUBCASE("unknown enum value") {
    TempFile tmp(
        "tmp_enum.json",
        R"({"format":"rlsurv-model-v1","layer_sizes":[2,2],"optimizer":"adagrad",
            "weights":[["1","2","3","4"]],"biases":[["0","0"]]})");
    CHECK_THROWS_AS(load_model(tmp.path), SchemaError);
  }
  SUBCASE("unwritable path") {
    const Mlp net = init_mlp({4, 2}, 1);
    CHECK_THROWS_AS(save_model(net, OptimizerKind::adam, "no_dir/x.json"),
                    IoError);
  }
}

TEST_CASE("enum names round-trip through their parsers") {
  CHECK(parse_algorithm(algorithm_name(Algorithm::dqn)) == Algorithm::dqn);
  CHECK(parse_algorithm(algorithm_name(Algorithm::ddqn)) == Algorithm::ddqn);
  CHECK(parse_optimizer(optimizer_name(OptimizerKind::sgd)) ==
        OptimizerKind::sgd);
  CHECK(parse_loss(loss_name(LossKind::huber)) == LossKind::huber);
  CHECK(parse_schedule(schedule_name(EpsilonSchedule::exponential)) ==
        EpsilonSchedule::exponential);
  CHECK(parse_weighting(weighting_name(ClassWeighting::balanced)) ==
        ClassWeighting::balanced);
  CHECK(parse_reward_scheme(reward_scheme_name(RewardScheme::unit)) ==
        RewardScheme::unit);
  CHECK_THROWS_AS(parse_algorithm("sarsa"), SchemaError);
  CHECK_THROWS_AS(parse_reward_scheme(""), SchemaError);
}
