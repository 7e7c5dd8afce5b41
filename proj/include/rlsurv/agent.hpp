#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "rlsurv/dataset.hpp"
#include "rlsurv/env.hpp"
#include "rlsurv/nn.hpp"
#include "rlsurv/replay.hpp"
#include "rlsurv/types.hpp"

namespace rlsurv {

enum class Algorithm { dqn, ddqn };
enum class LossKind { huber, mse };
enum class EpsilonSchedule { linear, exponential };

struct AgentConfig {
  Algorithm algorithm = Algorithm::ddqn;
  double gamma = 0.0;
  double learning_rate = 0.0025;
  int batch_size = 32;
  long target_sync_period = 800;
  long total_steps = 60000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.5;
  // <= 0 resolves to total_steps / 2.
  long epsilon_decay_steps = 0;
  EpsilonSchedule epsilon_schedule = EpsilonSchedule::linear;
  LossKind loss = LossKind::huber;
  OptimizerKind optimizer = OptimizerKind::adam;
  std::vector<int> layer_sizes = {4, 128, 64, 32, 2};
  std::size_t replay_capacity = 10000;
  // Validation cadence during train(), in steps.
  long validation_period = 2000;
  std::uint64_t seed = 0;
};

/// Online Q-network, its frozen target copy, and the machinery both share.
/// The target network is only ever written by the periodic weight sync.
struct Agent {
  Mlp q_net;
  Mlp target_net;
  OptimizerState optimizer;
  ReplayBuffer buffer;
  AgentConfig config;
  long step_count = 0;
  std::mt19937_64 rng;  // exploration draws only
};

/// Validates the config and builds an agent with seeded networks. The
/// sub-seeds for weights, replay, and exploration are derived from
/// config.seed without reference to the algorithm, so dqn/ddqn runs with the
/// same seed share initial conditions and random streams.
Agent make_agent(const AgentConfig& cfg);

/// Epsilon at a given global step: interpolates epsilon_start down to
/// epsilon_end over epsilon_decay_steps, then stays at epsilon_end.
double epsilon_at(const AgentConfig& cfg, long step);

/// Epsilon-greedy over q_net: explores with probability epsilon, otherwise
/// argmax of the Q-values with ties going to the lower action.
int select_action(Agent& agent, const Vector& state, double epsilon);

/// target_i = reward_i + gamma * max_a Q_target(next_i, a), with the next-state
/// term dropped on terminal transitions (and the whole lookahead skipped when
/// gamma == 0, where it is identically zero).
Vector compute_targets_dqn(const Agent& agent,
                           const std::vector<Transition>& batch);

/// Double-DQN decoupling: the online network picks the next-state action, the
/// target network evaluates it. Coincides with DQN when the networks share
/// parameters, and never exceeds the DQN target elementwise.
Vector compute_targets_ddqn(const Agent& agent,
                            const std::vector<Transition>& batch);

/// Scalar TD loss restricted to the taken action of each row: the returned
/// gradient matrix is zero everywhere except at (i, actions[i]).
std::pair<double, Matrix> masked_loss_and_grads(const Matrix& q_values,
                                                const std::vector<int>& actions,
                                                const Vector& targets,
                                                LossKind kind);

struct StepReport {
  double epsilon = 0.0;
  double reward = 0.0;
  double loss = 0.0;
  bool updated = false;  // false while the replay buffer is still warming up
};

/// One interaction + (once the buffer is warm) one learning step + the
/// periodic target sync. Resets the environment on episode boundaries.
StepReport train_step(Agent& agent, ClassificationEnv& env);

struct CurvePoint {
  long step = 0;
  double epsilon = 0.0;
  double mean_loss = 0.0;
  double val_f1 = 0.0;
};

struct TrainResult {
  Agent agent;
  std::vector<CurvePoint> curve;
  double train_seconds = 0.0;
  double best_val_f1 = 0.0;
  long best_step = 0;
};

/// Full training run: total_steps interactions over an environment built from
/// train_set, greedy validation on val_set every validation_period steps, and
/// the best-validation-F1 snapshot restored into the returned agent.
TrainResult train(const AgentConfig& cfg, const EnvConfig& env_cfg,
                  const Dataset& train_set, const Dataset& val_set);

/// Greedy labels from the online network, ties to action 0.
std::vector<int> predict(const Agent& agent,
                         const Eigen::Ref<const Matrix>& states);

}  // namespace rlsurv
