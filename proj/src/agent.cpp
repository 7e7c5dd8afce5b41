#include "rlsurv/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rlsurv/metrics.hpp"

namespace rlsurv {

namespace {

void validate(const AgentConfig& cfg) {
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0)
    throw std::invalid_argument("gamma must lie in [0,1]");
  if (cfg.learning_rate <= 0.0)
    throw std::invalid_argument("learning rate must be positive");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (cfg.target_sync_period < 1)
    throw std::invalid_argument("target sync period must be positive");
  if (cfg.total_steps < 0) throw std::invalid_argument("total_steps must be non-negative");
  if (!(cfg.epsilon_end >= 0.0 && cfg.epsilon_end <= cfg.epsilon_start &&
        cfg.epsilon_start <= 1.0)) {
    throw std::invalid_argument("need 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (cfg.layer_sizes.size() < 2 || cfg.layer_sizes.back() != 2)
    throw std::invalid_argument("network must end in one output per action");
  if (cfg.validation_period < 1)
    throw std::invalid_argument("validation period must be positive");
}

long resolved_decay_steps(const AgentConfig& cfg) {
  return cfg.epsilon_decay_steps > 0 ? cfg.epsilon_decay_steps
                                     : cfg.total_steps / 2;
}

Matrix next_state_matrix(const std::vector<Transition>& batch) {
  Matrix next(static_cast<long>(batch.size()), batch.front().next_state.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    next.row(static_cast<long>(i)) = batch[i].next_state.transpose();
  return next;
}

}  // namespace

Agent make_agent(const AgentConfig& cfg) {
  validate(cfg);
  Agent agent{
      init_mlp(cfg.layer_sizes, mix_seed(cfg.seed, hash_name("qnet"))),
      Mlp{},
      OptimizerState{},
      ReplayBuffer(cfg.replay_capacity, mix_seed(cfg.seed, hash_name("replay"))),
      cfg,
      0,
      std::mt19937_64(mix_seed(cfg.seed, hash_name("explore")))};
  agent.target_net = agent.q_net;  // start in sync
  agent.optimizer = make_optimizer(agent.q_net, cfg.optimizer, cfg.learning_rate);
  return agent;
}

double epsilon_at(const AgentConfig& cfg, long step) {
  if (step < 0) throw std::invalid_argument("step must be non-negative");
  const long decay = resolved_decay_steps(cfg);
  if (decay <= 0 || step >= decay) return cfg.epsilon_end;
  const double t = static_cast<double>(step) / static_cast<double>(decay);
  if (cfg.epsilon_schedule == EpsilonSchedule::linear) {
    return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * t;
  }
  // geometric interpolation that still lands on epsilon_end at `decay` steps
  const double lo = std::max(cfg.epsilon_end, 1e-12);
  const double hi = std::max(cfg.epsilon_start, lo);
  return hi * std::pow(lo / hi, t);
}

int select_action(Agent& agent, const Vector& state, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("epsilon must lie in [0,1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(agent.rng) < epsilon) {
    return static_cast<int>(agent.rng() & 1u);
  }
  return static_cast<int>(argmax_index(forward_one(agent.q_net, state)));
}

namespace {

// Shared core of both target rules. DQN's max_a Q_target(s',a) is exactly
// Q_target evaluated at its own argmax, so the only difference between the
// algorithms is which network selects that action. Running both through one
// code path also makes their equality under copied weights bit-exact instead
// of merely close (separate max/lookup implementations can round differently
// once the compiler starts fusing multiply-adds).
Vector bootstrap_targets(const Agent& agent,
                         const std::vector<Transition>& batch,
                         const Mlp& selector) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const long n = static_cast<long>(batch.size());
  Vector targets(n);
  if (agent.config.gamma == 0.0) {
    // gamma * anything finite is zero, so the lookahead can be skipped whole
    for (long i = 0; i < n; ++i) targets(i) = batch[i].reward;
    return targets;
  }
  const Matrix next = next_state_matrix(batch);
  const Matrix q_sel = forward(selector, next);
  Matrix eval_storage;
  const Matrix* q_eval = &q_sel;
  if (&selector != &agent.target_net) {
    eval_storage = forward(agent.target_net, next);
    q_eval = &eval_storage;
  }
  for (long i = 0; i < n; ++i) {
    const int best = argmax_index(q_sel.row(i));
    const double bootstrap =
        batch[i].terminal ? 0.0 : agent.config.gamma * (*q_eval)(i, best);
    targets(i) = batch[i].reward + bootstrap;
  }
  return targets;
}

}  // namespace

Vector compute_targets_dqn(const Agent& agent,
                           const std::vector<Transition>& batch) {
  return bootstrap_targets(agent, batch, agent.target_net);
}

Vector compute_targets_ddqn(const Agent& agent,
                            const std::vector<Transition>& batch) {
  return bootstrap_targets(agent, batch, agent.q_net);
}

std::pair<double, Matrix> masked_loss_and_grads(const Matrix& q_values,
                                                const std::vector<int>& actions,
                                                const Vector& targets,
                                                LossKind kind) {
  const long n = q_values.rows();
  if (static_cast<long>(actions.size()) != n || targets.size() != n)
    throw std::invalid_argument("batch size mismatch between q-values, actions, targets");

  Vector taken(n);
  for (long i = 0; i < n; ++i) {
    if (actions[i] < 0 || actions[i] >= q_values.cols())
      throw std::invalid_argument("action outside the network's output range");
    taken(i) = q_values(i, actions[i]);
  }
  const auto [loss, taken_grad] = kind == LossKind::huber
                                      ? huber_loss_and_grad(taken, targets)
                                      : mse_loss_and_grad(taken, targets);
  Matrix grads = Matrix::Zero(n, q_values.cols());
  for (long i = 0; i < n; ++i) grads(i, actions[i]) = taken_grad(i);
  return {loss, grads};
}

StepReport train_step(Agent& agent, ClassificationEnv& env) {
  if (!env.in_episode()) env.reset();

  const Vector state = env.current_state();
  StepReport report;
  report.epsilon = epsilon_at(agent.config, agent.step_count);
  const int action = select_action(agent, state, report.epsilon);
  const auto outcome = env.step(action);
  report.reward = outcome.reward;

  agent.buffer.push({state, action, outcome.reward, outcome.next_state, outcome.done});
  agent.step_count += 1;

  if (agent.buffer.ready(static_cast<std::size_t>(agent.config.batch_size))) {
    const auto batch = agent.buffer.sample(static_cast<std::size_t>(agent.config.batch_size));
    const Vector targets = agent.config.algorithm == Algorithm::dqn
                               ? compute_targets_dqn(agent, batch)
                               : compute_targets_ddqn(agent, batch);

    Matrix states(static_cast<long>(batch.size()), batch.front().state.size());
    std::vector<int> actions(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      states.row(static_cast<long>(i)) = batch[i].state.transpose();
      actions[i] = batch[i].action;
    }

    const Matrix q_values = forward(agent.q_net, states);
    const auto [loss, output_grads] =
        masked_loss_and_grads(q_values, actions, targets, agent.config.loss);
    const GradientSet grads = backward(agent.q_net, states, output_grads);
    optimizer_step(agent.q_net, grads, agent.optimizer);
    report.loss = loss;
    report.updated = true;
  }

  if (agent.step_count % agent.config.target_sync_period == 0) {
    copy_weights(agent.q_net, agent.target_net);
  }
  return report;
}

TrainResult train(const AgentConfig& cfg, const EnvConfig& env_cfg,
                  const Dataset& train_set, const Dataset& val_set) {
  validate(cfg);
  if (train_set.count_label(0) == 0 || train_set.count_label(1) == 0) {
    throw std::invalid_argument("training split must contain both classes");
  }

  const auto started = std::chrono::steady_clock::now();
  TrainResult result;
  result.agent = make_agent(cfg);
  ClassificationEnv env(train_set, env_cfg);

  Mlp best = result.agent.q_net;
  double best_f1 = -1.0;
  long best_step = 0;
  double loss_sum = 0.0;
  long loss_count = 0;

  auto run_validation = [&]() {
    const std::vector<int> preds = predict(result.agent, val_set.features);
    const double f1 = f1_score(confusion(preds, val_set.labels));
    CurvePoint point;
    point.step = result.agent.step_count;
    point.epsilon = epsilon_at(cfg, result.agent.step_count);
    point.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    point.val_f1 = f1;
    result.curve.push_back(point);
    loss_sum = 0.0;
    loss_count = 0;
    // >= so that among equally good checkpoints the most-trained one wins
    if (f1 >= best_f1) {
      best_f1 = f1;
      best = result.agent.q_net;
      best_step = result.agent.step_count;
    }
  };

  for (long s = 0; s < cfg.total_steps; ++s) {
    const StepReport rep = train_step(result.agent, env);
    if (rep.updated) {
      loss_sum += rep.loss;
      ++loss_count;
    }
    const bool at_cadence = result.agent.step_count % cfg.validation_period == 0;
    const bool last = s + 1 == cfg.total_steps;
    if (val_set.size() > 0 && (at_cadence || (last && !at_cadence))) {
      run_validation();
    }
  }

  if (best_f1 >= 0.0) {
    result.agent.q_net = best;
    copy_weights(result.agent.q_net, result.agent.target_net);
    result.best_val_f1 = best_f1;
    result.best_step = best_step;
  }

  result.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

std::vector<int> predict(const Agent& agent,
                         const Eigen::Ref<const Matrix>& states) {
  const Matrix q = forward(agent.q_net, states);
  std::vector<int> actions(q.rows());
  for (long i = 0; i < q.rows(); ++i)
    actions[i] = static_cast<int>(argmax_index(q.row(i)));
  return actions;
}

}  // namespace rlsurv
