#pragma once

#include <string>

#include "rlsurv/agent.hpp"
#include "rlsurv/ann.hpp"
#include "rlsurv/nn.hpp"

namespace rlsurv {

// Checkpoints are JSON documents. Every real number is stored as the shortest
// decimal string that parses back to the same double, so a save/load cycle
// reproduces parameters bit for bit. Field layout is documented in README.md.

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& text);
std::string optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& text);
std::string loss_name(LossKind k);
LossKind parse_loss(const std::string& text);
std::string schedule_name(EpsilonSchedule s);
EpsilonSchedule parse_schedule(const std::string& text);
std::string weighting_name(ClassWeighting w);
ClassWeighting parse_weighting(const std::string& text);
std::string reward_scheme_name(RewardScheme s);
RewardScheme parse_reward_scheme(const std::string& text);

/// Bare network + optimizer kind ("model" document).
void save_model(const Mlp& net, OptimizerKind optimizer,
                const std::string& path);

struct ModelFile {
  Mlp net;
  OptimizerKind optimizer = OptimizerKind::adam;
};
ModelFile load_model(const std::string& path);

/// Model document extended with the agent's config echo and step counter.
/// Only the online network is stored; the target network is reconstructed as
/// a copy on load, which matches its state after any completed training run.
void save_agent_checkpoint(const Agent& agent, const std::string& path);

struct AgentCheckpoint {
  AgentConfig config;
  Mlp q_net;
  long step_count = 0;
};
AgentCheckpoint load_agent_checkpoint(const std::string& path);

/// Rebuilds a usable agent (fresh replay/rng, synced target) from a
/// checkpoint, preserving the stored parameters and step count.
Agent restore_agent(const AgentCheckpoint& cp);

/// Model document extended with the supervised net's config echo and its
/// optimizer update counter.
void save_ann_checkpoint(const Mlp& net, const AnnConfig& config,
                         long update_count, const std::string& path);

struct AnnCheckpoint {
  AnnConfig config;
  Mlp net;
  long update_count = 0;
};
AnnCheckpoint load_ann_checkpoint(const std::string& path);

}  // namespace rlsurv
