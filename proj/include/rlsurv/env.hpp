#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rlsurv/dataset.hpp"
#include "rlsurv/types.hpp"

namespace rlsurv {

/// Reward magnitudes. `balanced` pays +-lambda on FAILURE rows and +-1 on
/// NORMAL rows so that a constant-NORMAL policy cannot win on 200:1 data;
/// `unit` pays +-1 everywhere and exists for ablation.
enum class RewardScheme { balanced, unit };

struct EnvConfig {
  RewardScheme reward_scheme = RewardScheme::balanced;
  // <= 0 means derive n_majority / n_minority from the wrapped data.
  double minority_weight = 0.0;
  bool shuffle_each_episode = true;
  // <= 0 means one full pass over the wrapped data; larger values are clamped
  // to the data size.
  long episode_length = 0;
  std::uint64_t seed = 0;
};

/// Sign is + iff action == label; magnitude is lambda on FAILURE rows under
/// the balanced scheme, otherwise 1. cfg.minority_weight must already be
/// resolved (positive) when the balanced scheme is selected.
double reward_for(int action, int label, const EnvConfig& cfg);

/// Presents a labeled dataset as an episodic environment: one row per step,
/// actions are the two class labels, episodes are (by default) one full
/// shuffled pass over the data.
class ClassificationEnv {
 public:
  struct StepResult {
    double reward;
    Vector next_state;
    bool done;
  };

  ClassificationEnv(Dataset data, EnvConfig cfg);

  /// Starts a new episode (reshuffling row order if configured) and returns
  /// the first state.
  Vector reset();

  /// Classifies the current row. Advances the cursor; on the final row the
  /// returned next_state repeats that row and done is true.
  StepResult step(int action);

  bool in_episode() const { return in_episode_; }
  Vector current_state() const;
  int current_label() const;
  double minority_weight() const { return resolved_.minority_weight; }
  long episode_length() const { return episode_length_; }
  const Dataset& data() const { return data_; }

 private:
  Dataset data_;
  EnvConfig resolved_;
  long episode_length_ = 0;
  std::vector<long> ordering_;
  long cursor_ = 0;
  bool in_episode_ = false;
  std::mt19937_64 rng_;
};

}  // namespace rlsurv
