#include "rlsurv/env.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rlsurv {

double reward_for(int action, int label, const EnvConfig& cfg) {
  if (action != 0 && action != 1) throw std::invalid_argument("action must be 0 or 1");
  if (label != 0 && label != 1) throw std::invalid_argument("label must be 0 or 1");
  double magnitude = 1.0;
  if (cfg.reward_scheme == RewardScheme::balanced && label == 1) {
    if (cfg.minority_weight <= 0.0) {
      throw std::invalid_argument("balanced rewards need a resolved minority weight");
    }
    magnitude = cfg.minority_weight;
  }
  return action == label ? magnitude : -magnitude;
}

ClassificationEnv::ClassificationEnv(Dataset data, EnvConfig cfg)
    : data_(std::move(data)), resolved_(cfg), rng_(cfg.seed) {
  if (data_.size() == 0) throw std::invalid_argument("environment needs a non-empty dataset");

  if (resolved_.reward_scheme == RewardScheme::balanced &&
      resolved_.minority_weight <= 0.0) {
    const long minority = data_.count_label(1);
    if (minority == 0) {
      throw std::invalid_argument(
          "balanced rewards are undefined without minority rows; "
          "pass an explicit minority_weight or use the unit scheme");
    }
    const double ratio =
        static_cast<double>(data_.count_label(0)) / static_cast<double>(minority);
    resolved_.minority_weight = std::max(1.0, ratio);
  }

  const long n = static_cast<long>(data_.size());
  episode_length_ = resolved_.episode_length <= 0
                        ? n
                        : std::min(resolved_.episode_length, n);

  ordering_.resize(n);
  std::iota(ordering_.begin(), ordering_.end(), 0);
}

Vector ClassificationEnv::reset() {
  if (resolved_.shuffle_each_episode) {
    std::shuffle(ordering_.begin(), ordering_.end(), rng_);
  }
  cursor_ = 0;
  in_episode_ = true;
  return current_state();
}

Vector ClassificationEnv::current_state() const {
  if (!in_episode_) throw std::logic_error("no active episode; call reset() first");
  return data_.features.row(ordering_[cursor_]).transpose();
}

int ClassificationEnv::current_label() const {
  if (!in_episode_) throw std::logic_error("no active episode; call reset() first");
  return data_.labels[ordering_[cursor_]];
}

ClassificationEnv::StepResult ClassificationEnv::step(int action) {
  if (!in_episode_) throw std::logic_error("episode is over; call reset() first");

  StepResult out;
  out.reward = reward_for(action, current_label(), resolved_);
  if (cursor_ + 1 < episode_length_) {
    ++cursor_;
    out.next_state = current_state();
    out.done = false;
  } else {
    // Episode exhausted: repeat the final row as the (unused) successor state.
    out.next_state = current_state();
    out.done = true;
    in_episode_ = false;
  }
  return out;
}

}  // namespace rlsurv
