#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rlsurv/types.hpp"

namespace rlsurv {

/// One stored interaction: (state, action, reward, next state) plus a flag
/// marking the final transition of an episode.
struct Transition {
  Vector state;
  int action = 0;  // 0 = NORMAL, 1 = FAILURE
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;
};

/// Fixed-capacity FIFO ring of transitions with seeded uniform sampling
/// (with replacement). Single-writer, single-reader.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000, std::uint64_t seed = 0);

  /// Validates and stores a transition, evicting the oldest when full.
  void push(const Transition& t);

  bool ready(std::size_t batch_size) const { return size() >= batch_size; }

  /// Uniform sample of batch_size transitions, with replacement.
  /// Throws NotReadyError while size() < batch_size.
  std::vector<Transition> sample(std::size_t batch_size);

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// Stored transitions oldest-first. Test and inspection hook.
  std::vector<Transition> contents() const;

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t write_index_ = 0;
  int feature_dim_ = -1;  // learned from the first push
  std::mt19937_64 rng_;
};

}  // namespace rlsurv
