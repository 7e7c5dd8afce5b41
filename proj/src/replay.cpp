#include "rlsurv/replay.hpp"

#include <cmath>
#include <stdexcept>

#include "rlsurv/errors.hpp"

namespace rlsurv {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
  storage_.reserve(capacity_);
}

void ReplayBuffer::push(const Transition& t) {
  if (t.action != 0 && t.action != 1) {
    throw std::invalid_argument("transition action must be 0 or 1");
  }
  if (!std::isfinite(t.reward)) {
    throw std::invalid_argument("transition reward must be finite");
  }
  if (t.state.size() == 0 || t.state.size() != t.next_state.size()) {
    throw std::invalid_argument("transition state/next_state sizes must match");
  }
  if (feature_dim_ < 0) {
    feature_dim_ = static_cast<int>(t.state.size());
  } else if (t.state.size() != feature_dim_) {
    throw std::invalid_argument("transition state width differs from buffer contents");
  }

  if (storage_.size() < capacity_) {
    storage_.push_back(t);
  } else {
    storage_[write_index_] = t;
  }
  write_index_ = (write_index_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!ready(batch_size)) {
    throw NotReadyError("replay buffer holds " + std::to_string(size()) +
                        " transitions, need " + std::to_string(batch_size));
  }
  std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    batch.push_back(storage_[pick(rng_)]);
  }
  return batch;
}

std::vector<Transition> ReplayBuffer::contents() const {
  std::vector<Transition> out;
  out.reserve(storage_.size());
  if (storage_.size() < capacity_) {
    out = storage_;
  } else {
    // write_index_ points at the oldest entry once the ring is full.
    for (std::size_t i = 0; i < capacity_; ++i) {
      out.push_back(storage_[(write_index_ + i) % capacity_]);
    }
  }
  return out;
}

}  // namespace rlsurv
