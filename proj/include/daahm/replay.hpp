#pragma once

#include <cstddef>
#include <vector>

#include <daahm/errors.hpp>
#include <daahm/rng.hpp>
#include <daahm/types.hpp>

namespace daahm {

struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool done = false;
};

// Bounded ring of transitions; push evicts the oldest entry once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw InvalidInput("ReplayBuffer: capacity must be positive");
    storage_.reserve(capacity);
  }

  void push(Transition transition) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(transition));
    } else {
      storage_[cursor_] = std::move(transition);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  // Uniform with replacement. Requires size() >= batch.
  std::vector<Transition> sample(std::size_t batch, Rng& rng) const {
    if (batch == 0) throw InvalidInput("ReplayBuffer: batch must be positive");
    if (storage_.size() < batch) {
      throw NotReady("ReplayBuffer: fewer stored transitions than the requested batch");
    }
    std::vector<Transition> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      out.push_back(storage_[static_cast<std::size_t>(
          rng.uniform_index(static_cast<Index>(storage_.size())))]);
    }
    return out;
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return storage_.at(i); }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace daahm
