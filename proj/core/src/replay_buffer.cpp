#include "fbrl/replay_buffer.hpp"

namespace fbrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  entries_.reserve(capacity);
}

void ReplayBuffer::append(Transition t) {
  std::lock_guard lock(mutex_);
  ++total_appended_;
  if (t.imagined) ++imagined_appended_;
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(t));
    if (entries_.back().imagined) ++imagined_stored_;
  } else {
    Transition& slot = entries_[next_slot_];
    if (slot.imagined) --imagined_stored_;
    if (t.imagined) ++imagined_stored_;
    slot = std::move(t);
    next_slot_ = (next_slot_ + 1) % capacity_;
  }
}

void ReplayBuffer::sample(std::size_t batch_size, Rng& rng,
                          std::vector<Transition>& out) const {
  std::lock_guard lock(mutex_);
  if (entries_.size() < batch_size) {
    throw InsufficientData("replay buffer holds " +
                           std::to_string(entries_.size()) +
                           " transitions, need " + std::to_string(batch_size));
  }
  out.resize(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    out[i] = entries_[rng.uniform_index(entries_.size())];
  }
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size,
                                             Rng& rng) const {
  std::vector<Transition> out;
  sample(batch_size, rng, out);
  return out;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::uint64_t ReplayBuffer::total_appended() const {
  std::lock_guard lock(mutex_);
  return total_appended_;
}

std::uint64_t ReplayBuffer::imagined_appended() const {
  std::lock_guard lock(mutex_);
  return imagined_appended_;
}

std::size_t ReplayBuffer::imagined_stored() const {
  std::lock_guard lock(mutex_);
  return imagined_stored_;
}

}  // namespace fbrl
