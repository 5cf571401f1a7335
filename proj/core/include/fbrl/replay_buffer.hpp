#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fbrl/environment.hpp"
#include "fbrl/rng.hpp"

namespace fbrl {

// One stored experience. Real and imagined transitions share the type; the
// imagined flag is diagnostic only and invisible to samplers.
struct Transition {
  StateVector state;
  int action = 0;
  double reward = 0.0;
  StateVector next_state;
  bool terminal = false;
  bool imagined = false;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bounded FIFO store with uniform with-replacement sampling. Appends and
// samples may arrive concurrently from the forward loop and imagination
// streams; a single mutex makes every operation appear atomic. Used from one
// thread it is fully deterministic.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Stores the transition, evicting the oldest entry once at capacity.
  void append(Transition t);

  // batch_size entries drawn uniformly with replacement. Throws
  // InsufficientData while fewer than batch_size entries are stored.
  std::vector<Transition> sample(std::size_t batch_size, Rng& rng) const;
  // Same, reusing out's storage across calls.
  void sample(std::size_t batch_size, Rng& rng, std::vector<Transition>& out) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

  // Lifetime counters, for diagnostics and the imagination accounting checks.
  std::uint64_t total_appended() const;
  std::uint64_t imagined_appended() const;
  std::size_t imagined_stored() const;

 private:
  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::vector<Transition> entries_;  // ring once full
  std::size_t next_slot_ = 0;
  std::uint64_t total_appended_ = 0;
  std::uint64_t imagined_appended_ = 0;
  std::size_t imagined_stored_ = 0;
};

}  // namespace fbrl
