#pragma once

#include <atomic>
#include <memory>
#include <thread>

#include "fbrl/backward_model.hpp"
#include "fbrl/ddqn_agent.hpp"
#include "fbrl/environment.hpp"
#include "fbrl/replay_buffer.hpp"

namespace fbrl {

enum class ImaginationStrategy { random, greedy, mixed };

struct ImaginationConfig {
  int steps_per_rollout = 10;  // K
  int stream_count = 1;
  ImaginationStrategy strategy = ImaginationStrategy::mixed;
  double p_random = 0.5;  // mixed only

  void validate() const;
};

// Immutable parameter snapshots used by imagination streams; the forward loop
// publishes fresh copies on its target-sync cadence.
struct ModelSnapshots {
  MlpNetwork q;
  BackwardModel model;
};

class SnapshotHolder {
 public:
  void publish(ModelSnapshots snapshots);
  std::shared_ptr<const ModelSnapshots> acquire() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const ModelSnapshots> current_;
};

// Action choice for one backward step. random: uniform. greedy: for each
// candidate action a, reconstruct the candidate predecessor s_hat(a) and pick
// argmax_a Q(s_hat(a), a), first-index tie-break. mixed: random with
// probability p_random, else greedy.
int sample_imagination_action(ImaginationStrategy strategy, double p_random,
                              std::span<const double> next_state,
                              const MlpNetwork& q_snapshot,
                              const BackwardModel& model_snapshot, Rng& rng);

// One reverse rollout of exactly K transitions starting from a sampled goal
// state: repeatedly pick an action, take the reward at the current chain head,
// reconstruct a predecessor, and emit the transition, so transition i's
// next_state equals transition i-1's state. Every emitted transition is
// flagged imagined; terminal is set exactly when its next_state satisfies the
// goal predicate (always true for the first).
std::vector<Transition> backward_rollout(const EnvironmentSpec& env,
                                         const ImaginationConfig& config,
                                         const MlpNetwork& q_snapshot,
                                         const BackwardModel& model_snapshot,
                                         Rng& rng);

// Runs the configured streams. In deterministic mode the owner calls
// run_once() at a fixed point between forward environment steps and each
// stream contributes exactly one rollout. In asynchronous mode start() spawns
// one free-running thread per stream; rollout rate is unthrottled.
class ImaginationEngine {
 public:
  ImaginationEngine(EnvironmentSpec env, ImaginationConfig config,
                    std::uint64_t root_seed);
  ~ImaginationEngine();

  ImaginationEngine(const ImaginationEngine&) = delete;
  ImaginationEngine& operator=(const ImaginationEngine&) = delete;

  // One rollout per stream, inline, in stream order.
  void run_once(const SnapshotHolder& snapshots, ReplayBuffer& buffer);

  void start(const SnapshotHolder& snapshots, ReplayBuffer& buffer);
  void stop();
  bool running() const { return running_.load(); }

  std::uint64_t rollouts_completed() const { return rollouts_.load(); }

 private:
  void stream_loop(int stream_index, const SnapshotHolder& snapshots,
                   ReplayBuffer& buffer);

  EnvironmentSpec env_;
  ImaginationConfig config_;
  std::vector<Rng> stream_rngs_;
  std::vector<std::thread> threads_;
  std::atomic<bool> running_{false};
  std::atomic<std::uint64_t> rollouts_{0};
};

}  // namespace fbrl
