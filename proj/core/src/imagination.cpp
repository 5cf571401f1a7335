#include "fbrl/imagination.hpp"

#include <stdexcept>
#include <string>

namespace fbrl {

void ImaginationConfig::validate() const {
  if (steps_per_rollout < 1) throw std::invalid_argument("imagination: need K >= 1");
  if (stream_count < 1) throw std::invalid_argument("imagination: need at least one stream");
  if (!(p_random >= 0.0 && p_random <= 1.0)) {
    throw std::invalid_argument("imagination: p_random outside [0, 1]");
  }
}

void SnapshotHolder::publish(ModelSnapshots snapshots) {
  auto fresh = std::make_shared<const ModelSnapshots>(std::move(snapshots));
  std::lock_guard lock(mutex_);
  current_ = std::move(fresh);
}

std::shared_ptr<const ModelSnapshots> SnapshotHolder::acquire() const {
  std::lock_guard lock(mutex_);
  return current_;
}

int sample_imagination_action(ImaginationStrategy strategy, double p_random,
                              std::span<const double> next_state,
                              const MlpNetwork& q_snapshot,
                              const BackwardModel& model_snapshot, Rng& rng) {
  const int actions = model_snapshot.action_count();
  bool go_random = strategy == ImaginationStrategy::random ||
                   (strategy == ImaginationStrategy::mixed && rng.bernoulli(p_random));
  if (go_random) {
    return rng.uniform_int(actions);
  }
  int best = 0;
  double best_q = 0.0;
  for (int a = 0; a < actions; ++a) {
    StateVector candidate = model_snapshot.predict_previous(next_state, a, rng);
    double q = q_snapshot.forward(candidate)[a];
    if (a == 0 || q > best_q) {
      best = a;
      best_q = q;
    }
  }
  return best;
}

std::vector<Transition> backward_rollout(const EnvironmentSpec& env,
                                         const ImaginationConfig& config,
                                         const MlpNetwork& q_snapshot,
                                         const BackwardModel& model_snapshot,
                                         Rng& rng) {
  config.validate();
  std::vector<Transition> rollout;
  rollout.reserve(config.steps_per_rollout);

  StateVector head = sample_goal(env, rng);
  for (int i = 0; i < config.steps_per_rollout; ++i) {
    int action = sample_imagination_action(config.strategy, config.p_random,
                                           head, q_snapshot, model_snapshot, rng);
    double reward = reward_query(env, head);
    StateVector previous = model_snapshot.predict_previous(head, action, rng);
    rollout.push_back(Transition{previous, action, reward, head,
                                 is_goal(env, head), /*imagined=*/true});
    head = std::move(previous);
  }
  return rollout;
}

ImaginationEngine::ImaginationEngine(EnvironmentSpec env,
                                     ImaginationConfig config,
                                     std::uint64_t root_seed)
    : env_(std::move(env)), config_(config) {
  config_.validate();
  stream_rngs_.reserve(config_.stream_count);
  for (int i = 0; i < config_.stream_count; ++i) {
    stream_rngs_.push_back(
        Rng::substream(root_seed, "imagination/" + std::to_string(i)));
  }
}

ImaginationEngine::~ImaginationEngine() { stop(); }

void ImaginationEngine::run_once(const SnapshotHolder& snapshots,
                                 ReplayBuffer& buffer) {
  auto snap = snapshots.acquire();
  if (!snap) throw std::runtime_error("imagination: no snapshot published");
  for (int i = 0; i < config_.stream_count; ++i) {
    for (Transition& t :
         backward_rollout(env_, config_, snap->q, snap->model, stream_rngs_[i])) {
      buffer.append(std::move(t));
    }
    rollouts_.fetch_add(1, std::memory_order_relaxed);
  }
}

void ImaginationEngine::start(const SnapshotHolder& snapshots,
                              ReplayBuffer& buffer) {
  if (running_.exchange(true)) return;
  threads_.reserve(config_.stream_count);
  for (int i = 0; i < config_.stream_count; ++i) {
    threads_.emplace_back(&ImaginationEngine::stream_loop, this, i,
                          std::cref(snapshots), std::ref(buffer));
  }
}

void ImaginationEngine::stop() {
  running_.store(false);
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
}

void ImaginationEngine::stream_loop(int stream_index,
                                    const SnapshotHolder& snapshots,
                                    ReplayBuffer& buffer) {
  Rng& rng = stream_rngs_[stream_index];
  while (running_.load(std::memory_order_relaxed)) {
    auto snap = snapshots.acquire();
    if (!snap) {
      std::this_thread::yield();
      continue;
    }
    for (Transition& t :
         backward_rollout(env_, config_, snap->q, snap->model, rng)) {
      buffer.append(std::move(t));
    }
    rollouts_.fetch_add(1, std::memory_order_relaxed);
  }
}

}  // namespace fbrl
