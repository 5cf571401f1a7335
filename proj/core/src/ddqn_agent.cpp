#include "fbrl/ddqn_agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbrl {

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("agent: gamma must lie in (0, 1)");
  }
  if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0)) {
    throw std::invalid_argument("agent: need 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (epsilon_decay_steps <= 0) throw std::invalid_argument("agent: epsilon_decay_steps must be positive");
  if (learning_rate <= 0.0) throw std::invalid_argument("agent: learning_rate must be positive");
  if (target_sync_period <= 0) throw std::invalid_argument("agent: target_sync_period must be positive");
  if (hidden_dim <= 0) throw std::invalid_argument("agent: hidden_dim must be positive");
  if (batch_size <= 0) throw std::invalid_argument("agent: batch_size must be positive");
  if (huber_delta <= 0.0) throw std::invalid_argument("agent: huber_delta must be positive");
  if (warmup_samples < batch_size) {
    throw std::invalid_argument("agent: warmup_samples must cover at least one batch");
  }
}

namespace {

int argmax_first(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace

DdqnAgent::DdqnAgent(int state_dim, int action_count, AgentConfig config,
                     Rng& init_rng)
    : state_dim_(state_dim),
      action_count_(action_count),
      config_(config),
      online_(MlpNetwork::seeded(state_dim, config.hidden_dim, action_count,
                                 init_rng, config.optimizer)),
      target_(online_) {
  config_.validate();
}

double DdqnAgent::epsilon_at(long long env_step) const {
  if (env_step >= config_.epsilon_decay_steps || config_.epsilon_decay_steps == 0) {
    return config_.epsilon_end;
  }
  double frac = static_cast<double>(env_step) /
                static_cast<double>(config_.epsilon_decay_steps);
  return config_.epsilon_start +
         frac * (config_.epsilon_end - config_.epsilon_start);
}

int DdqnAgent::select_action(std::span<const double> state, Rng& rng) {
  double eps = epsilon_at(env_steps_);
  ++env_steps_;
  if (rng.bernoulli(eps)) {
    return rng.uniform_int(action_count_);
  }
  return greedy_action(state);
}

int DdqnAgent::greedy_action(std::span<const double> state) const {
  std::vector<double> q = online_.forward(state);
  return argmax_first(q);
}

void DdqnAgent::td_targets(const std::vector<Transition>& batch,
                           std::vector<double>& out) const {
  if (batch.empty()) throw std::invalid_argument("td_targets: empty batch");
  const std::size_t n = batch.size();
  std::vector<double> next_states(n * state_dim_);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(batch[i].next_state.begin(), batch[i].next_state.end(),
              next_states.begin() + i * state_dim_);
  }
  std::vector<double> q_online(n * action_count_), q_target(n * action_count_);
  online_.forward_batch(next_states, n, q_online);
  target_.forward_batch(next_states, n, q_target);

  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = batch[i];
    if (t.terminal) {
      out[i] = t.reward;
      continue;
    }
    std::span<const double> row_online(q_online.data() + i * action_count_,
                                       action_count_);
    int chosen = argmax_first(row_online);
    out[i] = t.reward +
             config_.gamma * q_target[i * action_count_ + chosen];
  }
}

double DdqnAgent::learn_step(const ReplayBuffer& buffer, Rng& rng) {
  if (buffer.total_appended() < static_cast<std::uint64_t>(config_.warmup_samples)) {
    throw InsufficientData("learn_step before warmup completed");
  }
  const std::size_t n = static_cast<std::size_t>(config_.batch_size);
  buffer.sample(n, rng, batch_);

  // Recompute flat next-state batch once; td_targets would duplicate it, so
  // inline the double-Q target here against the same scratch.
  states_.resize(n * state_dim_);
  next_states_.resize(n * state_dim_);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(batch_[i].state.begin(), batch_[i].state.end(),
              states_.begin() + i * state_dim_);
    std::copy(batch_[i].next_state.begin(), batch_[i].next_state.end(),
              next_states_.begin() + i * state_dim_);
  }
  q_next_online_.resize(n * action_count_);
  q_next_target_.resize(n * action_count_);
  online_.forward_batch(next_states_, n, q_next_online_);
  target_.forward_batch(next_states_, n, q_next_target_);
  targets_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = batch_[i];
    if (t.terminal) {
      targets_[i] = t.reward;
    } else {
      std::span<const double> row(q_next_online_.data() + i * action_count_,
                                  action_count_);
      int chosen = argmax_first(row);
      targets_[i] = t.reward + config_.gamma * q_next_target_[i * action_count_ + chosen];
    }
  }

  q_states_.resize(n * action_count_);
  online_.forward_batch(states_, n, q_states_);
  grads_.assign(n * action_count_, 0.0);
  double loss_sum = 0.0;
  const double delta = config_.huber_delta;
  for (std::size_t i = 0; i < n; ++i) {
    int a = batch_[i].action;
    double r = q_states_[i * action_count_ + a] - targets_[i];
    double abs_r = std::abs(r);
    if (abs_r <= delta) {
      loss_sum += 0.5 * r * r;
      grads_[i * action_count_ + a] = r;
    } else {
      loss_sum += delta * (abs_r - 0.5 * delta);
      grads_[i * action_count_ + a] = r > 0.0 ? delta : -delta;
    }
  }

  online_.train_step(states_, grads_, n, config_.learning_rate);
  ++learn_steps_;
  if (learn_steps_ % config_.target_sync_period == 0) sync_target();
  return loss_sum / static_cast<double>(n);
}

void DdqnAgent::sync_target() { target_ = online_; }

}  // namespace fbrl
