#pragma once

#include "fbrl/mlp.hpp"
#include "fbrl/replay_buffer.hpp"
#include "fbrl/rng.hpp"

namespace fbrl {

struct AgentConfig {
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  long long epsilon_decay_steps = 10000;  // linear decay horizon in env steps
  double learning_rate = 1e-3;
  long long target_sync_period = 100;  // counted in learn steps
  int hidden_dim = 32;
  long long warmup_samples = 10000;
  int batch_size = 100;
  double huber_delta = 1.0;
  Optimizer optimizer = Optimizer::adam;

  void validate() const;
};

// Double DQN learner. The online network is trained; the target network is a
// periodic parameter snapshot used only to evaluate TD targets. Action
// selection for the target uses the online argmax (double-Q decoupling).
//
// Single writer: the forward training loop owns the agent. Imagination
// streams work from copies of the online network taken via online().
class DdqnAgent {
 public:
  DdqnAgent(int state_dim, int action_count, AgentConfig config, Rng& init_rng);

  // Epsilon-greedy over online Q-values; advances the env-step counter that
  // drives the epsilon schedule. Ties break to the lowest action index.
  int select_action(std::span<const double> state, Rng& rng);

  int greedy_action(std::span<const double> state) const;

  // Linear interpolation from epsilon_start to epsilon_end over
  // epsilon_decay_steps env steps, constant afterwards.
  double epsilon_at(long long env_step) const;
  double current_epsilon() const { return epsilon_at(env_steps_); }

  // y = r for terminal transitions, else
  // y = r + gamma * Q_target(s', argmax_a Q_online(s', a)).
  void td_targets(const std::vector<Transition>& batch,
                  std::vector<double>& out) const;

  // Samples one batch, takes one Huber TD step on the online network, and
  // synchronizes the target every target_sync_period learn steps. Returns the
  // mean Huber loss over the batch. Throws InsufficientData until the buffer
  // has seen warmup_samples transitions.
  double learn_step(const ReplayBuffer& buffer, Rng& rng);

  void sync_target();

  const MlpNetwork& online() const { return online_; }
  const MlpNetwork& target() const { return target_; }
  // For checkpoint restore and for tests that pin exact Q-values.
  MlpNetwork& mutable_online() { return online_; }
  MlpNetwork& mutable_target() { return target_; }
  const AgentConfig& config() const { return config_; }
  int action_count() const { return action_count_; }
  long long env_steps() const { return env_steps_; }
  long long learn_steps() const { return learn_steps_; }

 private:
  int state_dim_;
  int action_count_;
  AgentConfig config_;
  MlpNetwork online_;
  MlpNetwork target_;
  long long env_steps_ = 0;
  long long learn_steps_ = 0;

  // scratch reused across learn steps
  std::vector<Transition> batch_;
  std::vector<double> states_, next_states_, q_next_online_, q_next_target_,
      q_states_, targets_, grads_;
};

}  // namespace fbrl
