#pragma once

#include <optional>
#include <string>

#include "fbrl/backward_model.hpp"
#include "fbrl/ddqn_agent.hpp"
#include "fbrl/environment.hpp"
#include "fbrl/imagination.hpp"

namespace fbrl {

// Full description of one experiment: environment, learner, and (for the
// forward-backward method) the backward model and imagination settings. An
// absent imagination block selects the plain DDQN baseline.
struct ExperimentConfig {
  EnvironmentSpec env;
  AgentConfig agent;
  BackwardModelConfig model;
  std::optional<ImaginationConfig> imagination;
  std::size_t buffer_capacity = 10000;
  int trials = 10;
  long long total_episodes = 500;
  std::uint64_t seed = 1;
  bool deterministic_mode = true;
  std::string output_path;
  // 0 = one worker per hardware thread.
  int parallel_trials = 1;

  bool is_fbrl() const { return imagination.has_value(); }
  void validate() const;
};

// Published presets: Gridworld horizon 10n, DDQN lr 1e-3 / FBRL lr 5e-3,
// target sync 100, imagination 10 steps x 1 stream; Hanoi horizon 50(n-1),
// DDQN lr 5e-4 / FBRL lr 1e-4, target sync 500, imagination 5 steps x 3
// streams. Shared: gamma .99, epsilon 1 -> .1, batch 100, replay 10000,
// 10000 warmup samples, agent hidden 32, model hidden 100.
ExperimentConfig make_default_config(EnvKind kind, int size, bool fbrl);

// Epsilon decays linearly over the first 20% of the configured env steps.
long long derived_epsilon_decay_steps(const ExperimentConfig& config);

struct EpisodeRecord {
  int trial = 0;
  long long episode = 0;
  double undiscounted_return = 0.0;
  long long env_steps = 0;  // cumulative training env steps at episode end
  double epsilon = 0.0;
  double td_loss = 0.0;  // mean over the episode's learn steps
  bool has_backward_loss = false;
  double backward_loss = 0.0;
};

struct LearningCurve {
  std::vector<EpisodeRecord> episodes;
  long long training_env_steps = 0;
  long long warmup_env_steps = 0;
  std::uint64_t imagined_transitions = 0;
  long long first_goal_episode = -1;  // -1 = goal never reached
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<LearningCurve> trials;
};

// One full training run with the trial's derived seed (config.seed + index):
// warmup collection under a uniform random policy, then episodic training
// with one learn step per env step, backward-model updates and imagination
// when configured. Exactly reproducible in deterministic mode.
LearningCurve run_trial(const ExperimentConfig& config, int trial_index);

// All trials; writes trials.csv and mean.csv under output_path when set.
// A failing trial aborts the experiment, it is never silently averaged away.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct MeanPoint {
  long long episode = 0;
  double mean_return = 0.0;
  double stderr_return = 0.0;
};

std::vector<MeanPoint> mean_curve(const ExperimentResult& result);

// Analysis helpers shared by the CLI and the acceptance checks.
double area_under_curve(const std::vector<MeanPoint>& curve);
double final_window_mean(const LearningCurve& curve, std::size_t window);
double final_window_mean(const ExperimentResult& result, std::size_t window);
long long median_first_goal_episode(const ExperimentResult& result);

// CSV layout: trials.csv columns trial,episode,return,env_steps,epsilon,
// td_loss,backward_loss (backward_loss blank for the baseline); mean.csv
// columns episode,mean_return,stderr_return. UTF-8, header row, '.' decimals.
void write_raw_csv(const std::string& path, const ExperimentResult& result);
void write_mean_csv(const std::string& path, const ExperimentResult& result);
std::vector<MeanPoint> read_mean_csv(const std::string& path);

}  // namespace fbrl
