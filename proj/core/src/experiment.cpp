#include "fbrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fbrl {

void ExperimentConfig::validate() const {
  env.validate();
  agent.validate();
  if (imagination) {
    imagination->validate();
    model.validate();
    if (env.kind == EnvKind::hanoi && model.variant != DeltaVariant::categorical) {
      throw std::invalid_argument("config: hanoi expects the categorical model variant");
    }
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (total_episodes < 1) throw std::invalid_argument("config: total_episodes must be >= 1");
  if (buffer_capacity < static_cast<std::size_t>(agent.batch_size)) {
    throw std::invalid_argument("config: buffer_capacity smaller than batch_size");
  }
  if (static_cast<std::size_t>(agent.warmup_samples) > buffer_capacity) {
    throw std::invalid_argument("config: warmup_samples exceed buffer_capacity");
  }
  if (parallel_trials < 0) throw std::invalid_argument("config: parallel_trials must be >= 0");
}

ExperimentConfig make_default_config(EnvKind kind, int size, bool fbrl) {
  ExperimentConfig config;
  config.env.kind = kind;
  config.env.size = size;
  if (kind == EnvKind::gridworld) {
    config.env.horizon = 10 * size;
    config.agent.learning_rate = fbrl ? 5e-3 : 1e-3;
    config.agent.target_sync_period = 100;
    config.model.variant = DeltaVariant::continuous;
    config.total_episodes = 500;
    if (fbrl) config.imagination = ImaginationConfig{10, 1, ImaginationStrategy::mixed, 0.5};
  } else {
    config.env.horizon = 50 * (size - 1);
    config.agent.learning_rate = fbrl ? 1e-4 : 5e-4;
    config.agent.target_sync_period = 500;
    config.model.variant = DeltaVariant::categorical;
    config.total_episodes = 1000;
    if (fbrl) config.imagination = ImaginationConfig{5, 3, ImaginationStrategy::mixed, 0.5};
  }
  config.agent.epsilon_decay_steps = derived_epsilon_decay_steps(config);
  return config;
}

long long derived_epsilon_decay_steps(const ExperimentConfig& config) {
  return std::llround(0.2 * static_cast<double>(config.total_episodes) *
                      static_cast<double>(config.env.horizon));
}

namespace {

// Uniform real-only batch via rejection from the shared buffer. Unthrottled
// imagination can temporarily crowd real entries out entirely; report failure
// instead of spinning and let the caller skip that model update.
bool sample_real_batch(const ReplayBuffer& buffer, std::size_t batch_size,
                       Rng& rng, std::vector<Transition>& chunk,
                       std::vector<Transition>& out) {
  out.clear();
  std::size_t attempts = 0;
  const std::size_t attempt_cap = 1000 * batch_size;
  while (out.size() < batch_size) {
    buffer.sample(batch_size, rng, chunk);
    for (Transition& t : chunk) {
      if (!t.imagined) {
        out.push_back(std::move(t));
        if (out.size() == batch_size) break;
      }
    }
    attempts += batch_size;
    if (attempts >= attempt_cap && out.size() < batch_size) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

LearningCurve run_trial(const ExperimentConfig& config, int trial_index) {
  config.validate();
  const std::uint64_t root_seed = config.seed + static_cast<std::uint64_t>(trial_index);
  Rng init_rng = Rng::substream(root_seed, "init");
  Rng env_rng = Rng::substream(root_seed, "env");
  Rng agent_rng = Rng::substream(root_seed, "agent");

  const EnvironmentSpec& env = config.env;
  DdqnAgent agent(env.state_dim(), env.action_count(), config.agent, init_rng);
  ReplayBuffer buffer(config.buffer_capacity);

  std::optional<BackwardModel> model;
  std::optional<ImaginationEngine> engine;
  SnapshotHolder snapshots;
  if (config.is_fbrl()) {
    model.emplace(env.state_dim(), env.action_count(), env.value_range(),
                  config.model, init_rng);
    engine.emplace(env, *config.imagination, root_seed);
  }

  LearningCurve curve;
  curve.episodes.reserve(config.total_episodes);

  // Warmup: uniform random policy, no learning, exactly warmup_samples stored.
  long long collected = 0;
  while (collected < config.agent.warmup_samples) {
    StateVector state = reset(env);
    for (int t = 0; t < env.horizon && collected < config.agent.warmup_samples; ++t) {
      int action = env_rng.uniform_int(env.action_count());
      StepResult r = step(env, state, action);
      buffer.append(Transition{state, action, r.reward, r.next_state, r.terminal, false});
      ++collected;
      bool done = r.terminal;
      state = std::move(r.next_state);
      if (done) break;
    }
  }
  curve.warmup_env_steps = collected;

  if (config.is_fbrl()) {
    snapshots.publish(ModelSnapshots{agent.online(), *model});
    if (!config.deterministic_mode) engine->start(snapshots, buffer);
  }

  std::vector<Transition> real_chunk, real_batch;
  for (long long episode = 0; episode < config.total_episodes; ++episode) {
    StateVector state = reset(env);
    double episode_return = 0.0;
    double td_sum = 0.0, model_sum = 0.0;
    long long steps = 0, model_updates = 0;

    for (int t = 0; t < env.horizon; ++t) {
      int action = agent.select_action(state, agent_rng);
      StepResult r = step(env, state, action);
      buffer.append(Transition{state, action, r.reward, r.next_state, r.terminal, false});
      episode_return += r.reward;
      ++steps;
      ++curve.training_env_steps;

      td_sum += agent.learn_step(buffer, agent_rng);
      if (config.is_fbrl()) {
        if (sample_real_batch(buffer,
                              static_cast<std::size_t>(config.model.batch_size),
                              agent_rng, real_chunk, real_batch)) {
          model_sum += model->train(real_batch);
          ++model_updates;
        }
        if (agent.learn_steps() % config.agent.target_sync_period == 0) {
          snapshots.publish(ModelSnapshots{agent.online(), *model});
        }
        if (config.deterministic_mode) engine->run_once(snapshots, buffer);
      }

      bool done = r.terminal;
      state = std::move(r.next_state);
      if (done) {
        if (curve.first_goal_episode < 0) curve.first_goal_episode = episode;
        break;
      }
    }

    EpisodeRecord record;
    record.trial = trial_index;
    record.episode = episode;
    record.undiscounted_return = episode_return;
    record.env_steps = curve.training_env_steps;
    record.epsilon = agent.current_epsilon();
    record.td_loss = steps > 0 ? td_sum / static_cast<double>(steps) : 0.0;
    if (config.is_fbrl()) {
      record.has_backward_loss = true;
      record.backward_loss =
          model_updates > 0 ? model_sum / static_cast<double>(model_updates) : 0.0;
    }
    curve.episodes.push_back(record);
  }

  if (engine && engine->running()) engine->stop();
  curve.imagined_transitions = buffer.imagined_appended();
  return curve;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.trials.resize(config.trials);

  int workers = config.parallel_trials == 0
                    ? static_cast<int>(std::thread::hardware_concurrency())
                    : config.parallel_trials;
  workers = std::clamp(workers, 1, config.trials);

  std::vector<std::string> failures(config.trials);
  if (workers <= 1) {
    for (int i = 0; i < config.trials; ++i) {
      try {
        result.trials[i] = run_trial(config, i);
      } catch (const std::exception& e) {
        throw std::runtime_error("trial " + std::to_string(i) + " failed: " + e.what());
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          int i = next.fetch_add(1);
          if (i >= config.trials) return;
          try {
            result.trials[i] = run_trial(config, i);
          } catch (const std::exception& e) {
            failures[i] = e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (int i = 0; i < config.trials; ++i) {
      if (!failures[i].empty()) {
        throw std::runtime_error("trial " + std::to_string(i) + " failed: " + failures[i]);
      }
    }
  }

  if (!config.output_path.empty()) {
    std::filesystem::create_directories(config.output_path);
    write_raw_csv(config.output_path + "/trials.csv", result);
    write_mean_csv(config.output_path + "/mean.csv", result);
  }
  return result;
}

std::vector<MeanPoint> mean_curve(const ExperimentResult& result) {
  const std::size_t episodes = result.trials.empty() ? 0 : result.trials.front().episodes.size();
  const std::size_t trials = result.trials.size();
  std::vector<MeanPoint> curve(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    double sum = 0.0;
    for (const LearningCurve& t : result.trials) {
      sum += t.episodes[e].undiscounted_return;
    }
    double mean = sum / static_cast<double>(trials);
    double sq = 0.0;
    for (const LearningCurve& t : result.trials) {
      double d = t.episodes[e].undiscounted_return - mean;
      sq += d * d;
    }
    double stderr_ = trials > 1
        ? std::sqrt(sq / static_cast<double>(trials - 1)) / std::sqrt(static_cast<double>(trials))
        : 0.0;
    curve[e] = MeanPoint{static_cast<long long>(e), mean, stderr_};
  }
  return curve;
}

double area_under_curve(const std::vector<MeanPoint>& curve) {
  double auc = 0.0;
  for (const MeanPoint& p : curve) auc += p.mean_return;
  return auc;
}

double final_window_mean(const LearningCurve& curve, std::size_t window) {
  if (curve.episodes.empty()) return 0.0;
  std::size_t n = std::min(window, curve.episodes.size());
  double sum = 0.0;
  for (std::size_t i = curve.episodes.size() - n; i < curve.episodes.size(); ++i) {
    sum += curve.episodes[i].undiscounted_return;
  }
  return sum / static_cast<double>(n);
}

double final_window_mean(const ExperimentResult& result, std::size_t window) {
  double sum = 0.0;
  for (const LearningCurve& t : result.trials) sum += final_window_mean(t, window);
  return result.trials.empty() ? 0.0 : sum / static_cast<double>(result.trials.size());
}

long long median_first_goal_episode(const ExperimentResult& result) {
  std::vector<long long> firsts;
  firsts.reserve(result.trials.size());
  for (const LearningCurve& t : result.trials) {
    // never reached counts as the full budget
    firsts.push_back(t.first_goal_episode >= 0 ? t.first_goal_episode
                                               : result.config.total_episodes);
  }
  std::sort(firsts.begin(), firsts.end());
  return firsts[firsts.size() / 2];
}

void write_raw_csv(const std::string& path, const ExperimentResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "trial,episode,return,env_steps,epsilon,td_loss,backward_loss\n";
  for (const LearningCurve& trial : result.trials) {
    for (const EpisodeRecord& r : trial.episodes) {
      out << r.trial << ',' << r.episode << ',' << format_double(r.undiscounted_return)
          << ',' << r.env_steps << ',' << format_double(r.epsilon) << ','
          << format_double(r.td_loss) << ',';
      if (r.has_backward_loss) out << format_double(r.backward_loss);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_mean_csv(const std::string& path, const ExperimentResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "episode,mean_return,stderr_return\n";
  for (const MeanPoint& p : mean_curve(result)) {
    out << p.episode << ',' << format_double(p.mean_return) << ','
        << format_double(p.stderr_return) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<MeanPoint> read_mean_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<MeanPoint> curve;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MeanPoint p;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    p.episode = std::stoll(field);
    std::getline(row, field, ',');
    p.mean_return = std::stod(field);
    std::getline(row, field, ',');
    p.stderr_return = std::stod(field);
    curve.push_back(p);
  }
  return curve;
}

}  // namespace fbrl
