#include "fbrl/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fbrl {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");
    }
    if (entries.count(key)) {
      throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
    entries[key] = value;
  }

  auto take = [&entries](const std::string& key) -> std::string {
    auto it = entries.find(key);
    if (it == entries.end()) {
      throw std::invalid_argument("config: missing required key '" + key + "'");
    }
    std::string v = it->second;
    entries.erase(it);
    return v;
  };

  std::string env_name = take("environment");
  EnvKind kind;
  if (env_name == "gridworld") kind = EnvKind::gridworld;
  else if (env_name == "hanoi") kind = EnvKind::hanoi;
  else bad_value("environment", env_name);

  int size = static_cast<int>(parse_int("size", take("size")));
  std::string method = take("method");
  bool fbrl;
  if (method == "fbrl") fbrl = true;
  else if (method == "ddqn") fbrl = false;
  else bad_value("method", method);

  ExperimentConfig config = make_default_config(kind, size, fbrl);
  bool decay_explicit = false;
  bool episodes_or_horizon_changed = false;

  for (auto it = entries.begin(); it != entries.end(); it = entries.erase(it)) {
    const std::string& key = it->first;
    const std::string& value = it->second;
    if (key == "horizon") {
      config.env.horizon = static_cast<int>(parse_int(key, value));
      episodes_or_horizon_changed = true;
    } else if (key == "step_cost") {
      config.env.step_cost = parse_real(key, value);
    } else if (key == "goal_reward") {
      config.env.goal_reward = parse_real(key, value);
    } else if (key == "trials") {
      config.trials = static_cast<int>(parse_int(key, value));
    } else if (key == "total_episodes") {
      config.total_episodes = parse_int(key, value);
      episodes_or_horizon_changed = true;
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "deterministic") {
      config.deterministic_mode = parse_bool(key, value);
    } else if (key == "output_path") {
      config.output_path = value;
    } else if (key == "parallel_trials") {
      config.parallel_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "gamma") {
      config.agent.gamma = parse_real(key, value);
    } else if (key == "epsilon_start") {
      config.agent.epsilon_start = parse_real(key, value);
    } else if (key == "epsilon_end") {
      config.agent.epsilon_end = parse_real(key, value);
    } else if (key == "epsilon_decay_steps") {
      config.agent.epsilon_decay_steps = parse_int(key, value);
      decay_explicit = true;
    } else if (key == "learning_rate") {
      config.agent.learning_rate = parse_real(key, value);
    } else if (key == "target_sync_period") {
      config.agent.target_sync_period = parse_int(key, value);
    } else if (key == "hidden_dim") {
      config.agent.hidden_dim = static_cast<int>(parse_int(key, value));
    } else if (key == "warmup_samples") {
      config.agent.warmup_samples = parse_int(key, value);
    } else if (key == "batch_size") {
      config.agent.batch_size = static_cast<int>(parse_int(key, value));
      config.model.batch_size = config.agent.batch_size;
    } else if (key == "huber_delta") {
      config.agent.huber_delta = parse_real(key, value);
      config.model.huber_delta = config.agent.huber_delta;
    } else if (key == "buffer_capacity") {
      config.buffer_capacity = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "optimizer") {
      Optimizer opt;
      if (value == "adam") opt = Optimizer::adam;
      else if (value == "sgd") opt = Optimizer::sgd;
      else bad_value(key, value);
      config.agent.optimizer = opt;
      config.model.optimizer = opt;
    } else if (key == "model_learning_rate") {
      config.model.learning_rate = parse_real(key, value);
    } else if (key == "model_hidden_dim") {
      config.model.hidden_dim = static_cast<int>(parse_int(key, value));
    } else if (key == "model_batch_size") {
      config.model.batch_size = static_cast<int>(parse_int(key, value));
    } else if (key == "model_variant") {
      if (value == "continuous") config.model.variant = DeltaVariant::continuous;
      else if (value == "categorical") config.model.variant = DeltaVariant::categorical;
      else bad_value(key, value);
    } else if (key == "model_argmax") {
      config.model.sample_categorical = !parse_bool(key, value);
    } else if (key == "imagination_steps") {
      if (!config.imagination) throw std::invalid_argument("config: imagination keys need method = fbrl");
      config.imagination->steps_per_rollout = static_cast<int>(parse_int(key, value));
    } else if (key == "imagination_streams") {
      if (!config.imagination) throw std::invalid_argument("config: imagination keys need method = fbrl");
      config.imagination->stream_count = static_cast<int>(parse_int(key, value));
    } else if (key == "imagination_strategy") {
      if (!config.imagination) throw std::invalid_argument("config: imagination keys need method = fbrl");
      if (value == "random") config.imagination->strategy = ImaginationStrategy::random;
      else if (value == "greedy") config.imagination->strategy = ImaginationStrategy::greedy;
      else if (value == "mixed") config.imagination->strategy = ImaginationStrategy::mixed;
      else bad_value(key, value);
    } else if (key == "imagination_p_random") {
      if (!config.imagination) throw std::invalid_argument("config: imagination keys need method = fbrl");
      config.imagination->p_random = parse_real(key, value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  if (!decay_explicit && episodes_or_horizon_changed) {
    config.agent.epsilon_decay_steps = derived_epsilon_decay_steps(config);
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

}  // namespace fbrl
