#include "fbrl/oracles.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace fbrl {

std::size_t state_count(const EnvironmentSpec& spec) {
  if (spec.kind == EnvKind::gridworld) {
    return static_cast<std::size_t>(spec.size) * spec.size;
  }
  std::size_t count = 1;
  for (int d = 0; d < spec.size; ++d) count *= 3;
  return count;
}

std::size_t state_key(const EnvironmentSpec& spec,
                      std::span<const double> state) {
  if (spec.kind == EnvKind::gridworld) {
    auto x = static_cast<std::size_t>(state[0]);
    auto y = static_cast<std::size_t>(state[1]);
    return x * spec.size + y;
  }
  std::vector<int> pillars = decode_hanoi(state, spec.size);
  std::size_t key = 0;
  for (int d = spec.size - 1; d >= 0; --d) key = key * 3 + (pillars[d] - 1);
  return key;
}

StateVector state_from_key(const EnvironmentSpec& spec, std::size_t key) {
  if (spec.kind == EnvKind::gridworld) {
    return {static_cast<double>(key / spec.size),
            static_cast<double>(key % spec.size)};
  }
  std::vector<int> pillars(spec.size);
  for (int d = 0; d < spec.size; ++d) {
    pillars[d] = static_cast<int>(key % 3) + 1;
    key /= 3;
  }
  return encode_hanoi(pillars, spec.size);
}

std::size_t ValueIterationResult::index_of(const EnvironmentSpec& spec,
                                           std::span<const double> state) const {
  return state_key(spec, state);
}

ValueIterationResult value_iteration_oracle(const EnvironmentSpec& spec,
                                            double gamma, double tolerance) {
  spec.validate();
  const std::size_t n = state_count(spec);
  const int actions = spec.action_count();

  ValueIterationResult result;
  result.states.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.states.push_back(state_from_key(spec, k));
  }

  // Precompute the deterministic transition table.
  std::vector<std::size_t> next(n * actions);
  std::vector<double> reward(n * actions);
  std::vector<bool> enters_goal(n * actions);
  for (std::size_t k = 0; k < n; ++k) {
    for (int a = 0; a < actions; ++a) {
      StepResult r = step(spec, result.states[k], a);
      next[k * actions + a] = state_key(spec, r.next_state);
      reward[k * actions + a] = r.reward;
      enters_goal[k * actions + a] = r.terminal;
    }
  }

  std::vector<bool> goal(n);
  for (std::size_t k = 0; k < n; ++k) goal[k] = is_goal(spec, result.states[k]);

  result.values.assign(n, 0.0);
  std::vector<double> fresh(n, 0.0);
  double residual = tolerance + 1.0;
  while (residual >= tolerance) {
    residual = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (goal[k]) {
        fresh[k] = 0.0;
        continue;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < actions; ++a) {
        std::size_t idx = k * actions + a;
        double q = reward[idx] +
                   (enters_goal[idx] ? 0.0 : gamma * result.values[next[idx]]);
        if (q > best) best = q;
      }
      fresh[k] = best;
      residual = std::max(residual, std::abs(best - result.values[k]));
    }
    result.values.swap(fresh);
    ++result.sweeps;
  }

  result.policy.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (goal[k]) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < actions; ++a) {
      std::size_t idx = k * actions + a;
      double q = reward[idx] +
                 (enters_goal[idx] ? 0.0 : gamma * result.values[next[idx]]);
      if (q > best) {
        best = q;
        result.policy[k] = a;
      }
    }
  }
  return result;
}

std::optional<int> bfs_shortest_path(const EnvironmentSpec& spec) {
  spec.validate();
  const std::size_t n = state_count(spec);
  const int actions = spec.action_count();
  std::vector<int> dist(n, -1);

  StateVector start = reset(spec);
  std::size_t start_key = state_key(spec, start);
  if (is_goal(spec, start)) return 0;
  dist[start_key] = 0;

  std::deque<std::size_t> frontier{start_key};
  while (!frontier.empty()) {
    std::size_t k = frontier.front();
    frontier.pop_front();
    StateVector state = state_from_key(spec, k);
    for (int a = 0; a < actions; ++a) {
      StepResult r = step(spec, state, a);
      std::size_t nk = state_key(spec, r.next_state);
      if (dist[nk] >= 0) continue;
      dist[nk] = dist[k] + 1;
      if (r.terminal) return dist[nk];
      frontier.push_back(nk);
    }
  }
  return std::nullopt;
}

std::optional<int> greedy_policy_steps(const EnvironmentSpec& spec,
                                       const ValueIterationResult& oracle,
                                       int max_steps) {
  StateVector state = reset(spec);
  if (is_goal(spec, state)) return 0;
  for (int t = 1; t <= max_steps; ++t) {
    int a = oracle.policy[state_key(spec, state)];
    StepResult r = step(spec, state, a);
    if (r.terminal) return t;
    state = std::move(r.next_state);
  }
  return std::nullopt;
}

}  // namespace fbrl
