#pragma once

#include <optional>

#include "fbrl/environment.hpp"

namespace fbrl {

// Exhaustive tabular solution of an environment, for verification. State
// spaces stay tiny here (n^2 grid cells, 3^n Hanoi configurations).
struct ValueIterationResult {
  std::vector<StateVector> states;  // enumeration order = state_key order
  std::vector<double> values;       // V* per state
  std::vector<int> policy;          // greedy action per state (0 for goals)
  int sweeps = 0;

  std::size_t index_of(const EnvironmentSpec& spec,
                       std::span<const double> state) const;
};

// Dense key in [0, state_count) for a valid real state.
std::size_t state_key(const EnvironmentSpec& spec,
                      std::span<const double> state);
std::size_t state_count(const EnvironmentSpec& spec);
StateVector state_from_key(const EnvironmentSpec& spec, std::size_t key);

// Bellman optimality iteration to sup-norm residual below tolerance. Goal
// states are absorbing with value 0; the entry reward is carried by the
// transition into them.
ValueIterationResult value_iteration_oracle(const EnvironmentSpec& spec,
                                            double gamma,
                                            double tolerance = 1e-10);

// Breadth-first search over the true transition graph from reset to the goal.
// nullopt when the goal is unreachable.
std::optional<int> bfs_shortest_path(const EnvironmentSpec& spec);

// Steps the greedy policy takes from reset to the goal, or nullopt if it
// fails to arrive within max_steps.
std::optional<int> greedy_policy_steps(const EnvironmentSpec& spec,
                                       const ValueIterationResult& oracle,
                                       int max_steps);

}  // namespace fbrl
