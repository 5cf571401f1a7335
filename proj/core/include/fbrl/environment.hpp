#pragma once

#include <span>
#include <vector>

#include "fbrl/rng.hpp"

namespace fbrl {

// Fixed-length real vector encoding an environment state. Gridworld uses
// [x, y]; Hanoi uses 3n bits, one one-hot pillar group per disc, smallest
// disc first. Imagined states reuse this type and may hold values a real
// state never would.
using StateVector = std::vector<double>;

enum class EnvKind { gridworld, hanoi };

// Per-variable range imagined states are clipped to.
struct ValueRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct EnvironmentSpec {
  EnvKind kind = EnvKind::gridworld;
  int size = 5;       // grid side length, or disc count
  int horizon = 50;   // fixed episode length cap
  double step_cost = -0.01;
  double goal_reward = 1.0;

  int state_dim() const;
  int action_count() const;  // gridworld 4; hanoi 3n (disc x target pillar)
  ValueRange value_range() const;
  void validate() const;  // horizon > 0, size >= 2
};

// Specs with the published horizon for the size: 10n for an n x n grid,
// 50(n-1) for n discs.
EnvironmentSpec make_gridworld(int size);
EnvironmentSpec make_hanoi(int discs);

// Gridworld action indices.
enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

// Hanoi action index = 3 * disc + pillar, discs ordered smallest first,
// pillars 0-based internally.
inline int hanoi_action(int disc, int pillar) { return 3 * disc + pillar; }

struct StepResult {
  StateVector next_state;
  double reward;
  bool terminal;
};

// Start state: gridworld bottom-left (0, 0); Hanoi all discs on pillar 1.
StateVector reset(const EnvironmentSpec& spec);

// Deterministic transition. Gridworld moves clamp at the boundary (bumping a
// wall leaves the position unchanged). A Hanoi action (disc d -> pillar p)
// applies only if d is topmost on its pillar and p's top disc, if any, is
// larger; otherwise the state is unchanged. Either way one step cost accrues
// unless the entered state is the goal. Requires a valid real state; throws
// std::invalid_argument on a bad action index.
StepResult step(const EnvironmentSpec& spec, const StateVector& state,
                int action);

// Goal predicate: gridworld x = y = n-1; Hanoi all pillar-3 bits set. Total
// over arbitrary vectors of the right length, so it can be queried on
// imagined states.
bool is_goal(const EnvironmentSpec& spec, std::span<const double> state);

// goal_reward if is_goal, else step_cost. Never fails on finite input of the
// correct length; makes no real-vs-imagined distinction.
double reward_query(const EnvironmentSpec& spec, std::span<const double> state);

// Both environments have a singleton goal distribution; the rng parameter is
// part of the sampling contract and currently unused.
StateVector sample_goal(const EnvironmentSpec& spec, Rng& rng);

// Positional encoder: disc_pillars[d] in {1, 2, 3} -> 3n bit one-hot layout.
// Stacking legality is not required.
StateVector encode_hanoi(std::span<const int> disc_pillars, int disc_count);

// Strict inverse of encode_hanoi; throws on anything but exact one-hot groups.
std::vector<int> decode_hanoi(std::span<const double> state, int disc_count);

// True for states reachable by reset/step: integral in-range coordinates, or
// exact one-hot pillar groups.
bool is_valid_real_state(const EnvironmentSpec& spec,
                         std::span<const double> state);

}  // namespace fbrl
