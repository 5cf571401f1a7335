#include "fbrl/environment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fbrl {

int EnvironmentSpec::state_dim() const {
  return kind == EnvKind::gridworld ? 2 : 3 * size;
}

int EnvironmentSpec::action_count() const {
  return kind == EnvKind::gridworld ? 4 : 3 * size;
}

ValueRange EnvironmentSpec::value_range() const {
  if (kind == EnvKind::gridworld) {
    return {0.0, static_cast<double>(size - 1)};
  }
  return {0.0, 1.0};
}

void EnvironmentSpec::validate() const {
  if (horizon <= 0) throw std::invalid_argument("environment: horizon must be positive");
  if (size < 2) throw std::invalid_argument("environment: size must be >= 2");
}

EnvironmentSpec make_gridworld(int size) {
  EnvironmentSpec spec;
  spec.kind = EnvKind::gridworld;
  spec.size = size;
  spec.horizon = 10 * size;
  spec.validate();
  return spec;
}

EnvironmentSpec make_hanoi(int discs) {
  EnvironmentSpec spec;
  spec.kind = EnvKind::hanoi;
  spec.size = discs;
  spec.horizon = 50 * (discs - 1);
  spec.validate();
  return spec;
}

namespace {

void check_length(const EnvironmentSpec& spec, std::span<const double> state) {
  if (static_cast<int>(state.size()) != spec.state_dim()) {
    throw std::invalid_argument("state length " + std::to_string(state.size()) +
                                " does not match environment state_dim " +
                                std::to_string(spec.state_dim()));
  }
}

// Pillar of disc d, or -1 if the group is not exactly one-hot.
int pillar_of(std::span<const double> state, int disc) {
  int found = -1;
  for (int p = 0; p < 3; ++p) {
    double v = state[3 * disc + p];
    if (v == 1.0) {
      if (found >= 0) return -1;
      found = p;
    } else if (v != 0.0) {
      return -1;
    }
  }
  return found;
}

}  // namespace

StateVector reset(const EnvironmentSpec& spec) {
  spec.validate();
  if (spec.kind == EnvKind::gridworld) {
    return {0.0, 0.0};
  }
  StateVector s(spec.state_dim(), 0.0);
  for (int d = 0; d < spec.size; ++d) s[3 * d] = 1.0;  // all discs on pillar 1
  return s;
}

bool is_valid_real_state(const EnvironmentSpec& spec,
                         std::span<const double> state) {
  if (static_cast<int>(state.size()) != spec.state_dim()) return false;
  if (spec.kind == EnvKind::gridworld) {
    for (double v : state) {
      if (!(v >= 0.0 && v <= spec.size - 1) || std::floor(v) != v) return false;
    }
    return true;
  }
  for (int d = 0; d < spec.size; ++d) {
    if (pillar_of(state, d) < 0) return false;
  }
  return true;
}

StepResult step(const EnvironmentSpec& spec, const StateVector& state,
                int action) {
  if (action < 0 || action >= spec.action_count()) {
    throw std::invalid_argument("step: action index " + std::to_string(action) +
                                " out of range");
  }
  if (!is_valid_real_state(spec, state)) {
    throw std::invalid_argument("step: state violates real-state invariants");
  }

  StateVector next = state;
  if (spec.kind == EnvKind::gridworld) {
    double hi = spec.size - 1;
    switch (action) {
      case kUp:    next[1] = std::min(next[1] + 1.0, hi); break;
      case kDown:  next[1] = std::max(next[1] - 1.0, 0.0); break;
      case kLeft:  next[0] = std::max(next[0] - 1.0, 0.0); break;
      case kRight: next[0] = std::min(next[0] + 1.0, hi); break;
    }
  } else {
    int disc = action / 3;
    int target = action % 3;
    int from = pillar_of(state, disc);
    bool movable = true;
    for (int d = 0; d < disc; ++d) {
      int p = pillar_of(state, d);
      if (p == from || p == target) {  // a smaller disc blocks source or target
        movable = false;
        break;
      }
    }
    if (movable) {
      for (int p = 0; p < 3; ++p) next[3 * disc + p] = 0.0;
      next[3 * disc + target] = 1.0;
    }
  }

  double reward = reward_query(spec, next);
  bool terminal = is_goal(spec, next);
  return {std::move(next), reward, terminal};
}

bool is_goal(const EnvironmentSpec& spec, std::span<const double> state) {
  check_length(spec, state);
  if (spec.kind == EnvKind::gridworld) {
    double hi = spec.size - 1;
    return state[0] == hi && state[1] == hi;
  }
  for (int d = 0; d < spec.size; ++d) {
    if (state[3 * d + 2] != 1.0) return false;
  }
  return true;
}

double reward_query(const EnvironmentSpec& spec,
                    std::span<const double> state) {
  return is_goal(spec, state) ? spec.goal_reward : spec.step_cost;
}

StateVector sample_goal(const EnvironmentSpec& spec, Rng& rng) {
  (void)rng;  // singleton distribution in these environments
  if (spec.kind == EnvKind::gridworld) {
    double hi = spec.size - 1;
    return {hi, hi};
  }
  StateVector s(spec.state_dim(), 0.0);
  for (int d = 0; d < spec.size; ++d) s[3 * d + 2] = 1.0;
  return s;
}

StateVector encode_hanoi(std::span<const int> disc_pillars, int disc_count) {
  if (static_cast<int>(disc_pillars.size()) != disc_count) {
    throw std::invalid_argument("encode_hanoi: pillar list length mismatch");
  }
  StateVector s(3 * disc_count, 0.0);
  for (int d = 0; d < disc_count; ++d) {
    int p = disc_pillars[d];
    if (p < 1 || p > 3) {
      throw std::invalid_argument("encode_hanoi: pillar index " +
                                  std::to_string(p) + " outside {1, 2, 3}");
    }
    s[3 * d + (p - 1)] = 1.0;
  }
  return s;
}

std::vector<int> decode_hanoi(std::span<const double> state, int disc_count) {
  if (static_cast<int>(state.size()) != 3 * disc_count) {
    throw std::invalid_argument("decode_hanoi: state length mismatch");
  }
  std::vector<int> pillars(disc_count);
  for (int d = 0; d < disc_count; ++d) {
    int p = pillar_of(state, d);
    if (p < 0) throw std::invalid_argument("decode_hanoi: group not one-hot");
    pillars[d] = p + 1;
  }
  return pillars;
}

}  // namespace fbrl
