#pragma once

#include <array>

#include "fbrl/environment.hpp"
#include "fbrl/mlp.hpp"
#include "fbrl/replay_buffer.hpp"
#include "fbrl/rng.hpp"

namespace fbrl {

enum class DeltaVariant { continuous, categorical };

struct BackwardModelConfig {
  DeltaVariant variant = DeltaVariant::continuous;
  int hidden_dim = 100;
  double learning_rate = 1e-3;
  int batch_size = 100;
  double huber_delta = 1.0;
  Optimizer optimizer = Optimizer::adam;
  // Categorical predictions are sampled during imagination by default;
  // argmax mode is selectable here.
  bool sample_categorical = true;

  void validate() const;
};

// Model output for one (next_state, action) query.
struct DeltaPrediction {
  DeltaVariant variant = DeltaVariant::continuous;
  std::vector<double> delta;                            // continuous
  std::vector<std::array<double, 3>> class_probs;       // categorical, classes map to {-1, 0, +1}
};

// next_state - state, elementwise.
std::vector<double> compute_delta(const Transition& t);

// Learns the state change an action produced so predecessors can be
// reconstructed: a network mapping state + one-hot action to either a
// continuous delta vector (trained with Huber loss) or, per state variable,
// logits over delta in {-1, 0, +1} (trained with summed cross-entropy).
//
// Predicted previous states are clipped to the environment's value range but
// are otherwise allowed to be invalid (fractional bits, off-grid points);
// model inaccuracy is tolerated downstream by design.
class BackwardModel {
 public:
  BackwardModel(int state_dim, int action_count, ValueRange range,
                BackwardModelConfig config, Rng& init_rng);

  // One optimizer step on a batch of real transitions; returns the batch-mean
  // loss. Throws std::invalid_argument if the batch contains an imagined
  // transition or, in categorical mode, a delta outside {-1, 0, +1}.
  double train(const std::vector<Transition>& real_batch);

  DeltaPrediction predict(std::span<const double> next_state, int action) const;

  // Continuous: next_state - delta. Categorical: per variable, sample (or
  // argmax) a delta class and subtract. Both clip to the value range.
  StateVector predict_previous(std::span<const double> next_state, int action,
                               Rng& rng) const;

  const MlpNetwork& net() const { return net_; }
  MlpNetwork& net() { return net_; }
  const BackwardModelConfig& config() const { return config_; }
  int state_dim() const { return state_dim_; }
  int action_count() const { return action_count_; }
  ValueRange value_range() const { return range_; }

 private:
  void encode_input(std::span<const double> state, int action,
                    std::span<double> out) const;

  int state_dim_;
  int action_count_;
  ValueRange range_;
  BackwardModelConfig config_;
  MlpNetwork net_;

  // scratch reused across train calls
  std::vector<double> inputs_, outputs_, grads_;
};

}  // namespace fbrl
