#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbrl/rng.hpp"

namespace fbrl {

enum class Optimizer { sgd, adam };

// Loss evaluated at a network output: scalar value plus d(value)/d(output).
struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;
};

// Summed per-element Huber loss between prediction and target.
// Quadratic for |r| <= delta, linear beyond; gradient per element is the
// residual clipped to [-delta, delta].
LossValue huber_loss(std::span<const double> prediction,
                     std::span<const double> target, double delta = 1.0);

// -log softmax(logits)[true_class]; gradient = softmax(logits) - one_hot.
LossValue softmax_cross_entropy(std::span<const double> logits,
                                std::size_t true_class);

// Two-layer fully-connected network: output = w2 * relu(w1 * x + b1) + b2.
// All math in double precision. Parameters are addressable as one flat
// sequence in the order w1 (row-major hidden x input), b1, w2 (row-major
// output x hidden), b2; gradient and optimizer state use the same indexing.
//
// Single writer; copies are cheap and used as immutable snapshots elsewhere.
class MlpNetwork {
 public:
  MlpNetwork(int input_dim, int hidden_dim, int output_dim,
             Optimizer optimizer = Optimizer::adam);

  // Weights drawn uniformly from [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases
  // zero. Keeps initial outputs near zero.
  static MlpNetwork seeded(int input_dim, int hidden_dim, int output_dim,
                           Rng& rng, Optimizer optimizer = Optimizer::adam);

  int input_dim() const noexcept { return input_dim_; }
  int hidden_dim() const noexcept { return hidden_dim_; }
  int output_dim() const noexcept { return output_dim_; }
  Optimizer optimizer() const noexcept { return optimizer_; }

  // Pure forward pass; repeated calls with the same input are bit-identical.
  void forward(std::span<const double> input, std::span<double> output) const;
  std::vector<double> forward(std::span<const double> input) const;

  // Row-major batch: inputs is count x input_dim, outputs count x output_dim.
  void forward_batch(std::span<const double> inputs, std::size_t count,
                     std::span<double> outputs) const;

  // One optimizer step from d(loss)/d(output) for each batch row. Gradients
  // are averaged over the batch, so learning rates are batch-size independent.
  // Throws TrainingError if any averaged gradient or updated parameter is
  // non-finite.
  void train_step(std::span<const double> inputs,
                  std::span<const double> output_grads, std::size_t count,
                  double learning_rate);

  // Batch-averaged parameter gradients without applying an update.
  std::vector<double> parameter_gradients(std::span<const double> inputs,
                                          std::span<const double> output_grads,
                                          std::size_t count) const;

  std::size_t parameter_count() const noexcept;
  double parameter(std::size_t index) const;
  void set_parameter(std::size_t index, double value);

  std::span<const double> w1() const noexcept { return w1_; }
  std::span<const double> b1() const noexcept { return b1_; }
  std::span<const double> w2() const noexcept { return w2_; }
  std::span<const double> b2() const noexcept { return b2_; }

  bool parameters_equal(const MlpNetwork& other) const;

  // Checkpoint format: magic "FBRLNN1", then input/hidden/output dims as
  // 64-bit little-endian counts, then parameters row-major as 64-bit
  // little-endian floats in flat order. Optimizer state is not stored; a
  // loaded network starts with fresh moments.
  void save(std::ostream& out) const;
  static MlpNetwork load(std::istream& in, Optimizer optimizer = Optimizer::adam);

 private:
  void accumulate_gradients(std::span<const double> inputs,
                            std::span<const double> output_grads,
                            std::size_t count, std::vector<double>& grad) const;
  void apply_update(const std::vector<double>& grad, double learning_rate);

  int input_dim_;
  int hidden_dim_;
  int output_dim_;
  Optimizer optimizer_;
  std::vector<double> w1_, b1_, w2_, b2_;
  // Adam state, flat parameter indexing.
  std::vector<double> moment1_, moment2_;
  long long adam_step_ = 0;
  // scratch reused across train steps
  std::vector<double> grad_scratch_;
};

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compares analytic parameter gradients of loss(net(input)) against central
// finite differences with the given epsilon and returns the maximum relative
// error over all parameters: |analytic - numeric| / max(1, |analytic|, |numeric|).
// epsilon must lie in [1e-6, 1e-3].
double gradient_check(
    const MlpNetwork& net, std::span<const double> input,
    const std::function<LossValue(std::span<const double>)>& loss,
    double epsilon);

}  // namespace fbrl
