#include "fbrl/backward_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbrl {

void BackwardModelConfig::validate() const {
  if (hidden_dim <= 0) throw std::invalid_argument("backward model: hidden_dim must be positive");
  if (learning_rate <= 0.0) throw std::invalid_argument("backward model: learning_rate must be positive");
  if (batch_size <= 0) throw std::invalid_argument("backward model: batch_size must be positive");
  if (huber_delta <= 0.0) throw std::invalid_argument("backward model: huber_delta must be positive");
}

std::vector<double> compute_delta(const Transition& t) {
  if (t.state.size() != t.next_state.size()) {
    throw std::invalid_argument("compute_delta: state length mismatch");
  }
  std::vector<double> delta(t.state.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = t.next_state[i] - t.state[i];
  }
  return delta;
}

namespace {

int output_dim_for(DeltaVariant variant, int state_dim) {
  return variant == DeltaVariant::continuous ? state_dim : 3 * state_dim;
}

// Maps an exact delta in {-1, 0, +1} to its class index, or -1.
int delta_class(double d) {
  if (d == -1.0) return 0;
  if (d == 0.0) return 1;
  if (d == 1.0) return 2;
  return -1;
}

}  // namespace

BackwardModel::BackwardModel(int state_dim, int action_count, ValueRange range,
                             BackwardModelConfig config, Rng& init_rng)
    : state_dim_(state_dim),
      action_count_(action_count),
      range_(range),
      config_(config),
      net_(MlpNetwork::seeded(state_dim + action_count, config.hidden_dim,
                              output_dim_for(config.variant, state_dim),
                              init_rng, config.optimizer)) {
  config_.validate();
}

void BackwardModel::encode_input(std::span<const double> state, int action,
                                 std::span<double> out) const {
  if (static_cast<int>(state.size()) != state_dim_) {
    throw std::invalid_argument("backward model: state length mismatch");
  }
  if (action < 0 || action >= action_count_) {
    throw std::invalid_argument("backward model: action index out of range");
  }
  std::copy(state.begin(), state.end(), out.begin());
  std::fill(out.begin() + state_dim_, out.end(), 0.0);
  out[state_dim_ + action] = 1.0;
}

double BackwardModel::train(const std::vector<Transition>& real_batch) {
  if (real_batch.empty()) {
    throw std::invalid_argument("backward model: empty training batch");
  }
  const std::size_t n = real_batch.size();
  const int in_dim = net_.input_dim();
  const int out_dim = net_.output_dim();

  inputs_.resize(n * in_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = real_batch[i];
    if (t.imagined) {
      throw std::invalid_argument("backward model: trained on imagined transition");
    }
    encode_input(t.next_state, t.action,
                 std::span<double>(inputs_.data() + i * in_dim, in_dim));
  }

  outputs_.resize(n * out_dim);
  net_.forward_batch(inputs_, n, outputs_);
  grads_.assign(n * out_dim, 0.0);
  double loss_sum = 0.0;

  if (config_.variant == DeltaVariant::continuous) {
    const double delta_cap = config_.huber_delta;
    for (std::size_t i = 0; i < n; ++i) {
      const Transition& t = real_batch[i];
      const double* pred = outputs_.data() + i * out_dim;
      double* grad = grads_.data() + i * out_dim;
      for (int k = 0; k < state_dim_; ++k) {
        double r = pred[k] - (t.next_state[k] - t.state[k]);
        double abs_r = std::abs(r);
        if (abs_r <= delta_cap) {
          loss_sum += 0.5 * r * r;
          grad[k] = r;
        } else {
          loss_sum += delta_cap * (abs_r - 0.5 * delta_cap);
          grad[k] = r > 0.0 ? delta_cap : -delta_cap;
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const Transition& t = real_batch[i];
      const double* logits = outputs_.data() + i * out_dim;
      double* grad = grads_.data() + i * out_dim;
      for (int k = 0; k < state_dim_; ++k) {
        int klass = delta_class(t.next_state[k] - t.state[k]);
        if (klass < 0) {
          throw std::invalid_argument(
              "backward model: delta outside {-1, 0, +1}; state encoding bug");
        }
        LossValue ce = softmax_cross_entropy(
            std::span<const double>(logits + 3 * k, 3),
            static_cast<std::size_t>(klass));
        loss_sum += ce.value;
        std::copy(ce.gradient.begin(), ce.gradient.end(), grad + 3 * k);
      }
    }
  }

  net_.train_step(inputs_, grads_, n, config_.learning_rate);
  return loss_sum / static_cast<double>(n);
}

DeltaPrediction BackwardModel::predict(std::span<const double> next_state,
                                       int action) const {
  std::vector<double> input(net_.input_dim());
  encode_input(next_state, action, input);
  std::vector<double> out = net_.forward(input);

  DeltaPrediction pred;
  pred.variant = config_.variant;
  if (config_.variant == DeltaVariant::continuous) {
    pred.delta = std::move(out);
    return pred;
  }
  pred.class_probs.resize(state_dim_);
  for (int k = 0; k < state_dim_; ++k) {
    double m = std::max({out[3 * k], out[3 * k + 1], out[3 * k + 2]});
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
      pred.class_probs[k][c] = std::exp(out[3 * k + c] - m);
      sum += pred.class_probs[k][c];
    }
    for (int c = 0; c < 3; ++c) pred.class_probs[k][c] /= sum;
  }
  return pred;
}

StateVector BackwardModel::predict_previous(std::span<const double> next_state,
                                            int action, Rng& rng) const {
  DeltaPrediction pred = predict(next_state, action);
  StateVector prev(state_dim_);
  if (pred.variant == DeltaVariant::continuous) {
    for (int k = 0; k < state_dim_; ++k) {
      prev[k] = std::clamp(next_state[k] - pred.delta[k], range_.lo, range_.hi);
    }
    return prev;
  }
  for (int k = 0; k < state_dim_; ++k) {
    const auto& p = pred.class_probs[k];
    int klass;
    if (config_.sample_categorical) {
      double u = rng.uniform();
      klass = u < p[0] ? 0 : (u < p[0] + p[1] ? 1 : 2);
    } else {
      klass = 0;
      if (p[1] > p[klass]) klass = 1;
      if (p[2] > p[klass]) klass = 2;
    }
    double delta = static_cast<double>(klass - 1);
    prev[k] = std::clamp(next_state[k] - delta, range_.lo, range_.hi);
  }
  return prev;
}

}  // namespace fbrl
