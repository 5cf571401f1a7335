#include "fbrl/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace fbrl {

namespace {

void check_span(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(want) + " values, got " +
                                std::to_string(got));
  }
}

void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

void write_f64_le(std::ostream& out, double d) {
  write_u64_le(out, std::bit_cast<std::uint64_t>(d));
}

double read_f64_le(std::istream& in) {
  return std::bit_cast<double>(read_u64_le(in));
}

constexpr char kMagic[] = "FBRLNN1";  // 7 bytes, no terminator on disk

}  // namespace

LossValue huber_loss(std::span<const double> prediction,
                     std::span<const double> target, double delta) {
  if (prediction.size() != target.size()) {
    throw std::invalid_argument("huber_loss: prediction/target length mismatch");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("huber_loss: delta must be positive");
  }
  LossValue loss;
  loss.gradient.resize(prediction.size());
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    double r = prediction[i] - target[i];
    double a = std::abs(r);
    if (a <= delta) {
      loss.value += 0.5 * r * r;
      loss.gradient[i] = r;
    } else {
      loss.value += delta * (a - 0.5 * delta);
      loss.gradient[i] = r > 0.0 ? delta : -delta;
    }
  }
  return loss;
}

LossValue softmax_cross_entropy(std::span<const double> logits,
                                std::size_t true_class) {
  if (true_class >= logits.size()) {
    throw std::invalid_argument("softmax_cross_entropy: class out of range");
  }
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  LossValue loss;
  loss.gradient.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    loss.gradient[i] = std::exp(logits[i] - max_logit);
    sum += loss.gradient[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) loss.gradient[i] /= sum;
  loss.value = -(logits[true_class] - max_logit - std::log(sum));
  loss.gradient[true_class] -= 1.0;
  return loss;
}

MlpNetwork::MlpNetwork(int input_dim, int hidden_dim, int output_dim,
                       Optimizer optimizer)
    : input_dim_(input_dim),
      hidden_dim_(hidden_dim),
      output_dim_(output_dim),
      optimizer_(optimizer) {
  if (input_dim <= 0 || hidden_dim <= 0 || output_dim <= 0) {
    throw std::invalid_argument("MlpNetwork: dimensions must be positive");
  }
  w1_.assign(static_cast<std::size_t>(hidden_dim) * input_dim, 0.0);
  b1_.assign(hidden_dim, 0.0);
  w2_.assign(static_cast<std::size_t>(output_dim) * hidden_dim, 0.0);
  b2_.assign(output_dim, 0.0);
  moment1_.assign(parameter_count(), 0.0);
  moment2_.assign(parameter_count(), 0.0);
}

MlpNetwork MlpNetwork::seeded(int input_dim, int hidden_dim, int output_dim,
                              Rng& rng, Optimizer optimizer) {
  MlpNetwork net(input_dim, hidden_dim, output_dim, optimizer);
  double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (double& w : net.w1_) w = rng.uniform_range(-bound1, bound1);
  double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (double& w : net.w2_) w = rng.uniform_range(-bound2, bound2);
  return net;
}

void MlpNetwork::forward(std::span<const double> input,
                         std::span<double> output) const {
  forward_batch(input, 1, output);
}

std::vector<double> MlpNetwork::forward(std::span<const double> input) const {
  std::vector<double> out(output_dim_);
  forward_batch(input, 1, out);
  return out;
}

void MlpNetwork::forward_batch(std::span<const double> inputs,
                               std::size_t count,
                               std::span<double> outputs) const {
  check_span(inputs.size(), count * input_dim_, "forward inputs");
  check_span(outputs.size(), count * output_dim_, "forward outputs");
  std::vector<double> hidden(hidden_dim_);
  for (std::size_t n = 0; n < count; ++n) {
    const double* x = inputs.data() + n * input_dim_;
    double* y = outputs.data() + n * output_dim_;
    for (int j = 0; j < hidden_dim_; ++j) {
      double acc = b1_[j];
      const double* row = w1_.data() + static_cast<std::size_t>(j) * input_dim_;
      for (int k = 0; k < input_dim_; ++k) acc += row[k] * x[k];
      hidden[j] = acc > 0.0 ? acc : 0.0;
    }
    for (int o = 0; o < output_dim_; ++o) {
      double acc = b2_[o];
      const double* row = w2_.data() + static_cast<std::size_t>(o) * hidden_dim_;
      for (int j = 0; j < hidden_dim_; ++j) acc += row[j] * hidden[j];
      y[o] = acc;
    }
  }
}

void MlpNetwork::accumulate_gradients(std::span<const double> inputs,
                                      std::span<const double> output_grads,
                                      std::size_t count,
                                      std::vector<double>& grad) const {
  check_span(inputs.size(), count * input_dim_, "train inputs");
  check_span(output_grads.size(), count * output_dim_, "train output grads");
  if (count == 0) throw std::invalid_argument("train_step: empty batch");

  grad.assign(parameter_count(), 0.0);
  const std::size_t off_w1 = 0;
  const std::size_t off_b1 = w1_.size();
  const std::size_t off_w2 = off_b1 + b1_.size();
  const std::size_t off_b2 = off_w2 + w2_.size();

  std::vector<double> hidden_pre(hidden_dim_);
  std::vector<double> hidden(hidden_dim_);
  std::vector<double> hidden_grad(hidden_dim_);

  for (std::size_t n = 0; n < count; ++n) {
    const double* x = inputs.data() + n * input_dim_;
    const double* gy = output_grads.data() + n * output_dim_;
    for (int j = 0; j < hidden_dim_; ++j) {
      double acc = b1_[j];
      const double* row = w1_.data() + static_cast<std::size_t>(j) * input_dim_;
      for (int k = 0; k < input_dim_; ++k) acc += row[k] * x[k];
      hidden_pre[j] = acc;
      hidden[j] = acc > 0.0 ? acc : 0.0;
    }
    for (int o = 0; o < output_dim_; ++o) {
      double g = gy[o];
      if (g == 0.0) continue;
      grad[off_b2 + o] += g;
      double* gw2 = grad.data() + off_w2 + static_cast<std::size_t>(o) * hidden_dim_;
      for (int j = 0; j < hidden_dim_; ++j) gw2[j] += g * hidden[j];
    }
    for (int j = 0; j < hidden_dim_; ++j) {
      double acc = 0.0;
      for (int o = 0; o < output_dim_; ++o) {
        acc += w2_[static_cast<std::size_t>(o) * hidden_dim_ + j] * gy[o];
      }
      hidden_grad[j] = hidden_pre[j] > 0.0 ? acc : 0.0;
    }
    for (int j = 0; j < hidden_dim_; ++j) {
      double g = hidden_grad[j];
      if (g == 0.0) continue;
      grad[off_b1 + j] += g;
      double* gw1 = grad.data() + off_w1 + static_cast<std::size_t>(j) * input_dim_;
      for (int k = 0; k < input_dim_; ++k) gw1[k] += g * x[k];
    }
  }
  double inv = 1.0 / static_cast<double>(count);
  for (double& g : grad) g *= inv;
}

void MlpNetwork::apply_update(const std::vector<double>& grad,
                              double learning_rate) {
  for (double g : grad) {
    if (!std::isfinite(g)) throw TrainingError("non-finite gradient in train_step");
  }
  auto param_at = [this](std::size_t i) -> double& {
    std::size_t n1 = w1_.size();
    if (i < n1) return w1_[i];
    i -= n1;
    if (i < b1_.size()) return b1_[i];
    i -= b1_.size();
    if (i < w2_.size()) return w2_[i];
    i -= w2_.size();
    return b2_[i];
  };

  if (optimizer_ == Optimizer::sgd) {
    for (std::size_t i = 0; i < grad.size(); ++i) {
      param_at(i) -= learning_rate * grad[i];
    }
  } else {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++adam_step_;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_step_));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_step_));
    for (std::size_t i = 0; i < grad.size(); ++i) {
      double g = grad[i];
      moment1_[i] = beta1 * moment1_[i] + (1.0 - beta1) * g;
      moment2_[i] = beta2 * moment2_[i] + (1.0 - beta2) * g * g;
      double m_hat = moment1_[i] / bc1;
      double v_hat = moment2_[i] / bc2;
      param_at(i) -= learning_rate * m_hat / (std::sqrt(v_hat) + eps);
    }
  }

  for (const auto* v : {&w1_, &b1_, &w2_, &b2_}) {
    for (double p : *v) {
      if (!std::isfinite(p)) throw TrainingError("non-finite parameter after update");
    }
  }
}

void MlpNetwork::train_step(std::span<const double> inputs,
                            std::span<const double> output_grads,
                            std::size_t count, double learning_rate) {
  accumulate_gradients(inputs, output_grads, count, grad_scratch_);
  apply_update(grad_scratch_, learning_rate);
}

std::vector<double> MlpNetwork::parameter_gradients(
    std::span<const double> inputs, std::span<const double> output_grads,
    std::size_t count) const {
  std::vector<double> grad;
  accumulate_gradients(inputs, output_grads, count, grad);
  return grad;
}

std::size_t MlpNetwork::parameter_count() const noexcept {
  return w1_.size() + b1_.size() + w2_.size() + b2_.size();
}

double MlpNetwork::parameter(std::size_t index) const {
  if (index < w1_.size()) return w1_[index];
  index -= w1_.size();
  if (index < b1_.size()) return b1_[index];
  index -= b1_.size();
  if (index < w2_.size()) return w2_[index];
  index -= w2_.size();
  if (index < b2_.size()) return b2_[index];
  throw std::out_of_range("parameter index");
}

void MlpNetwork::set_parameter(std::size_t index, double value) {
  if (index < w1_.size()) { w1_[index] = value; return; }
  index -= w1_.size();
  if (index < b1_.size()) { b1_[index] = value; return; }
  index -= b1_.size();
  if (index < w2_.size()) { w2_[index] = value; return; }
  index -= w2_.size();
  if (index < b2_.size()) { b2_[index] = value; return; }
  throw std::out_of_range("parameter index");
}

bool MlpNetwork::parameters_equal(const MlpNetwork& other) const {
  return input_dim_ == other.input_dim_ && hidden_dim_ == other.hidden_dim_ &&
         output_dim_ == other.output_dim_ && w1_ == other.w1_ &&
         b1_ == other.b1_ && w2_ == other.w2_ && b2_ == other.b2_;
}

void MlpNetwork::save(std::ostream& out) const {
  out.write(kMagic, 7);
  write_u64_le(out, static_cast<std::uint64_t>(input_dim_));
  write_u64_le(out, static_cast<std::uint64_t>(hidden_dim_));
  write_u64_le(out, static_cast<std::uint64_t>(output_dim_));
  for (const auto* v : {&w1_, &b1_, &w2_, &b2_}) {
    for (double p : *v) write_f64_le(out, p);
  }
  if (!out) throw std::runtime_error("checkpoint write failed");
}

MlpNetwork MlpNetwork::load(std::istream& in, Optimizer optimizer) {
  char magic[7];
  in.read(magic, 7);
  if (!in || std::memcmp(magic, kMagic, 7) != 0) {
    throw std::runtime_error("bad checkpoint magic");
  }
  auto input_dim = static_cast<int>(read_u64_le(in));
  auto hidden_dim = static_cast<int>(read_u64_le(in));
  auto output_dim = static_cast<int>(read_u64_le(in));
  MlpNetwork net(input_dim, hidden_dim, output_dim, optimizer);
  for (auto* v : {&net.w1_, &net.b1_, &net.w2_, &net.b2_}) {
    for (double& p : *v) p = read_f64_le(in);
  }
  return net;
}

double gradient_check(
    const MlpNetwork& net, std::span<const double> input,
    const std::function<LossValue(std::span<const double>)>& loss,
    double epsilon) {
  if (epsilon < 1e-6 || epsilon > 1e-3) {
    throw std::invalid_argument("gradient_check: epsilon outside [1e-6, 1e-3]");
  }
  LossValue at_point = loss(net.forward(input));
  std::vector<double> analytic =
      net.parameter_gradients(input, at_point.gradient, 1);

  MlpNetwork probe = net;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < probe.parameter_count(); ++i) {
    double orig = probe.parameter(i);
    probe.set_parameter(i, orig + epsilon);
    double plus = loss(probe.forward(input)).value;
    probe.set_parameter(i, orig - epsilon);
    double minus = loss(probe.forward(input)).value;
    probe.set_parameter(i, orig);
    double numeric = (plus - minus) / (2.0 * epsilon);
    double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
    max_rel = std::max(max_rel, std::abs(analytic[i] - numeric) / denom);
  }
  return max_rel;
}

}  // namespace fbrl
