#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "medrl/rng.hpp"

namespace medrl {

/// One-hidden-layer tanh network, input -> hidden (tanh) -> output (affine).
///
/// Parameters live in one flat vector laid out as
///   W1 [hidden x input, row-major] | b1 [hidden] | W2 [output x hidden] | b2 [output]
/// so optimizers and finite-difference checks can treat them uniformly.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t input, std::size_t hidden, std::size_t output);

  std::size_t input_size() const { return in_; }
  std::size_t hidden_size() const { return hidden_; }
  std::size_t output_size() const { return out_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Views into the flat parameter vector.
  std::span<const double> w1() const { return {params_.data(), hidden_ * in_}; }
  std::span<const double> b1() const { return {params_.data() + off_b1(), hidden_}; }
  std::span<const double> w2() const { return {params_.data() + off_w2(), out_ * hidden_}; }
  std::span<const double> b2() const { return {params_.data() + off_b2(), out_}; }
  std::span<double> w1() { return {params_.data(), hidden_ * in_}; }
  std::span<double> b1() { return {params_.data() + off_b1(), hidden_}; }
  std::span<double> w2() { return {params_.data() + off_w2(), out_ * hidden_}; }
  std::span<double> b2() { return {params_.data() + off_b2(), out_}; }

  /// Glorot-uniform weights, zero biases.
  void init_glorot(Rng& rng);

  /// Writes the output into `y` and, if non-empty, the hidden activations
  /// into `hidden`. Throws std::invalid_argument on a size mismatch.
  void forward(std::span<const double> x, std::span<double> y,
               std::span<double> hidden = {}) const;
  std::vector<double> forward(std::span<const double> x) const;

  /// Adds dL/dtheta for one sample to `grad` (same layout as parameters()),
  /// given the input, the hidden activations from forward() and dL/dy.
  void accumulate_gradient(std::span<const double> x, std::span<const double> hidden,
                           std::span<const double> dy, std::span<double> grad) const;

  bool all_finite() const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::size_t off_b1() const { return hidden_ * in_; }
  std::size_t off_w2() const { return off_b1() + hidden_; }
  std::size_t off_b2() const { return off_w2() + out_ * hidden_; }

  std::size_t in_ = 0;
  std::size_t hidden_ = 0;
  std::size_t out_ = 0;
  std::vector<double> params_;
};

/// Adam with bias correction.
class Adam {
 public:
  explicit Adam(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(std::span<double> params, std::span<const double> grad);
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long long t_ = 0;
};

/// Plain gradient descent step: params -= lr * grad.
void sgd_step(std::span<double> params, std::span<const double> grad, double learning_rate);

}  // namespace medrl
