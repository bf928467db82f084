#include "medrl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace medrl {

Mlp::Mlp(std::size_t input, std::size_t hidden, std::size_t output)
    : in_(input), hidden_(hidden), out_(output),
      params_(hidden * input + hidden + output * hidden + output, 0.0) {
  if (input == 0 || hidden == 0 || output == 0) {
    throw std::invalid_argument("Mlp layer sizes must be positive");
  }
}

void Mlp::init_glorot(Rng& rng) {
  auto fill = [&rng](std::span<double> w, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w) v = (2.0 * uniform01(rng) - 1.0) * limit;
  };
  fill(w1(), in_, hidden_);
  std::fill(b1().begin(), b1().end(), 0.0);
  fill(w2(), hidden_, out_);
  std::fill(b2().begin(), b2().end(), 0.0);
}

void Mlp::forward(std::span<const double> x, std::span<double> y,
                  std::span<double> hidden) const {
  if (x.size() != in_ || y.size() != out_) {
    throw std::invalid_argument("Mlp::forward: expected input " + std::to_string(in_) +
                                " / output " + std::to_string(out_) + ", got " +
                                std::to_string(x.size()) + " / " + std::to_string(y.size()));
  }
  if (!hidden.empty() && hidden.size() != hidden_) {
    throw std::invalid_argument("Mlp::forward: hidden buffer size mismatch");
  }
  std::vector<double> local;
  if (hidden.empty()) {
    local.resize(hidden_);
    hidden = local;
  }
  const double* w = params_.data();
  const double* b = params_.data() + off_b1();
  for (std::size_t j = 0; j < hidden_; ++j) {
    double s = b[j];
    const double* row = w + j * in_;
    for (std::size_t i = 0; i < in_; ++i) s += row[i] * x[i];
    hidden[j] = std::tanh(s);
  }
  const double* v = params_.data() + off_w2();
  const double* c = params_.data() + off_b2();
  for (std::size_t k = 0; k < out_; ++k) {
    double s = c[k];
    const double* row = v + k * hidden_;
    for (std::size_t j = 0; j < hidden_; ++j) s += row[j] * hidden[j];
    y[k] = s;
  }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  std::vector<double> y(out_);
  forward(x, y);
  return y;
}

void Mlp::accumulate_gradient(std::span<const double> x, std::span<const double> hidden,
                              std::span<const double> dy, std::span<double> grad) const {
  if (x.size() != in_ || hidden.size() != hidden_ || dy.size() != out_ ||
      grad.size() != params_.size()) {
    throw std::invalid_argument("Mlp::accumulate_gradient: size mismatch");
  }
  double* g_w1 = grad.data();
  double* g_b1 = grad.data() + off_b1();
  double* g_w2 = grad.data() + off_w2();
  double* g_b2 = grad.data() + off_b2();
  const double* v = params_.data() + off_w2();

  std::vector<double> dh(hidden_, 0.0);
  for (std::size_t k = 0; k < out_; ++k) {
    const double d = dy[k];
    if (d == 0.0) continue;
    g_b2[k] += d;
    double* grow = g_w2 + k * hidden_;
    const double* vrow = v + k * hidden_;
    for (std::size_t j = 0; j < hidden_; ++j) {
      grow[j] += d * hidden[j];
      dh[j] += d * vrow[j];
    }
  }
  for (std::size_t j = 0; j < hidden_; ++j) {
    const double dz = dh[j] * (1.0 - hidden[j] * hidden[j]);
    if (dz == 0.0) continue;
    g_b1[j] += dz;
    double* grow = g_w1 + j * in_;
    for (std::size_t i = 0; i < in_; ++i) grow[i] += dz * x[i];
  }
}

bool Mlp::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) throw std::invalid_argument("Adam: size mismatch");
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
    t_ = 0;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

void sgd_step(std::span<double> params, std::span<const double> grad, double learning_rate) {
  if (params.size() != grad.size()) throw std::invalid_argument("sgd_step: size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grad[i];
}

}  // namespace medrl
