#pragma once

// Central finite-difference check shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "medrl/agent.hpp"
#include "medrl/growth_model.hpp"

namespace gradcheck {

inline constexpr double kStep = 1e-5;
/// Components whose magnitudes are both below this are compared absolutely.
inline constexpr double kFloor = 1e-6;

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), kFloor});
}

/// Max relative error between `analytic` and central differences of `loss`
/// taken by perturbing `params` in place.
inline double max_relative_error(std::span<double> params, const std::vector<double>& analytic,
                                 const std::function<double()>& loss) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + kStep;
    const double up = loss();
    params[i] = keep - kStep;
    const double down = loss();
    params[i] = keep;
    worst = std::max(worst, relative_error((up - down) / (2.0 * kStep), analytic[i]));
  }
  return worst;
}

/// A random growth model and batch for seed `seed`: inputs on natural scales,
/// normalizers fitted to the batch.
inline std::pair<medrl::GrowthModel, std::vector<medrl::WindowSample>> growth_case(std::uint64_t seed) {
  using namespace medrl;
  Rng rng(seed);
  const std::size_t window = 1 + uniform_index(rng, 4);
  const std::size_t hidden = 4 + uniform_index(rng, 12);
  std::vector<WindowSample> batch(3 + uniform_index(rng, 6));
  std::vector<std::vector<double>> inputs, targets;
  for (WindowSample& s : batch) {
    for (std::size_t k = 0; k < window; ++k) {
      s.env_window.push_back(10.0 + 25.0 * uniform01(rng));
      s.env_window.push_back(0.3 + 0.6 * uniform01(rng));
      s.env_window.push_back(1200.0 * uniform01(rng));
      s.env_window.push_back(400.0 + 1000.0 * uniform01(rng));
    }
    s.morph_now = {60.0 * uniform01(rng), std::floor(30.0 * uniform01(rng)), 200.0 * uniform01(rng),
                   50.0 * uniform01(rng)};
    for (double& t : s.target) t = standard_normal(rng);
    inputs.push_back(s.input());
    targets.emplace_back(s.target.begin(), s.target.end());
  }
  GrowthModel m = GrowthModel::zero(window, hidden);
  m.input_norm = Normalizer::fit(inputs);
  m.target_norm = Normalizer::fit(targets);
  m.net.init_glorot(rng);
  for (double& p : m.net.b1()) p = 0.1 * standard_normal(rng);
  for (double& p : m.net.b2()) p = 0.1 * standard_normal(rng);
  return {std::move(m), std::move(batch)};
}

inline double growth_error(std::uint64_t seed) {
  auto [m, batch] = growth_case(seed);
  const std::vector<double> g = medrl::grad(m, batch);
  return max_relative_error(m.net.parameters(), g, [&] { return medrl::batch_loss(m, batch); });
}

inline double qnet_error(std::uint64_t seed) {
  using namespace medrl;
  Rng rng(seed);
  const std::size_t actions = 2 + uniform_index(rng, 15);
  Mlp net(kObservationSize, 4 + uniform_index(rng, 12), actions);
  net.init_glorot(rng);
  for (double& p : net.b1()) p = 0.1 * standard_normal(rng);
  std::vector<QTarget> batch(2 + uniform_index(rng, 8));
  for (QTarget& t : batch) {
    for (double& o : t.observation) o = uniform01(rng);
    t.action = uniform_index(rng, actions);
    t.target = standard_normal(rng);
  }
  const std::vector<double> g = q_grad(net, batch);
  return max_relative_error(net.parameters(), g, [&] { return q_loss(net, batch); });
}

}  // namespace gradcheck
