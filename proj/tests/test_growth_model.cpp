#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gradcheck.hpp"
#include "medrl/closed_loop.hpp"
#include "medrl/dataset.hpp"
#include "medrl/error.hpp"
#include "medrl/growth_model.hpp"

using namespace medrl;

namespace {

Dataset single_period(std::size_t n, bool constant_morphology) {
  Dataset d;
  d.episodes.emplace_back();
  for (std::size_t i = 0; i < n; ++i) {
    Record r;
    r.step = i;
    r.t = 300.0 * static_cast<double>(i);
    r.env = EnvState::make(20.0 + static_cast<double>(i), 0.5, 100.0, 500.0);
    if (!constant_morphology) r.morphology.stem_length_cm = 0.1 * static_cast<double>(i);
    d.episodes[0].push_back(r);
  }
  return d;
}

// Straight-line forward pass, written independently of Mlp::forward.
std::vector<double> reference_forward(const Mlp& net, const std::vector<double>& x) {
  const auto p = net.parameters();
  const std::size_t in = net.input_size(), h = net.hidden_size(), out = net.output_size();
  std::vector<double> hid(h), y(out);
  for (std::size_t j = 0; j < h; ++j) {
    double a = p[in * h + j];
    for (std::size_t i = 0; i < in; ++i) a += p[j * in + i] * x[i];
    hid[j] = std::tanh(a);
  }
  const std::size_t w2 = in * h + h;
  for (std::size_t k = 0; k < out; ++k) {
    double a = p[w2 + out * h + k];
    for (std::size_t j = 0; j < h; ++j) a += p[w2 + k * h + j] * hid[j];
    y[k] = a;
  }
  return y;
}

Dataset oracle_data(std::size_t episodes, std::uint64_t seed) {
  LoopConfig c;
  return generate_dataset(c, random_hold_schedule(c.env.actuators, 12), episodes, 288, seed);
}

}  // namespace

TEST_SUITE("growth_model") {

TEST_CASE("window counting") {
  CHECK(build_windows(single_period(5, false), 3).size() == 2);
  CHECK(build_windows(single_period(3, false), 3).empty());
  for (const WindowSample& s : build_windows(single_period(9, true), 2)) {
    for (double t : s.target) CHECK(t == 0.0);
  }
}

TEST_CASE("windows never straddle a period change") {
  const Dataset d = oracle_data(3, 1);
  const auto w = build_windows(d, 4);
  for (const WindowSample& s : w) {
    const EpisodeRecords& ep = d.episodes[s.episode];
    for (std::size_t k = s.step + 1 - 4; k <= s.step + 1; ++k) CHECK(ep[k].period == s.period);
  }
}

TEST_CASE("forward pass") {
  GrowthModel m = GrowthModel::zero(2, 8);
  const std::vector<double> x(m.net.input_size(), 0.7);
  for (double y : forward(m, x)) CHECK(y == 0.0);

  m.net.b2()[0] = 1.5;
  m.net.b2()[3] = -2.0;
  const auto y = forward(m, x);
  CHECK(y[0] == 1.5);
  CHECK(y[3] == -2.0);

  Rng rng(5);
  Mlp net(7, 5, 3);
  net.init_glorot(rng);
  for (double& b : net.b1()) b = standard_normal(rng);
  std::vector<double> in(7);
  for (double& v : in) v = standard_normal(rng);
  const auto got = net.forward(in);
  const auto want = reference_forward(net, in);
  for (std::size_t k = 0; k < 3; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-14));

  CHECK_THROWS_AS(forward(m, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("mse") {
  const std::array<double, 4> t{1.0, 2.0, 3.0, 4.0};
  CHECK(loss_mse(t, t) == 0.0);
  const std::array<double, 4> p{2.0, 3.0, 4.0, 5.0};
  CHECK(loss_mse(p, t) == 1.0);
  const std::array<double, 4> one{1.0, 0.0, 0.0, 0.0}, zero{};
  CHECK(loss_mse(one, zero) == 0.25);
}

TEST_CASE("gradient") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    CHECK(gradcheck::growth_error(seed) <= 1e-4);
  }

  // Zero network, identity normalizers: the prediction is 0, so the output
  // bias gradient is -2/4 * mean(target) per field and doubles with the targets.
  GrowthModel m = GrowthModel::zero(1, 3);
  std::vector<WindowSample> batch(3);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i].env_window = {20.0, 0.5, 100.0, 500.0};
    batch[i].target = {1.0 + double(i), -2.0, 0.5, 3.0 * double(i)};
  }
  const auto g1 = grad(m, batch);
  for (WindowSample& s : batch) {
    for (double& t : s.target) t *= 2.0;
  }
  const auto g2 = grad(m, batch);
  const auto b2 = m.net.parameter_count() - 4;
  for (std::size_t k = 0; k < 4; ++k) {
    double mean = 0.0;
    for (const WindowSample& s : batch) mean += s.target[k] / 2.0;
    mean /= 3.0;
    CHECK(g1[b2 + k] == doctest::Approx(-0.5 * mean).epsilon(1e-12));
    CHECK(g2[b2 + k] == doctest::Approx(2.0 * g1[b2 + k]).epsilon(1e-12));
  }

  // At the optimum the gradient vanishes.
  for (WindowSample& s : batch) s.target = {};
  for (double v : grad(m, batch)) CHECK(v == 0.0);
}

TEST_CASE("constant targets are learned at once") {
  const auto samples = build_windows(single_period(40, true), 2);
  GrowthTrainConfig cfg;
  cfg.window = 2;
  cfg.epochs = 50;
  const GrowthTrainResult r = train(samples, cfg);
  CHECK(r.validation_loss.back() <= 1e-12);
}

TEST_CASE("training is deterministic") {
  const auto samples = build_windows(oracle_data(6, 2), 4);
  GrowthTrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 99;
  const GrowthTrainResult a = train(samples, cfg);
  const GrowthTrainResult b = train(samples, cfg);
  CHECK(a.train_loss == b.train_loss);
  CHECK(a.validation_loss == b.validation_loss);
  CHECK(a.model == b.model);
}

TEST_CASE("full-batch gradient descent does not increase the training loss") {
  auto samples = build_windows(oracle_data(6, 3), 4);
  std::vector<WindowSample> seedling;
  for (const WindowSample& s : samples) {
    if (s.period == GrowingPeriod::Seedling) seedling.push_back(s);
  }
  REQUIRE(seedling.size() > 50);
  GrowthTrainConfig cfg;
  cfg.optimizer = Optimizer::Sgd;
  cfg.learning_rate = 0.05;
  cfg.batch_size = seedling.size();
  cfg.epochs = 60;
  const GrowthTrainResult r = train(seedling, cfg);
  for (std::size_t e = 1; e < r.train_loss.size(); ++e) {
    CAPTURE(e);
    CHECK(r.train_loss[e] <= r.train_loss[e - 1]);
  }
}

TEST_CASE("prediction clamps and rounds") {
  GrowthModel m = GrowthModel::zero(1, 2);
  GrowthModelSet set;
  set.set(GrowingPeriod::Seedling, m);
  const EnvState x = EnvState::make(20.0, 0.5, 100.0, 500.0);
  Morphology now;
  now.stem_length_cm = 4.0;
  now.leaf_count = 2.0;
  CHECK(predict_growth(set, GrowingPeriod::Seedling, std::span(&x, 1), now) == now);

  m.net.b2()[0] = -10.0;
  m.net.b2()[1] = 0.4;
  set.set(GrowingPeriod::Seedling, m);
  const Morphology next = predict_growth(set, GrowingPeriod::Seedling, std::span(&x, 1), now);
  CHECK(next.stem_length_cm == 0.0);
  CHECK(next.leaf_count == 2.0);

  CHECK_THROWS_AS(predict_growth(set, GrowingPeriod::Mature, std::span(&x, 1), now), MissingArtifact);
}

}  // TEST_SUITE
