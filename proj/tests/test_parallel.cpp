#include <stdexcept>

#include "doctest.h"
#include "medrl/agent.hpp"
#include "medrl/dataset.hpp"
#include "medrl/growth_model.hpp"
#include "medrl/parallel.hpp"

using namespace medrl;

// Each parallel kernel against its serial reference. Results must agree
// bitwise, not just approximately.

TEST_SUITE("parallel") {

TEST_CASE("chunked sum") {
  std::vector<double> v(10007);
  Rng rng(1);
  for (double& x : v) x = standard_normal(rng) * 1e3;
  const double a = chunked_sum(v.size(), [&](std::size_t i) { return v[i]; });
  const double b = chunked_sum(v.size(), [&](std::size_t i) { return v[i]; });
  CHECK(a == b);
  double plain = 0.0;
  for (double x : v) plain += x;
  CHECK(a == doctest::Approx(plain).epsilon(1e-12));
  CHECK(chunked_sum(0, [](std::size_t) { return 1.0; }) == 0.0);
}

TEST_CASE("dataset generation") {
  LoopConfig c;
  c.env.actuators[Var::Temperature].noise_sigma = 0.01;
  const auto sched = random_hold_schedule(c.env.actuators, 12);
  CHECK(generate_dataset(c, sched, 7, 100, 4) == generate_dataset_serial(c, sched, 7, 100, 4));
}

TEST_CASE("dataset loss") {
  LoopConfig c;
  const Dataset d = generate_dataset(c, random_hold_schedule(c.env.actuators, 12), 5, 288, 2);
  const auto w = build_windows(d, 4);
  GrowthModel m = GrowthModel::zero(4, 16);
  Rng rng(3);
  m.net.init_glorot(rng);
  CHECK(dataset_loss(m, w) == doctest::Approx(dataset_loss_serial(m, w)).epsilon(1e-12));
  CHECK(dataset_loss(m, w) == dataset_loss(m, w));
}

TEST_CASE("evaluation episodes do not depend on scheduling") {
  LoopConfig c;
  const ActionGrid g(c.env.actuators, {3, 3, 3, 3});
  const ObservationEncoder enc = ObservationEncoder::from(c.env, c.oracle);
  const auto all = evaluate_policy(c, random_policy(g.size()), g, enc, 6, 40, 11);
  const auto one = evaluate_policy(c, random_policy(g.size()), g, enc, 1, 40, 11);
  CHECK(all[0].episode_return == one[0].episode_return);
}

}  // TEST_SUITE
