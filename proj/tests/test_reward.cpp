#include <stdexcept>

#include "doctest.h"
#include "medrl/reward.hpp"
#include "medrl/rng.hpp"

using namespace medrl;

TEST_SUITE("reward") {

TEST_CASE("substitution") {
  CHECK(compute_reward(10.0, 4.0, {1.0, 0.5}) == doctest::Approx(8.0).epsilon(1e-12));
  for (double a : {0.0, 0.3, 2.0}) {
    for (double b : {0.0, 1.7}) CHECK(compute_reward(0.0, 0.0, {a, b}) == 0.0);
  }
  CHECK(compute_reward(20.5, 3.2, {0.8, 1.5}) == doctest::Approx(11.6).epsilon(1e-12));
}

TEST_CASE("linear in gs and cost") {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const RewardParams p{2.0 * uniform01(rng), 2.0 * uniform01(rng)};
    const double g1 = 50.0 * uniform01(rng) - 25.0, g2 = 50.0 * uniform01(rng) - 25.0;
    const double c1 = 10.0 * uniform01(rng), c2 = 10.0 * uniform01(rng);
    const double lhs = compute_reward(g1 + g2, c1 + c2, p);
    const double rhs = compute_reward(g1, c1, p) + compute_reward(g2, c2, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(compute_reward(g1, c1, p) <= compute_reward(g1 + 1.0, c1, p));
    CHECK(compute_reward(g1, c1, p) >= compute_reward(g1, c1 + 1.0, p));
  }
}

TEST_CASE("negative cost is rejected") {
  CHECK_THROWS_AS(compute_reward(1.0, -0.1, {}), std::invalid_argument);
}

TEST_CASE("mode names round-trip") {
  for (GsMode m : {GsMode::Increment, GsMode::Level}) CHECK(parse_gs_mode(gs_mode_name(m)) == m);
  CHECK_FALSE(parse_gs_mode("delta").has_value());
}

}  // TEST_SUITE
