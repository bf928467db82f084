#include <stdexcept>

#include "doctest.h"
#include "medrl/brute_force.hpp"

using namespace medrl;

namespace {

LoopConfig small_loop() {
  LoopConfig c;
  c.env.outdoor.temperature = {20.0, 0.0, 0.0, 86400.0};
  c.env.outdoor.light = {0.0, 0.0, 0.0, 86400.0};
  return c;
}

double rollout(const LoopConfig& c, const ActionGrid& g, std::initializer_list<std::size_t> actions,
               std::uint64_t seed) {
  const OraclePlant oracle(c.oracle);
  ClosedLoop loop(c, oracle, sow_episode(seed, 0, c.oracle), derive_seed(seed, Stream::EnvNoise, 0));
  double total = 0.0;
  for (std::size_t a : actions) total += loop.step(g.action_to_setpoints(a)).reward;
  return total;
}

}  // namespace

TEST_SUITE("brute_force") {

TEST_CASE("horizon 1 over two actions") {
  const LoopConfig c = small_loop();
  const ActionGrid g(c.env.actuators, {1, 1, 2, 1});
  const BruteForceResult r = brute_force_optimum(c, g, 1, 3);
  CHECK(r.sequences == 2);
  CHECK(r.best_return == std::max(rollout(c, g, {0}, 3), rollout(c, g, {1}, 3)));
}

TEST_CASE("horizon 2 over sixteen actions") {
  const LoopConfig c = small_loop();
  const ActionGrid g(c.env.actuators, {2, 2, 2, 2});
  const BruteForceResult r = brute_force_optimum(c, g, 2, 4);
  CHECK(r.sequences == 256);
  double best = -1e300;
  std::vector<std::size_t> arg;
  for (std::size_t a = 0; a < 16; ++a) {
    for (std::size_t b = 0; b < 16; ++b) {
      const double v = rollout(c, g, {a, b}, 4);
      if (v > best) {
        best = v;
        arg = {a, b};
      }
    }
  }
  CHECK(r.best_return == best);
  CHECK(r.actions == arg);
  CHECK(replay_return(c, g, r.actions, 4) == r.best_return);
}

TEST_CASE("parallel search matches the serial reference") {
  const LoopConfig c = small_loop();
  const ActionGrid g(c.env.actuators, {2, 2, 2, 2});
  const BruteForceResult p = brute_force_optimum(c, g, 3, 9);
  const BruteForceResult s = brute_force_optimum_serial(c, g, 3, 9);
  CHECK(p.best_return == s.best_return);
  CHECK(p.actions == s.actions);
  CHECK(p.sequences == s.sequences);
}

TEST_CASE("preconditions") {
  LoopConfig c = small_loop();
  const ActionGrid g(c.env.actuators, {3, 3, 3, 3});
  CHECK_THROWS_AS(brute_force_optimum(c, g, 4, 1), std::length_error);
  CHECK_THROWS_AS(brute_force_optimum(c, g, 0, 1), std::invalid_argument);
  c.env.actuators[Var::Co2].noise_sigma = 0.1;
  CHECK_THROWS_AS(brute_force_optimum(c, g, 1, 1), std::invalid_argument);
}

}  // TEST_SUITE
