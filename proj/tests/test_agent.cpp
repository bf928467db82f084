#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "medrl/agent.hpp"
#include "medrl/error.hpp"
#include "medrl/growth_model.hpp"

using namespace medrl;

TEST_SUITE("agent") {

TEST_CASE("observation encoding") {
  const EnvParams env = default_env_params();
  const ObservationEncoder enc = ObservationEncoder::from(env, default_oracle_params());
  const PlantState p = sow(Sex::Female);
  const EnvState x = reset(env.outdoor);
  const Observation o = enc.encode(p, x, 0.0, 288.0);
  CHECK(o[8] == 1.0);
  CHECK(o[9] == 0.0);
  CHECK(o[10] == 0.0);
  CHECK(o[11] == 0.0);
  CHECK(o[12] == 0.0);
  CHECK(enc.encode(p, x, 288.0, 288.0)[12] == 1.0);
  CHECK(enc.encode(p, x, 17.0, 288.0) == enc.encode(p, x, 17.0, 288.0));

  const ObservationEncoder morph = ObservationEncoder::from(env, default_oracle_params(),
                                                            ObservationMode::MorphologyOnly);
  const Observation m = morph.encode(p, x, 5.0, 288.0);
  for (std::size_t i = 4; i < kObservationSize; ++i) CHECK(m[i] == 0.0);
}

TEST_CASE("action grid") {
  const ActuatorParams r = default_env_params().actuators;
  const ActionGrid g(r, {3, 3, 3, 3});
  REQUIRE(g.size() == 81);
  const Setpoints lo = g.action_to_setpoints(0);
  const Setpoints hi = g.action_to_setpoints(80);
  for (Var v : kAllVars) {
    CHECK(lo[v] == r[v].range_min);
    CHECK(hi[v] == r[v].range_max);
  }
  for (std::size_t a = 0; a < g.size(); ++a) {
    CHECK(g.index_of(g.level_tuple(a)) == a);
    CHECK(g.setpoints_to_action(g.action_to_setpoints(a)) == a);
  }
  CHECK_THROWS_AS(g.action_to_setpoints(81), std::out_of_range);

  const ActionGrid one(r, {2, 1, 1, 1});
  CHECK(one.size() == 2);
  CHECK(one.action_to_setpoints(1)[Var::Humidity] == 0.5 * (r[Var::Humidity].range_min + r[Var::Humidity].range_max));
}

TEST_CASE("action selection") {
  Rng rng(3);
  const std::vector<double> q{1.0, 3.0, 2.0, -1.0};
  CHECK(select_action(q, 0.0, rng) == 1);
  const std::vector<double> tie{0.0, 1.0, 4.0, 2.0, 0.0, 4.0};
  CHECK(select_action(tie, 0.0, rng) == 2);
  CHECK(argmax(tie) == 2);

  const std::size_t n = 81, draws = 100000;
  std::vector<double> flat(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  Rng r(12345);
  for (std::size_t i = 0; i < draws; ++i) ++count[select_action(flat, 1.0, r)];
  for (std::size_t c : count) CHECK(std::abs(double(c) / double(draws) - 1.0 / 81.0) <= 0.004);
}

TEST_CASE("epsilon schedule") {
  const EpsilonSchedule s{1.0, 0.1, 100};
  CHECK(s.at(0) == 1.0);
  CHECK(s.at(50) == doctest::Approx(0.55));
  CHECK(s.at(100) == doctest::Approx(0.1));
  CHECK(s.at(10000) == doctest::Approx(0.1));
}

TEST_CASE("td target") {
  const std::vector<double> next{0.5, 2.0, 1.0};
  CHECK(td_target(1.0, next, true, 0.95) == 1.0);
  CHECK(td_target(1.0, next, false, 0.0) == 1.0);
  CHECK(td_target(1.0, next, false, 0.95) == doctest::Approx(2.9).epsilon(1e-12));
  CHECK_THROWS_AS(td_target(1.0, next, false, 1.0), std::invalid_argument);
}

TEST_CASE("replay buffer") {
  ReplayBuffer b(3);
  Rng rng(1);
  CHECK_THROWS_AS(b.sample(1, rng), std::logic_error);
  for (std::size_t i = 0; i < 5; ++i) {
    Transition t;
    t.action = i;
    b.push(t);
  }
  CHECK(b.size() == 3);
  CHECK(b.at(0).action == 2);
  CHECK(b.at(2).action == 4);
  for (const Transition* t : b.sample(3, rng)) CHECK(t->action >= 2);
  CHECK_THROWS_AS(b.sample(4, rng), std::logic_error);
  Transition bad;
  bad.reward = std::nan("");
  CHECK_THROWS_AS(b.push(bad), std::invalid_argument);
}

TEST_CASE("myopic agent picks the better immediate reward") {
  LoopConfig cfg;
  cfg.env.outdoor.temperature = {20.0, 0.0, 0.0, 86400.0};
  const ActionGrid grid(cfg.env.actuators, {2, 1, 1, 1});
  const ObservationEncoder enc = ObservationEncoder::from(cfg.env, cfg.oracle);

  // Enumerate both actions directly.
  const OraclePlant oracle(cfg.oracle);
  std::array<double, 2> reward{};
  for (std::size_t a = 0; a < 2; ++a) {
    ClosedLoop loop(cfg, oracle, sow(Sex::Female), 0);
    reward[a] = loop.step(grid.action_to_setpoints(a)).reward;
  }
  REQUIRE(reward[0] != reward[1]);
  const std::size_t best = reward[1] > reward[0] ? 1 : 0;

  Hyperparams hp;
  hp.gamma = 0.0;
  hp.episode_length = 1;
  hp.episodes = 400;
  hp.batch_size = 8;
  hp.epsilon = {1.0, 0.1, 200};
  hp.hidden = 8;
  hp.learning_rate = 0.01;
  hp.seed = 21;
  const AgentTrainResult r = train_agent(cfg, TrainMode::Oracle, nullptr, grid, enc, hp);
  const Observation o0 = enc.encode(sow(Sex::Female), reset(cfg.env.outdoor), 0.0, 1.0);
  CHECK(r.agent.greedy_action(o0, GrowingPeriod::Germination) == best);

  const AgentTrainResult again = train_agent(cfg, TrainMode::Oracle, nullptr, grid, enc, hp);
  CHECK(again.log == r.log);
}

TEST_CASE("embedded training needs a surrogate") {
  LoopConfig cfg;
  const ActionGrid grid(cfg.env.actuators, {2, 1, 1, 1});
  const ObservationEncoder enc = ObservationEncoder::from(cfg.env, cfg.oracle);
  Hyperparams hp;
  hp.episodes = 1;
  hp.episode_length = 2;
  CHECK_THROWS_AS(train_agent(cfg, TrainMode::Embedded, nullptr, grid, enc, hp), MissingArtifact);
  GrowthModelSet empty;
  CHECK_THROWS_AS(train_agent(cfg, TrainMode::Embedded, &empty, grid, enc, hp), MissingArtifact);
}

TEST_CASE("evaluation is repeatable and its return is the sum of step rewards") {
  LoopConfig cfg;
  const ActionGrid grid(cfg.env.actuators, {3, 3, 3, 3});
  const ObservationEncoder enc = ObservationEncoder::from(cfg.env, cfg.oracle);
  const auto a = evaluate_policy(cfg, random_policy(grid.size()), grid, enc, 4, 50, 6);
  const auto b = evaluate_policy(cfg, random_policy(grid.size()), grid, enc, 4, 50, 6);
  REQUIRE(a.size() == 4);
  for (std::size_t e = 0; e < a.size(); ++e) {
    CHECK(a[e].episode_return == b[e].episode_return);
    double sum = 0.0;
    for (const StepOutcome& s : a[e].steps) {
      sum += compute_reward(cfg.reward.gs_mode == GsMode::Increment ? s.gs_increment : s.gs, s.cost,
                            cfg.reward);
    }
    CHECK(a[e].episode_return == doctest::Approx(sum).epsilon(1e-12));
  }
}

}  // TEST_SUITE
