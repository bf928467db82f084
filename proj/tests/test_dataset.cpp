#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "medrl/closed_loop.hpp"
#include "medrl/dataset.hpp"
#include "medrl/error.hpp"

using namespace medrl;

namespace {

LoopConfig loop() {
  LoopConfig c;
  return c;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("record count") {
  const auto sched = random_hold_schedule(default_env_params().actuators, 6);
  const Dataset d = generate_dataset(loop(), sched, 1, 5, 11);
  REQUIRE(d.episodes.size() == 1);
  CHECK(d.record_count() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(d.episodes[0][i].step == i);
}

TEST_CASE("same seed, same data") {
  const auto sched = random_hold_schedule(default_env_params().actuators, 6);
  CHECK(generate_dataset(loop(), sched, 4, 50, 3) == generate_dataset(loop(), sched, 4, 50, 3));
  CHECK_FALSE(generate_dataset(loop(), sched, 4, 50, 3) == generate_dataset(loop(), sched, 4, 50, 4));
}

TEST_CASE("period labels replay through the transition rule") {
  const LoopConfig c = loop();
  const auto sched = random_hold_schedule(c.env.actuators, 12);
  const Dataset d = generate_dataset(c, sched, 6, 288, 5);
  for (const EpisodeRecords& ep : d.episodes) {
    for (std::size_t i = 0; i + 1 < ep.size(); ++i) {
      // Rebuild the plant state the transition rule saw after step i's growth.
      PlantState p;
      p.period = ep[i].period;
      p.sex = ep[i].sex;
      p.latent_sex = ep[i + 1].sex == Sex::Unknown ? Sex::Female : ep[i + 1].sex;
      p.morphology = ep[i + 1].morphology;
      p.time_in_period_s = 0.0;
      for (std::size_t j = i + 1; j-- > 0 && ep[j].period == ep[i].period;) p.time_in_period_s += c.env.dt_s;
      const PlantState q = period_transition(p, c.oracle);
      CHECK(q.period == ep[i + 1].period);
      if (ep[i + 1].sex != Sex::Unknown) CHECK(q.sex == ep[i + 1].sex);
    }
  }
}

TEST_CASE("csv round trip") {
  const auto sched = random_hold_schedule(default_env_params().actuators, 3);
  const Dataset d = generate_dataset(loop(), sched, 3, 40, 8);
  std::stringstream ss;
  write_dataset_csv(ss, d);
  CHECK(read_dataset_csv(ss) == d);

  std::stringstream bad("episode,step\n0,0\n");
  CHECK_THROWS_AS(read_dataset_csv(bad), Error);
}

TEST_CASE("schedules are pure") {
  const auto sched = random_hold_schedule(default_env_params().actuators, 4);
  CHECK(sched(17, 5) == sched(17, 5));
  CHECK(sched(17, 4) == sched(17, 7));
  CHECK_FALSE(sched(17, 7) == sched(17, 8));
  const Setpoints u = Setpoints::make(20.0, 0.5, 100.0, 500.0);
  CHECK(constant_schedule(u)(1, 99) == u);
}

}  // TEST_SUITE
