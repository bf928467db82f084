#include "medrl/brute_force.hpp"

#include <limits>
#include <stdexcept>

namespace medrl {

namespace {

std::uint64_t search_size(const LoopConfig& config, const ActionGrid& grid, std::size_t horizon) {
  for (Var v : kAllVars) {
    if (config.env.actuators[v].noise_sigma != 0.0) {
      throw std::invalid_argument("brute force needs a noiseless environment");
    }
  }
  if (horizon == 0) throw std::invalid_argument("horizon must be > 0");
  std::uint64_t total = 1;
  for (std::size_t h = 0; h < horizon; ++h) {
    total *= grid.size();
    if (total > kBruteForceCap) {
      throw std::length_error("search space exceeds " + std::to_string(kBruteForceCap) +
                              " sequences");
    }
  }
  return total;
}

ClosedLoop start(const LoopConfig& config, const OraclePlant& oracle, std::uint64_t seed) {
  return ClosedLoop(config, oracle, sow_episode(seed, 0, config.oracle),
                    derive_seed(seed, Stream::EnvNoise, 0));
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
};

}  // namespace

BruteForceResult brute_force_optimum(const LoopConfig& config, const ActionGrid& grid,
                                     std::size_t horizon, std::uint64_t seed) {
  const std::uint64_t total = search_size(config, grid, horizon);
  const OraclePlant oracle(config.oracle);
  const ClosedLoop initial = start(config, oracle, seed);
  const std::uint64_t A = grid.size();
  std::vector<Setpoints> setpoints(A);
  for (std::uint64_t a = 0; a < A; ++a) setpoints[a] = grid.action_to_setpoints(a);

  Best global;
#pragma omp parallel
  {
    Best local;
    std::vector<std::size_t> digits(horizon);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(total); ++i) {
      std::uint64_t rest = static_cast<std::uint64_t>(i);
      for (std::size_t h = horizon; h-- > 0;) {
        digits[h] = rest % A;
        rest /= A;
      }
      ClosedLoop loop = initial;
      double ret = 0.0;
      for (std::size_t h = 0; h < horizon; ++h) ret += loop.step(setpoints[digits[h]]).reward;
      if (ret > local.value) local = {ret, static_cast<std::uint64_t>(i)};
    }
#pragma omp critical
    {
      if (local.value > global.value ||
          (local.value == global.value && local.index < global.index)) {
        global = local;
      }
    }
  }

  BruteForceResult r;
  r.best_return = global.value;
  r.sequences = total;
  r.actions.resize(horizon);
  std::uint64_t rest = global.index;
  for (std::size_t h = horizon; h-- > 0;) {
    r.actions[h] = rest % A;
    rest /= A;
  }
  return r;
}

namespace {

struct Search {
  const ActionGrid& grid;
  std::size_t horizon;
  std::vector<std::size_t> prefix;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_actions;
  std::uint64_t visited = 0;

  void descend(const ClosedLoop& loop, double acc) {
    if (prefix.size() == horizon) {
      ++visited;
      if (acc > best) {
        best = acc;
        best_actions = prefix;
      }
      return;
    }
    for (std::size_t a = 0; a < grid.size(); ++a) {
      ClosedLoop next = loop;
      const double r = next.step(grid.action_to_setpoints(a)).reward;
      prefix.push_back(a);
      descend(next, acc + r);
      prefix.pop_back();
    }
  }
};

}  // namespace

BruteForceResult brute_force_optimum_serial(const LoopConfig& config, const ActionGrid& grid,
                                            std::size_t horizon, std::uint64_t seed) {
  search_size(config, grid, horizon);
  const OraclePlant oracle(config.oracle);
  Search s{grid, horizon, {}};
  s.descend(start(config, oracle, seed), 0.0);
  return {s.best_actions, s.best, s.visited};
}

double replay_return(const LoopConfig& config, const ActionGrid& grid,
                     const std::vector<std::size_t>& actions, std::uint64_t seed) {
  const OraclePlant oracle(config.oracle);
  ClosedLoop loop = start(config, oracle, seed);
  double ret = 0.0;
  for (std::size_t a : actions) ret += loop.step(grid.action_to_setpoints(a)).reward;
  return ret;
}

}  // namespace medrl
