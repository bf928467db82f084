#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "medrl/agent.hpp"
#include "medrl/closed_loop.hpp"

namespace medrl {

inline constexpr std::uint64_t kBruteForceCap = 1'000'000;

struct BruteForceResult {
  std::vector<std::size_t> actions;
  double best_return = 0.0;
  std::uint64_t sequences = 0;
};

/// Exhaustive search over every action sequence of length `horizon` through
/// the deterministic greenhouse and crop oracle, maximizing the undiscounted
/// sum of step rewards. Ties go to the lexicographically smallest sequence.
/// The plant is episode 0 of `seed`, matching evaluate_policy.
///
/// Throws std::invalid_argument if any actuator has process noise and
/// std::length_error if grid.size()^horizon exceeds kBruteForceCap.
BruteForceResult brute_force_optimum(const LoopConfig& config, const ActionGrid& grid,
                                     std::size_t horizon, std::uint64_t seed);

/// Single-threaded depth-first reference that shares rollout prefixes.
BruteForceResult brute_force_optimum_serial(const LoopConfig& config, const ActionGrid& grid,
                                            std::size_t horizon, std::uint64_t seed);

/// Undiscounted return of replaying `actions` from the start of episode 0.
double replay_return(const LoopConfig& config, const ActionGrid& grid,
                     const std::vector<std::size_t>& actions, std::uint64_t seed);

}  // namespace medrl
