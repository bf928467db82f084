#pragma once

#include <optional>
#include <string_view>

namespace medrl {

/// Whether the growth term of the reward is the growth-situation level or its
/// per-step increment.
enum class GsMode { Increment, Level };

std::string_view gs_mode_name(GsMode m);
std::optional<GsMode> parse_gs_mode(std::string_view s);

struct RewardParams {
  double a = 1.0;  ///< growth coefficient
  double b = 0.5;  ///< cost coefficient
  GsMode gs_mode = GsMode::Increment;
};

/// a * gs - b * cost. Throws std::invalid_argument if cost < 0.
double compute_reward(double gs, double cost, const RewardParams& p);

}  // namespace medrl
