#include "medrl/reward.hpp"

#include <stdexcept>

namespace medrl {

std::string_view gs_mode_name(GsMode m) {
  return m == GsMode::Increment ? "increment" : "level";
}

std::optional<GsMode> parse_gs_mode(std::string_view s) {
  if (s == "increment") return GsMode::Increment;
  if (s == "level") return GsMode::Level;
  return std::nullopt;
}

double compute_reward(double gs, double cost, const RewardParams& p) {
  if (!(cost >= 0.0)) throw std::invalid_argument("cost must be >= 0");
  return p.a * gs - p.b * cost;
}

}  // namespace medrl
