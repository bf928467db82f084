#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "medrl/crop.hpp"
#include "medrl/env.hpp"
#include "medrl/reward.hpp"

namespace medrl {

/// How the plant evolves inside the loop: the ground-truth oracle or a learned
/// surrogate.
class PlantModel {
 public:
  virtual ~PlantModel() = default;

  /// Plant state after dt seconds. `window` holds the most recent climate
  /// readings, oldest first, ending with the reading of the current step.
  virtual PlantState advance(const PlantState& p, std::span<const EnvState> window,
                             double dt) const = 0;
};

class OraclePlant final : public PlantModel {
 public:
  explicit OraclePlant(OracleParams params) : params_(std::move(params)) {}

  PlantState advance(const PlantState& p, std::span<const EnvState> window,
                     double dt) const override;
  const OracleParams& params() const { return params_; }

 private:
  OracleParams params_;
};

struct LoopConfig {
  EnvParams env = default_env_params();
  OracleParams oracle = default_oracle_params();
  RewardParams reward{};
  /// Climate history length handed to the plant model.
  std::size_t window = 4;
  double start_time_s = 0.0;
};

/// Everything that happened during one control step. Period and sex are the
/// values in force during the step; morphology and GS are end-of-step values.
struct StepOutcome {
  std::size_t step = 0;
  double t = 0.0;
  GrowingPeriod period = GrowingPeriod::Germination;
  Sex sex = Sex::Unknown;
  EnvState env{};
  Setpoints setpoints{};
  Morphology morphology{};
  /// End-of-step growth situation under the rule of `period`.
  double gs = 0.0;
  /// gs minus the start-of-step value under the same rule.
  double gs_increment = 0.0;
  double cost = 0.0;
  double reward = 0.0;
  bool period_changed = false;
};

/// One plant in one greenhouse. A step applies the setpoints to the climate
/// simulator, lets the plant grow in the resulting climate, and scores the
/// step with the reward law.
///
/// Each step n: climate x_{n-1} -> x_n under setpoints u_n, then plant
/// m_n -> m_{n+1} under x_n.
class ClosedLoop {
 public:
  ClosedLoop(const LoopConfig& config, const PlantModel& plant_model, PlantState initial_plant,
             std::uint64_t noise_seed);

  const EnvState& env() const { return history_.back(); }
  const PlantState& plant() const { return plant_; }
  double time() const { return t_; }
  std::size_t step_index() const { return step_; }
  std::span<const EnvState> history() const { return history_; }

  StepOutcome step(const Setpoints& u);

 private:
  const LoopConfig* config_;
  const PlantModel* model_;
  PlantState plant_;
  std::vector<EnvState> history_;
  Rng noise_rng_;
  double t_;
  std::size_t step_ = 0;
};

/// Plant for episode `episode` under root seed `seed`: sex drawn from the
/// sex substream.
PlantState sow_episode(std::uint64_t seed, std::uint64_t episode, const OracleParams& oracle);

}  // namespace medrl
