#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "medrl/agent.hpp"
#include "medrl/closed_loop.hpp"
#include "medrl/growth_model.hpp"
#include "medrl/stage_gate.hpp"

namespace medrl {

inline constexpr int kConfigSchemaVersion = 1;

struct SurrogateConfig {
  GrowthTrainConfig train{};
  std::size_t episodes = 50;     ///< oracle episodes generated for training
  std::size_t steps = 288;       ///< records per generated episode
  std::size_t hold_steps = 12;   ///< random schedule redraw interval
};

struct GateConfig {
  GateThresholds thresholds{};
  double learning_rate = 0.5;
  std::size_t epochs = 2000;
  double test_fraction = 0.2;
};

struct AgentConfig {
  TrainMode mode = TrainMode::Embedded;
  ObservationMode observation = ObservationMode::Augmented;
  std::array<std::size_t, kNumVars> grid_levels{3, 3, 3, 3};
  std::size_t hidden = 64;
  double gamma = 0.95;
  EpsilonSchedule epsilon{};
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t target_sync_steps = 500;
  std::size_t replay_capacity = 50000;
  std::size_t train_episodes = 60;
  EpisodeScope scope = EpisodeScope::LifeCycle;
  RewardParams reward{};
};

struct RunSection {
  std::size_t episode_length = 288;
  std::size_t eval_episodes = 20;
  /// Episodes per policy written as CSV + NDJSON logs by evaluate.
  std::size_t log_episodes = 1;
  std::uint64_t seed = 42;
  double start_time_s = 0.0;
  std::string output_dir = "out";
};

struct RunConfig {
  EnvParams env = default_env_params();
  OracleParams oracle = default_oracle_params();
  SurrogateConfig surrogate{};
  GateConfig gate{};
  AgentConfig agent{};
  std::size_t brute_force_horizon = 3;
  RunSection run{};

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  LoopConfig loop_config() const;
  ActionGrid grid() const;
  ObservationEncoder encoder() const;
  Hyperparams hyperparams() const;
  /// Seed of a named pipeline stage, derived from run.seed.
  std::uint64_t stage_seed(std::string_view stage) const;
};

/// Parses a config document. Missing keys take their defaults; unknown keys,
/// wrong types and a schema_version other than kConfigSchemaVersion are
/// rejected with ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// The resolved config with every default expanded, in a fixed key order.
nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace medrl
