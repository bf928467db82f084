#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "medrl/closed_loop.hpp"
#include "medrl/mlp.hpp"
#include "medrl/reward.hpp"

namespace medrl {

class GrowthModelSet;

// ---------------------------------------------------------------------------
// Observation

inline constexpr std::size_t kObservationSize = 13;
using Observation = std::array<double, kObservationSize>;

enum class ObservationMode {
  /// morphology, climate, period one-hot, episode time
  Augmented,
  /// morphology only; the remaining slots are zero
  MorphologyOnly,
};
std::string_view observation_mode_name(ObservationMode m);
std::optional<ObservationMode> parse_observation_mode(std::string_view s);

/// Layout (fixed):
///   [0..3]  stem / stem_scale, leaves / leaf_scale, area / area_scale, flower / flower_scale
///   [4..7]  climate, each mapped from its actuator range onto [0, 1]
///   [8..11] period one-hot (germination, seedling, mature, blooming)
///   [12]    step / episode_length
struct ObservationEncoder {
  std::array<double, Morphology::kSize> morph_scale{100.0, 50.0, 400.0, 100.0};
  ActuatorParams ranges{};
  ObservationMode mode = ObservationMode::Augmented;

  static ObservationEncoder from(const EnvParams& env, const OracleParams& oracle,
                                 ObservationMode mode = ObservationMode::Augmented);

  Observation encode(const PlantState& plant, const EnvState& env, double step,
                     double episode_length) const;
};

// ---------------------------------------------------------------------------
// Action grid

/// Cartesian grid of setpoint levels, K_v equally spaced levels per variable
/// over its actuator range (K_v = 1 pins the variable at mid-range). Indices
/// are row-major in variable order (temperature most significant, co2 least).
class ActionGrid {
 public:
  ActionGrid(const ActuatorParams& ranges, std::array<std::size_t, kNumVars> levels);
  ActionGrid(const ActuatorParams& ranges, std::size_t levels_per_var)
      : ActionGrid(ranges, {levels_per_var, levels_per_var, levels_per_var, levels_per_var}) {}

  std::size_t size() const { return size_; }
  const std::array<std::size_t, kNumVars>& levels() const { return levels_; }

  double level_value(Var v, std::size_t level) const;
  std::array<std::size_t, kNumVars> level_tuple(std::size_t index) const;
  std::size_t index_of(const std::array<std::size_t, kNumVars>& tuple) const;

  /// Throws std::out_of_range for index >= size().
  Setpoints action_to_setpoints(std::size_t index) const;
  /// Inverse of action_to_setpoints. Throws std::invalid_argument if u is
  /// not a grid point.
  std::size_t setpoints_to_action(const Setpoints& u) const;

 private:
  ActuatorParams ranges_;
  std::array<std::size_t, kNumVars> levels_;
  std::size_t size_;
};

// ---------------------------------------------------------------------------
// Exploration and backups

/// Lowest index among the maxima.
std::size_t argmax(std::span<const double> q);

/// With probability epsilon a uniform action, otherwise argmax(q). Consumes
/// one uniform draw per call plus one index draw when exploring.
std::size_t select_action(std::span<const double> q, double epsilon, Rng& rng);

/// Linear decay from start to end over decay_steps, then held at end.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::size_t decay_steps = 10000;

  double at(std::size_t step) const;
};

/// r if done, else r + gamma * max(next_q).
double td_target(double reward, std::span<const double> next_q, bool done, double gamma);

// ---------------------------------------------------------------------------
// Replay

struct Transition {
  Observation observation{};
  std::size_t action = 0;
  double reward = 0.0;
  Observation next_observation{};
  GrowingPeriod next_period = GrowingPeriod::Germination;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Bounded FIFO; the oldest transition is dropped once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return data_.size(); }
  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;
  /// Uniform draws with replacement. Throws std::logic_error if
  /// size() < batch_size.
  std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::vector<Transition> data_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Q-networks

struct QNet {
  Mlp online;
  Mlp target;

  QNet() = default;
  QNet(std::size_t hidden, std::size_t actions);
  void sync() { target = online; }
};

/// One regression target of a Q update.
struct QTarget {
  Observation observation{};
  std::size_t action = 0;
  double target = 0.0;
};

/// Mean over the batch of (Q(s, a) - y)^2.
double q_loss(const Mlp& net, std::span<const QTarget> batch);
/// Exact gradient of q_loss with respect to the network parameters.
std::vector<double> q_grad(const Mlp& net, std::span<const QTarget> batch);

enum class EpisodeScope {
  /// One episode is the whole run; bootstrapping crosses period changes.
  LifeCycle,
  /// A period change is terminal for the TD backup of the period's network.
  Period,
};
std::string_view episode_scope_name(EpisodeScope s);
std::optional<EpisodeScope> parse_episode_scope(std::string_view s);

struct Hyperparams {
  double gamma = 0.95;
  EpsilonSchedule epsilon{};
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t target_sync_steps = 500;
  std::size_t replay_capacity = 50000;
  std::size_t hidden = 64;
  std::size_t episodes = 60;
  std::size_t episode_length = 288;
  EpisodeScope scope = EpisodeScope::LifeCycle;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-period Q-networks plus what is needed to act with them.
struct Agent {
  std::array<QNet, kNumPeriods> nets;
  ObservationEncoder encoder;
  ActionGrid grid;

  std::vector<double> q_values(const Observation& obs, GrowingPeriod period) const;
  std::size_t greedy_action(const Observation& obs, GrowingPeriod period) const;
};

struct EpisodeSummary {
  std::size_t episode = 0;
  std::size_t steps = 0;
  double episode_return = 0.0;
  double mean_loss = 0.0;
  double epsilon = 0.0;
  GrowingPeriod final_period = GrowingPeriod::Germination;

  friend bool operator==(const EpisodeSummary&, const EpisodeSummary&) = default;
};

struct AgentTrainResult {
  Agent agent;
  std::vector<EpisodeSummary> log;
};

/// Episodic Q-learning against `plant_model` (the surrogate for embedded
/// training, the oracle for the ablation baseline). Deterministic given
/// hp.seed.
AgentTrainResult train_agent(const LoopConfig& config, const PlantModel& plant_model,
                             const ActionGrid& grid, const ObservationEncoder& encoder,
                             const Hyperparams& hp);

enum class TrainMode { Embedded, Oracle };
std::string_view train_mode_name(TrainMode m);
std::optional<TrainMode> parse_train_mode(std::string_view s);

/// Chooses the plant model for `mode`. Throws MissingArtifact in embedded
/// mode when `surrogate` is null or lacks the initial period's model.
AgentTrainResult train_agent(const LoopConfig& config, TrainMode mode,
                             const GrowthModelSet* surrogate, const ActionGrid& grid,
                             const ObservationEncoder& encoder, const Hyperparams& hp);

// ---------------------------------------------------------------------------
// Evaluation

struct EpisodeResult {
  double episode_return = 0.0;
  std::vector<StepOutcome> steps;
};

/// Picks an action index from (observation, period, step, episode rng).
using Policy = std::function<std::size_t(const Observation&, GrowingPeriod, std::size_t, Rng&)>;

Policy greedy_policy(const Agent& agent);
Policy random_policy(std::size_t actions);
/// Replays a fixed action sequence (holding the last action past its end).
Policy sequence_policy(std::vector<std::size_t> actions);

/// Rolls `policy` against the crop oracle for `episodes` episodes of
/// `episode_length` steps. Episodes run in parallel; each uses substreams of
/// `seed` indexed by the episode number.
std::vector<EpisodeResult> evaluate_policy(const LoopConfig& config, const Policy& policy,
                                           const ActionGrid& grid,
                                           const ObservationEncoder& encoder,
                                           std::size_t episodes, std::size_t episode_length,
                                           std::uint64_t seed);

double mean_return(const std::vector<EpisodeResult>& results);

}  // namespace medrl
