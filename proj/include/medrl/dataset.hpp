#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "medrl/closed_loop.hpp"

namespace medrl {

/// One recorded step: the climate during step n, the morphology at the start
/// of step n, and the period/sex in force.
struct Record {
  std::uint64_t episode = 0;
  std::uint64_t step = 0;
  double t = 0.0;
  GrowingPeriod period = GrowingPeriod::Germination;
  Sex sex = Sex::Unknown;
  EnvState env{};
  Setpoints setpoints{};
  Morphology morphology{};

  friend bool operator==(const Record&, const Record&) = default;
};

/// Records of one episode, in step order.
using EpisodeRecords = std::vector<Record>;

struct Dataset {
  std::vector<EpisodeRecords> episodes;

  std::size_t record_count() const;
  /// Indices (episode, step) of the records carrying each period label.
  std::array<std::vector<std::pair<std::size_t, std::size_t>>, kNumPeriods> partition_by_period()
      const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Setpoints for step `step` of the episode whose schedule seed is
/// `episode_seed`. Must be a pure function of its arguments.
using SetpointSchedule = std::function<Setpoints(std::uint64_t episode_seed, std::size_t step)>;

/// Uniform in-range setpoints, redrawn every `hold_steps` steps.
SetpointSchedule random_hold_schedule(const ActuatorParams& actuators, std::size_t hold_steps);
SetpointSchedule constant_schedule(const Setpoints& u);

/// Rolls the greenhouse and the crop oracle forward for `episodes` episodes of
/// `steps` records each. Episodes are independent and generated in parallel;
/// every substream is derived from `seed` and the episode index, so the
/// result does not depend on the thread count.
Dataset generate_dataset(const LoopConfig& config, const SetpointSchedule& schedule,
                         std::size_t episodes, std::size_t steps, std::uint64_t seed);

/// Single-threaded reference for generate_dataset.
Dataset generate_dataset_serial(const LoopConfig& config, const SetpointSchedule& schedule,
                                std::size_t episodes, std::size_t steps, std::uint64_t seed);

/// Column order of the dataset CSV.
const std::vector<std::string>& dataset_csv_header();
void write_dataset_csv(std::ostream& out, const Dataset& data);
/// Throws medrl::Error on a malformed file.
Dataset read_dataset_csv(std::istream& in);

}  // namespace medrl
