#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "medrl/closed_loop.hpp"
#include "medrl/wire.hpp"

namespace medrl {

/// One CSV row per control step.
struct EpisodeRow {
  std::size_t step = 0;
  double sim_time_s = 0.0;
  GrowingPeriod period = GrowingPeriod::Germination;
  Sex sex = Sex::Unknown;
  EnvState env{};
  Setpoints setpoints{};
  Morphology morphology{};
  double gs = 0.0;
  double step_cost = 0.0;
  double reward = 0.0;

  static EpisodeRow from(const StepOutcome& o);
  friend bool operator==(const EpisodeRow&, const EpisodeRow&) = default;
};

/// step,sim_time_s,period,sex,<4 climate>,setpoint_<4 climate>,<4 morphology>,gs,step_cost,reward
const std::vector<std::string>& episode_log_header();

void write_episode_csv(std::ostream& out, const std::vector<EpisodeRow>& rows);
/// Throws medrl::Error on a header or row that does not match the schema.
std::vector<EpisodeRow> read_episode_csv(std::istream& in);

/// The wire messages of one step: setpoint command, its ack, the four sensor
/// readings and the morphology report.
std::vector<wire::Message> episode_messages(const std::vector<EpisodeRow>& rows);

/// Writes the CSV and the companion NDJSON session, then replay-validates the
/// session. Throws medrl::Error if the session has any violation.
void write_episode_log(std::ostream& csv_out, std::ostream& ndjson_out,
                       const std::vector<EpisodeRow>& rows);

/// Largest |reward - recomputed reward| over the rows, where the growth term is
/// recomputed from the gs column (minus the previous row's morphology under
/// the row's period rule in increment mode; the first row uses
/// `initial_morphology`).
double reward_replay_error(const std::vector<EpisodeRow>& rows, const RewardParams& reward,
                           const GsWeights& weights, const Morphology& initial_morphology = {});

}  // namespace medrl
