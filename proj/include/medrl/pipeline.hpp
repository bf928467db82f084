#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "medrl/agent.hpp"
#include "medrl/brute_force.hpp"
#include "medrl/config.hpp"
#include "medrl/dataset.hpp"
#include "medrl/growth_model.hpp"
#include "medrl/wire.hpp"

// Pipeline stages behind the CLI subcommands. Each stage reads its inputs
// from and writes its artifacts to one output directory, and echoes the
// resolved config there as config.json.

namespace medrl::pipeline {

namespace fs = std::filesystem;

void write_config_echo(const RunConfig& cfg, const fs::path& out);

/// dataset.csv
Dataset generate_data(const RunConfig& cfg, const fs::path& out);

struct GrowthReport {
  GrowthModelSet models;
  /// Validation NRMSE per field; empty for periods absent from the data.
  std::array<std::optional<std::array<double, Morphology::kSize>>, kNumPeriods> nrmse;
};

/// dataset.csv -> growth_<period>.json, growth_training.csv, growth_fidelity.csv
GrowthReport train_growth(const RunConfig& cfg, const fs::path& out);

struct GateReport {
  std::size_t snapshots = 0;
  /// Fraction of Germination/Seedling snapshots the thresholds label correctly.
  double threshold_agreement = 0.0;
  bool stage_trained = false;   ///< false when the data lacks Mature or Blooming
  bool sex_trained = false;
  double stage_accuracy = 0.0;  ///< held-out Mature vs Blooming
  double sex_accuracy = 0.0;    ///< held-out Female vs Male
  std::size_t sex_gating_violations = 0;
};

/// Oracle snapshots from the records of `data` (time measured from `start_time_s`).
std::vector<std::pair<FeatureVector, Record>> gate_snapshots(const Dataset& data,
                                                             double start_time_s);

/// dataset.csv -> gate_stage.json, gate_sex.json, gate_report.csv. A classifier
/// whose training split lacks one of its labels is skipped and its file removed.
GateReport train_gate(const RunConfig& cfg, const fs::path& out);
GateReport train_gate(const RunConfig& cfg, const Dataset& data, const fs::path& out);

/// growth_<period>.json (embedded mode) -> qnet_<period>.json, agent_training.csv
AgentTrainResult train_agent(const RunConfig& cfg, const fs::path& out);

/// Loads whichever growth_<period>.json files exist. Throws MissingArtifact
/// ("missing surrogate ...") if there are none.
GrowthModelSet load_growth_models(const fs::path& out);
/// Throws MissingArtifact if any qnet_<period>.json is absent.
Agent load_agent(const RunConfig& cfg, const fs::path& out);

struct EvaluationReport {
  std::vector<double> trained_returns;
  std::vector<double> random_returns;
  double trained_mean = 0.0;
  double random_mean = 0.0;
};

/// qnet_<period>.json -> evaluation.csv, evaluation_summary.csv and, for the
/// first run.log_episodes episodes, episode_<policy>_<i>.csv/.ndjson
EvaluationReport evaluate(const RunConfig& cfg, const fs::path& out);

/// brute_force.json plus the optimal rollout as brute_force_episode.csv/.ndjson
BruteForceResult brute_force(const RunConfig& cfg, const fs::path& out);

/// All stages in order, then the oracle-trained ablation in out/ablation and
/// ablation.csv comparing the two training modes with the random baseline.
void run_all(const RunConfig& cfg, const fs::path& out);

wire::SessionReport replay_wire(const fs::path& ndjson, const wire::ReplayOptions& options);

}  // namespace medrl::pipeline
