#include "medrl/dataset.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "medrl/csv.hpp"
#include "medrl/error.hpp"

namespace medrl {

std::size_t Dataset::record_count() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.size();
  return n;
}

std::array<std::vector<std::pair<std::size_t, std::size_t>>, kNumPeriods>
Dataset::partition_by_period() const {
  std::array<std::vector<std::pair<std::size_t, std::size_t>>, kNumPeriods> out;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    for (std::size_t s = 0; s < episodes[e].size(); ++s) {
      out[index_of(episodes[e][s].period)].emplace_back(e, s);
    }
  }
  return out;
}

SetpointSchedule random_hold_schedule(const ActuatorParams& actuators, std::size_t hold_steps) {
  if (hold_steps == 0) throw std::invalid_argument("hold_steps must be > 0");
  return [actuators, hold_steps](std::uint64_t episode_seed, std::size_t step) {
    Rng rng(mix64(episode_seed + step / hold_steps));
    Setpoints u;
    for (Var v : kAllVars) {
      const VarActuator& a = actuators[v];
      u[v] = a.range_min + (a.range_max - a.range_min) * uniform01(rng);
    }
    return u;
  };
}

SetpointSchedule constant_schedule(const Setpoints& u) {
  return [u](std::uint64_t, std::size_t) { return u; };
}

namespace {

EpisodeRecords roll_episode(const LoopConfig& config, const OraclePlant& oracle,
                            const SetpointSchedule& schedule, std::size_t episode,
                            std::size_t steps, std::uint64_t seed) {
  ClosedLoop loop(config, oracle, sow_episode(seed, episode, config.oracle),
                  derive_seed(seed, Stream::EnvNoise, episode));
  const std::uint64_t schedule_seed = derive_seed(seed, Stream::Schedule, episode);
  EpisodeRecords out;
  out.reserve(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    Record r;
    r.episode = episode;
    r.step = n;
    r.morphology = loop.plant().morphology;
    const StepOutcome o = loop.step(schedule(schedule_seed, n));
    r.t = o.t;
    r.period = o.period;
    r.sex = o.sex;
    r.env = o.env;
    r.setpoints = o.setpoints;
    out.push_back(r);
  }
  return out;
}

void check_counts(std::size_t episodes, std::size_t steps) {
  if (episodes == 0 || steps == 0) throw std::invalid_argument("episodes and steps must be > 0");
}

}  // namespace

Dataset generate_dataset(const LoopConfig& config, const SetpointSchedule& schedule,
                         std::size_t episodes, std::size_t steps, std::uint64_t seed) {
  check_counts(episodes, steps);
  const OraclePlant oracle(config.oracle);
  Dataset data;
  data.episodes.resize(episodes);
  const auto n = static_cast<std::ptrdiff_t>(episodes);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    data.episodes[e] = roll_episode(config, oracle, schedule, e, steps, seed);
  }
  return data;
}

Dataset generate_dataset_serial(const LoopConfig& config, const SetpointSchedule& schedule,
                                std::size_t episodes, std::size_t steps, std::uint64_t seed) {
  check_counts(episodes, steps);
  const OraclePlant oracle(config.oracle);
  Dataset data;
  for (std::size_t e = 0; e < episodes; ++e) {
    data.episodes.push_back(roll_episode(config, oracle, schedule, e, steps, seed));
  }
  return data;
}

const std::vector<std::string>& dataset_csv_header() {
  static const std::vector<std::string> header = [] {
    std::vector<std::string> h = {"episode", "step", "sim_time_s", "period", "sex"};
    for (Var v : kAllVars) h.emplace_back(var_name(v));
    for (Var v : kAllVars) h.push_back("setpoint_" + std::string(var_name(v)));
    for (std::size_t i = 0; i < Morphology::kSize; ++i) {
      h.emplace_back(morphology_field_name(i));
    }
    return h;
  }();
  return header;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const auto& header = dataset_csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& ep : data.episodes) {
    for (const Record& r : ep) {
      out << r.episode << ',' << r.step << ',' << csv::format(r.t) << ',' << period_name(r.period)
          << ',' << sex_name(r.sex);
      for (double v : r.env.values) out << ',' << csv::format(v);
      for (double v : r.setpoints.values) out << ',' << csv::format(v);
      for (double v : r.morphology.to_array()) out << ',' << csv::format(v);
      out << '\n';
    }
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("dataset csv: empty file");
  const auto& header = dataset_csv_header();
  {
    const auto cols = csv::split(line);
    if (cols.size() != header.size()) throw Error("dataset csv: unexpected header");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] != header[i]) throw Error("dataset csv: unexpected header column " + header[i]);
    }
  }
  Dataset data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = csv::split(line);
    if (cols.size() != header.size()) {
      throw Error("dataset csv line " + std::to_string(lineno) + ": wrong column count");
    }
    try {
      Record r;
      r.episode = csv::parse_uint(cols[0]);
      r.step = csv::parse_uint(cols[1]);
      r.t = csv::parse_double(cols[2]);
      const auto period = parse_period(cols[3]);
      const auto sex = parse_sex(cols[4]);
      if (!period || !sex) throw std::invalid_argument("bad period or sex label");
      r.period = *period;
      r.sex = *sex;
      std::size_t c = 5;
      for (double& v : r.env.values) v = csv::parse_double(cols[c++]);
      for (double& v : r.setpoints.values) v = csv::parse_double(cols[c++]);
      std::array<double, Morphology::kSize> m{};
      for (double& v : m) v = csv::parse_double(cols[c++]);
      r.morphology = Morphology::from_array(m);
      if (r.episode == data.episodes.size()) data.episodes.emplace_back();
      if (r.episode + 1 != data.episodes.size() || r.step != data.episodes.back().size()) {
        throw std::invalid_argument("records out of order");
      }
      data.episodes.back().push_back(r);
    } catch (const std::invalid_argument& e) {
      throw Error("dataset csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return data;
}

}  // namespace medrl
