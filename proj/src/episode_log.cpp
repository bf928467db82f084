#include "medrl/episode_log.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "medrl/csv.hpp"
#include "medrl/error.hpp"

namespace medrl {

EpisodeRow EpisodeRow::from(const StepOutcome& o) {
  return EpisodeRow{o.step, o.t,           o.period, o.sex,    o.env,
                    o.setpoints, o.morphology, o.gs, o.cost, o.reward};
}

const std::vector<std::string>& episode_log_header() {
  static const std::vector<std::string> header = [] {
    std::vector<std::string> h = {"step", "sim_time_s", "period", "sex"};
    for (Var v : kAllVars) h.emplace_back(var_name(v));
    for (Var v : kAllVars) h.push_back("setpoint_" + std::string(var_name(v)));
    for (std::size_t i = 0; i < Morphology::kSize; ++i) h.emplace_back(morphology_field_name(i));
    h.insert(h.end(), {"gs", "step_cost", "reward"});
    return h;
  }();
  return header;
}

void write_episode_csv(std::ostream& out, const std::vector<EpisodeRow>& rows) {
  const auto& header = episode_log_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const EpisodeRow& r : rows) {
    out << r.step << ',' << csv::format(r.sim_time_s) << ',' << period_name(r.period) << ','
        << sex_name(r.sex);
    for (double v : r.env.values) out << ',' << csv::format(v);
    for (double v : r.setpoints.values) out << ',' << csv::format(v);
    for (double v : r.morphology.to_array()) out << ',' << csv::format(v);
    out << ',' << csv::format(r.gs) << ',' << csv::format(r.step_cost) << ','
        << csv::format(r.reward) << '\n';
  }
}

std::vector<EpisodeRow> read_episode_csv(std::istream& in) {
  const auto& header = episode_log_header();
  std::string line;
  if (!std::getline(in, line)) throw Error("episode csv: empty file");
  const auto head = csv::split(line);
  if (!std::equal(head.begin(), head.end(), header.begin(), header.end())) {
    throw Error("episode csv: header does not match the episode log schema");
  }
  std::vector<EpisodeRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = csv::split(line);
    if (c.size() != header.size()) {
      throw Error("episode csv line " + std::to_string(lineno) + ": wrong column count");
    }
    try {
      EpisodeRow r;
      r.step = csv::parse_uint(c[0]);
      r.sim_time_s = csv::parse_double(c[1]);
      const auto period = parse_period(c[2]);
      const auto sex = parse_sex(c[3]);
      if (!period || !sex) throw std::invalid_argument("bad period or sex label");
      r.period = *period;
      r.sex = *sex;
      std::size_t k = 4;
      for (double& v : r.env.values) v = csv::parse_double(c[k++]);
      for (double& v : r.setpoints.values) v = csv::parse_double(c[k++]);
      std::array<double, Morphology::kSize> m{};
      for (double& v : m) v = csv::parse_double(c[k++]);
      r.morphology = Morphology::from_array(m);
      r.gs = csv::parse_double(c[k++]);
      r.step_cost = csv::parse_double(c[k++]);
      r.reward = csv::parse_double(c[k++]);
      rows.push_back(r);
    } catch (const std::invalid_argument& e) {
      throw Error("episode csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<wire::Message> episode_messages(const std::vector<EpisodeRow>& rows) {
  std::vector<wire::Message> out;
  out.reserve(rows.size() * 7);
  for (const EpisodeRow& r : rows) {
    const auto ts = static_cast<std::uint64_t>(std::llround(std::max(0.0, r.sim_time_s)));
    const std::uint64_t seq = r.step + 1;
    out.emplace_back(wire::SetpointCommand{seq, r.setpoints, ts});
    out.emplace_back(wire::Ack{seq, wire::AckStatus::Ok, ts});
    for (Var v : kAllVars) {
      out.emplace_back(wire::SensorReading{"sensor-" + std::string(var_name(v)), v, r.env[v], ts});
    }
    out.emplace_back(wire::MorphReport{"camera-1", r.morphology, ts});
  }
  return out;
}

void write_episode_log(std::ostream& csv_out, std::ostream& ndjson_out,
                       const std::vector<EpisodeRow>& rows) {
  for (const EpisodeRow& r : rows) {
    if (!std::isfinite(r.reward) || !std::isfinite(r.gs) || !(r.step_cost >= 0.0)) {
      throw Error("episode row " + std::to_string(r.step) + " violates the log schema");
    }
  }
  write_episode_csv(csv_out, rows);
  std::vector<std::string> lines;
  for (const wire::Message& m : episode_messages(rows)) lines.push_back(wire::encode(m));
  const wire::SessionReport report = wire::session_replay(lines);
  if (!report.violations.empty()) {
    const wire::Violation& v = report.violations.front();
    throw Error("wire log failed replay: " + std::string(wire::violation_kind_name(v.kind)) +
                " at line " + std::to_string(v.line) + ": " + v.detail);
  }
  for (const std::string& l : lines) ndjson_out << l;
}

double reward_replay_error(const std::vector<EpisodeRow>& rows, const RewardParams& reward,
                           const GsWeights& weights, const Morphology& initial_morphology) {
  double worst = 0.0;
  Morphology prev = initial_morphology;
  for (const EpisodeRow& r : rows) {
    const double growth =
        reward.gs_mode == GsMode::Increment ? r.gs - gs_rule(r.period, prev, weights) : r.gs;
    worst = std::max(worst, std::abs(compute_reward(growth, r.step_cost, reward) - r.reward));
    prev = r.morphology;
  }
  return worst;
}

}  // namespace medrl
