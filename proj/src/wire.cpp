#include "medrl/wire.hpp"

#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <set>

#include "json.hpp"
#include "medrl/csv.hpp"

namespace medrl::wire {

using nlohmann::json;

std::string_view error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedSyntax: return "malformed-syntax";
    case ErrorKind::UnknownType: return "unknown-type";
    case ErrorKind::InvariantViolation: return "invariant-violation";
  }
  return "?";
}

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Undecodable: return "undecodable";
    case ViolationKind::NonMonotonicSeq: return "non-monotonic-seq";
    case ViolationKind::UnackedCommand: return "unacked-command";
    case ViolationKind::UnexpectedAck: return "unexpected-ack";
  }
  return "?";
}

namespace {

bool metric_value_ok(Var v, double x) {
  const auto i = static_cast<std::size_t>(v);
  return std::isfinite(x) && x >= PhysicalBounds::lo[i] && x <= PhysicalBounds::hi[i];
}

bool morphology_ok(const Morphology& m) {
  for (double x : m.to_array()) {
    if (!std::isfinite(x) || x < 0.0) return false;
  }
  return m.leaf_count == std::floor(m.leaf_count) && m.leaf_count < 9.007199254740992e15;
}

struct Validator {
  bool operator()(const SensorReading& s) const {
    return !s.node_id.empty() && metric_value_ok(s.metric, s.value);
  }
  bool operator()(const MorphReport& m) const {
    return !m.node_id.empty() && morphology_ok(m.morphology);
  }
  bool operator()(const SetpointCommand& c) const {
    for (Var v : kAllVars) {
      if (!metric_value_ok(v, c.setpoints[v])) return false;
    }
    return true;
  }
  bool operator()(const Ack&) const { return true; }
};

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }
std::string num(double v) { return csv::format(v == 0.0 ? 0.0 : v); }

struct Encoder {
  std::string operator()(const SensorReading& s) const {
    return R"({"type":"sensor","node_id":)" + json_string(s.node_id) + R"(,"metric":)" +
           json_string(var_name(s.metric)) + R"(,"value":)" + num(s.value) +
           R"(,"ts":)" + std::to_string(s.ts) + "}\n";
  }
  std::string operator()(const MorphReport& m) const {
    return R"({"type":"morph","node_id":)" + json_string(m.node_id) + R"(,"stem_length_cm":)" +
           num(m.morphology.stem_length_cm) + R"(,"leaf_count":)" +
           std::to_string(static_cast<std::uint64_t>(m.morphology.leaf_count)) +
           R"(,"leaf_area_cm2":)" + num(m.morphology.leaf_area_cm2) +
           R"(,"flower_volume_cm3":)" + num(m.morphology.flower_volume_cm3) +
           R"(,"ts":)" + std::to_string(m.ts) + "}\n";
  }
  std::string operator()(const SetpointCommand& c) const {
    std::string out = R"({"type":"setpoint","seq":)" + std::to_string(c.seq);
    for (Var v : kAllVars) out += ",\"" + std::string(var_name(v)) + "\":" + num(c.setpoints[v]);
    return out + R"(,"ts":)" + std::to_string(c.ts) + "}\n";
  }
  std::string operator()(const Ack& a) const {
    return R"({"type":"ack","seq":)" + std::to_string(a.seq) + R"(,"status":)" +
           (a.status == AckStatus::Ok ? "\"ok\"" : "\"rejected\"") + R"(,"ts":)" +
           std::to_string(a.ts) + "}\n";
  }
};

[[noreturn]] void violation(const std::string& what) {
  throw DecodeError(ErrorKind::InvariantViolation, what);
}

/// Field access that enforces presence, type and the exact key set.
class Fields {
 public:
  Fields(const json& obj, std::initializer_list<std::string_view> keys) : obj_(obj) {
    std::set<std::string_view> allowed(keys);
    allowed.insert("type");
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) violation("unexpected field \"" + k + "\"");
    }
    for (std::string_view k : keys) {
      if (!obj.contains(std::string(k))) violation("missing field \"" + std::string(k) + "\"");
    }
  }

  const json& get(std::string_view k) const { return obj_.at(std::string(k)); }

  std::uint64_t uint(std::string_view k) const {
    const json& v = get(k);
    if (!v.is_number_unsigned()) {
      violation("field \"" + std::string(k) + "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  double real(std::string_view k) const {
    const json& v = get(k);
    if (!v.is_number()) violation("field \"" + std::string(k) + "\" must be a number");
    return v.get<double>();
  }
  std::string str(std::string_view k) const {
    const json& v = get(k);
    if (!v.is_string()) violation("field \"" + std::string(k) + "\" must be a string");
    return v.get<std::string>();
  }

 private:
  const json& obj_;
};

Var parse_metric(const std::string& s) {
  for (Var v : kAllVars) {
    if (var_name(v) == s) return v;
  }
  violation("unknown metric \"" + s + "\"");
}

}  // namespace

bool is_valid(const Message& m) { return std::visit(Validator{}, m); }

std::string encode(const Message& m) {
  if (!is_valid(m)) throw std::invalid_argument("wire::encode: message violates invariants");
  return std::visit(Encoder{}, m);
}

Message decode(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.find_first_of("\r\n") != std::string_view::npos) {
    throw DecodeError(ErrorKind::MalformedSyntax, "line break inside a message line");
  }
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DecodeError(ErrorKind::MalformedSyntax, e.what());
  }
  if (!obj.is_object()) throw DecodeError(ErrorKind::MalformedSyntax, "line is not a JSON object");
  const auto type_it = obj.find("type");
  if (type_it == obj.end() || !type_it->is_string()) {
    throw DecodeError(ErrorKind::UnknownType, "missing message type");
  }
  const std::string type = type_it->get<std::string>();

  Message m;
  if (type == "sensor") {
    Fields f(obj, {"node_id", "metric", "value", "ts"});
    m = SensorReading{f.str("node_id"), parse_metric(f.str("metric")), f.real("value"), f.uint("ts")};
  } else if (type == "morph") {
    Fields f(obj, {"node_id", "stem_length_cm", "leaf_count", "leaf_area_cm2", "flower_volume_cm3", "ts"});
    MorphReport r;
    r.node_id = f.str("node_id");
    r.morphology.stem_length_cm = f.real("stem_length_cm");
    r.morphology.leaf_count = static_cast<double>(f.uint("leaf_count"));
    r.morphology.leaf_area_cm2 = f.real("leaf_area_cm2");
    r.morphology.flower_volume_cm3 = f.real("flower_volume_cm3");
    r.ts = f.uint("ts");
    m = r;
  } else if (type == "setpoint") {
    Fields f(obj, {"seq", "temperature_c", "humidity_rel", "light_ppfd", "co2_ppm", "ts"});
    SetpointCommand c;
    c.seq = f.uint("seq");
    for (Var v : kAllVars) c.setpoints[v] = f.real(var_name(v));
    c.ts = f.uint("ts");
    m = c;
  } else if (type == "ack") {
    Fields f(obj, {"seq", "status", "ts"});
    const std::string status = f.str("status");
    if (status != "ok" && status != "rejected") violation("unknown ack status \"" + status + "\"");
    m = Ack{f.uint("seq"), status == "ok" ? AckStatus::Ok : AckStatus::Rejected, f.uint("ts")};
  } else {
    throw DecodeError(ErrorKind::UnknownType, "unknown message type \"" + type + "\"");
  }
  if (!is_valid(m)) violation("message values out of bounds");
  return m;
}

SessionReport session_replay(std::span<const std::string> lines, const ReplayOptions& options) {
  SessionReport report;
  struct Pending {
    std::uint64_t ts;
    std::size_t line;
  };
  std::map<std::uint64_t, std::deque<Pending>> pending;
  bool have_seq = false;
  std::uint64_t last_seq = 0;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i] == "\n") continue;
    Message m;
    try {
      m = decode(lines[i]);
    } catch (const DecodeError& e) {
      report.violations.push_back({ViolationKind::Undecodable, i, e.what()});
      continue;
    }
    if (const auto* c = std::get_if<SetpointCommand>(&m)) {
      if (have_seq && c->seq <= last_seq) {
        report.violations.push_back({ViolationKind::NonMonotonicSeq, i,
                                     "seq " + std::to_string(c->seq) + " after " +
                                         std::to_string(last_seq)});
      }
      if (!have_seq || c->seq > last_seq) last_seq = c->seq;
      have_seq = true;
      pending[c->seq].push_back({c->ts, i});
    } else if (const auto* a = std::get_if<Ack>(&m)) {
      auto it = pending.find(a->seq);
      if (it == pending.end() || it->second.empty()) {
        report.violations.push_back(
            {ViolationKind::UnexpectedAck, i, "ack for unknown seq " + std::to_string(a->seq)});
      } else {
        const Pending p = it->second.front();
        it->second.pop_front();
        if (it->second.empty()) pending.erase(it);
        if (a->ts < p.ts || a->ts - p.ts > options.ack_window_s) {
          report.violations.push_back({ViolationKind::UnackedCommand, p.line,
                                       "seq " + std::to_string(a->seq) + " acked outside window"});
        }
      }
    }
    report.messages.push_back(std::move(m));
  }
  for (const auto& [seq, list] : pending) {
    for (const Pending& p : list) {
      report.violations.push_back(
          {ViolationKind::UnackedCommand, p.line, "seq " + std::to_string(seq) + " never acked"});
    }
  }
  return report;
}

SessionReport session_replay(std::istream& in, const ReplayOptions& options) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return session_replay(lines, options);
}

}  // namespace medrl::wire
