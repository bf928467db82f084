#include "medrl/config.hpp"

#include <fstream>
#include <set>
#include <string_view>

#include "medrl/error.hpp"

namespace medrl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

/// Reads the keys of one JSON object and rejects any key it was not asked for.
class Section {
 public:
  Section(const json* obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (obj_ && !obj_->is_object()) fail("must be an object");
  }

  ~Section() noexcept(false) {
    if (!obj_ || std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!seen_.count(key)) {
        throw ConfigError("config: unknown key \"" + path_ + "." + key + "\"");
      }
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return Section(nullptr, path_ + "." + key);
    return Section(&obj_->at(key), path_ + "." + key);
  }

  const json* find(const char* key) {
    seen_.insert(key);
    if (!obj_) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "must be a number");
      out = v->get<double>();
    }
  }
  void read(const char* key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "must be a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void read_u64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "must be a string");
      out = v->get<std::string>();
    }
  }
  /// A number, or null for "no coupling".
  void read_tau(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out = kNoCoupling;
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "must be a number or null");
      }
    }
  }
  template <class Enum, class Parse>
  void read_enum(const char* key, Enum& out, Parse parse) {
    std::string s;
    read(key, s);
    if (s.empty()) return;
    auto v = parse(s);
    if (!v) fail(key, "has unknown value \"" + s + "\"");
    out = *v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config: " + path_ + " " + what);
  }
  [[noreturn]] void fail(const char* key, const std::string& what) const {
    throw ConfigError("config: " + path_ + "." + key + " " + what);
  }

 private:
  const json* obj_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

void read_var_table(Section s, std::array<double, kNumVars>& out) {
  for (Var v : kAllVars) s.read(std::string(var_name(v)).c_str(), out[static_cast<std::size_t>(v)]);
}

void read_day_cycle(Section s, DayCycle& c) {
  s.read("mean", c.mean);
  s.read("amplitude", c.amplitude);
  s.read("peak_time_s", c.peak_time_s);
  s.read("period_s", c.period_s);
}

ordered_json var_table(const std::array<double, kNumVars>& a) {
  ordered_json j = ordered_json::object();
  for (Var v : kAllVars) j[std::string(var_name(v))] = a[static_cast<std::size_t>(v)];
  return j;
}

ordered_json day_cycle(const DayCycle& c) {
  return {{"mean", c.mean}, {"amplitude", c.amplitude}, {"peak_time_s", c.peak_time_s},
          {"period_s", c.period_s}};
}

ordered_json tau(double t) { return std::isinf(t) ? ordered_json(nullptr) : ordered_json(t); }

}  // namespace

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  Section root(&doc, "$");
  {
    std::size_t version = kConfigSchemaVersion;
    root.read("schema_version", version);
    if (version != static_cast<std::size_t>(kConfigSchemaVersion)) {
      throw ConfigError("config: unsupported schema_version " + std::to_string(version));
    }
  }
  {
    Section env = root.sub("env");
    env.read("dt_s", cfg.env.dt_s);
    env.read("base_cost_per_step", cfg.env.base_cost_per_step);
    Section acts = env.sub("actuators");
    for (Var v : kAllVars) {
      Section a = acts.sub(std::string(var_name(v)).c_str());
      VarActuator& va = cfg.env.actuators[v];
      a.read("tau_actuator_s", va.tau_actuator_s);
      a.read_tau("tau_outdoor_s", va.tau_outdoor_s);
      a.read("range_min", va.range_min);
      a.read("range_max", va.range_max);
      a.read("kappa", va.kappa);
      a.read("noise_sigma", va.noise_sigma);
    }
    Section out = env.sub("outdoor");
    read_day_cycle(out.sub("temperature_c"), cfg.env.outdoor.temperature);
    read_day_cycle(out.sub("light_ppfd"), cfg.env.outdoor.light);
    out.read("humidity_rel", cfg.env.outdoor.humidity_rel);
    out.read("co2_ppm", cfg.env.outdoor.co2_ppm);
  }
  {
    Section o = root.sub("oracle");
    o.read("delta1_cm", cfg.oracle.delta1_cm);
    o.read("delta2_cm", cfg.oracle.delta2_cm);
    o.read("mature_duration_s", cfg.oracle.mature_duration_s);
    o.read("p_female", cfg.oracle.p_female);
    o.read("male_leaf_area_factor", cfg.oracle.male_leaf_area_factor);
    o.read("gs_weight_stem", cfg.oracle.gs_weights.stem);
    o.read("gs_weight_leaf", cfg.oracle.gs_weights.leaf);
    Section periods = o.sub("periods");
    for (GrowingPeriod g : kAllPeriods) {
      Section p = periods.sub(std::string(period_name(g)).c_str());
      PeriodParams& pp = cfg.oracle[g];
      read_var_table(p.sub("optimum"), pp.optimum);
      read_var_table(p.sub("width"), pp.width);
      p.read("r_stem_cm_per_day", pp.r_stem_cm_per_day);
      p.read("stem_max_cm", pp.stem_max_cm);
      p.read("lambda_leaf_per_cm", pp.lambda_leaf_per_cm);
      p.read("alpha_area_cm2", pp.alpha_area_cm2);
      p.read("r_flower_cm3_per_day", pp.r_flower_cm3_per_day);
    }
  }
  {
    Section s = root.sub("surrogate");
    GrowthTrainConfig& t = cfg.surrogate.train;
    s.read("window", t.window);
    s.read("hidden", t.hidden);
    s.read("learning_rate", t.learning_rate);
    s.read("batch_size", t.batch_size);
    s.read("epochs", t.epochs);
    s.read("validation_fraction", t.validation_fraction);
    s.read_enum("optimizer", t.optimizer, [](std::string_view v) -> std::optional<Optimizer> {
      if (v == "adam") return Optimizer::Adam;
      if (v == "sgd") return Optimizer::Sgd;
      return std::nullopt;
    });
    s.read("episodes", cfg.surrogate.episodes);
    s.read("steps", cfg.surrogate.steps);
    s.read("hold_steps", cfg.surrogate.hold_steps);
  }
  {
    Section g = root.sub("gate");
    g.read("delta1_cm", cfg.gate.thresholds.delta1_cm);
    g.read("delta2_cm", cfg.gate.thresholds.delta2_cm);
    g.read("learning_rate", cfg.gate.learning_rate);
    g.read("epochs", cfg.gate.epochs);
    g.read("test_fraction", cfg.gate.test_fraction);
  }
  {
    Section a = root.sub("agent");
    AgentConfig& ac = cfg.agent;
    a.read_enum("mode", ac.mode, parse_train_mode);
    a.read_enum("observation", ac.observation, parse_observation_mode);
    if (const json* levels = a.find("grid_levels")) {
      if (levels->is_number_unsigned()) {
        ac.grid_levels.fill(levels->get<std::size_t>());
      } else if (levels->is_array() && levels->size() == kNumVars &&
                 std::all_of(levels->begin(), levels->end(),
                             [](const json& x) { return x.is_number_unsigned(); })) {
        for (std::size_t i = 0; i < kNumVars; ++i) ac.grid_levels[i] = (*levels)[i].get<std::size_t>();
      } else {
        a.fail("grid_levels", "must be a non-negative integer or an array of 4");
      }
    }
    a.read("hidden", ac.hidden);
    a.read("gamma", ac.gamma);
    a.read("epsilon_start", ac.epsilon.start);
    a.read("epsilon_end", ac.epsilon.end);
    a.read("epsilon_decay_steps", ac.epsilon.decay_steps);
    a.read("learning_rate", ac.learning_rate);
    a.read("batch_size", ac.batch_size);
    a.read("target_sync_steps", ac.target_sync_steps);
    a.read("replay_capacity", ac.replay_capacity);
    a.read("train_episodes", ac.train_episodes);
    a.read_enum("episode_scope", ac.scope, parse_episode_scope);
    Section r = a.sub("reward");
    r.read("a", ac.reward.a);
    r.read("b", ac.reward.b);
    r.read_enum("gs_mode", ac.reward.gs_mode, parse_gs_mode);
  }
  {
    Section b = root.sub("brute_force");
    b.read("horizon", cfg.brute_force_horizon);
  }
  {
    Section r = root.sub("run");
    r.read("episode_length", cfg.run.episode_length);
    r.read("eval_episodes", cfg.run.eval_episodes);
    r.read("log_episodes", cfg.run.log_episodes);
    r.read_u64("seed", cfg.run.seed);
    r.read("start_time_s", cfg.run.start_time_s);
    r.read("output_dir", cfg.run.output_dir);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

void RunConfig::validate() const {
  try {
    env.actuators.validate();
    check_stability(env.actuators, env.dt_s);
    if (!(env.base_cost_per_step >= 0.0)) throw std::invalid_argument("base_cost_per_step must be >= 0");
    if (!(env.outdoor.temperature.period_s > 0.0) || !(env.outdoor.light.period_s > 0.0)) {
      throw std::invalid_argument("outdoor cycle period must be > 0");
    }
    oracle.validate();
    gate.thresholds.validate();
    hyperparams().validate();
    for (std::size_t k : agent.grid_levels) {
      if (k == 0) throw std::invalid_argument("grid_levels must be >= 1");
    }
    if (!(agent.reward.a >= 0.0) || !(agent.reward.b >= 0.0)) {
      throw std::invalid_argument("reward coefficients must be >= 0");
    }
    const GrowthTrainConfig& t = surrogate.train;
    if (t.window == 0 || t.hidden == 0 || t.batch_size == 0 || t.epochs == 0 ||
        !(t.learning_rate > 0.0) || !(t.validation_fraction > 0.0 && t.validation_fraction < 1.0)) {
      throw std::invalid_argument("surrogate training settings out of range");
    }
    if (surrogate.episodes == 0 || surrogate.steps == 0 || surrogate.hold_steps == 0) {
      throw std::invalid_argument("surrogate data counts must be > 0");
    }
    if (!(gate.learning_rate > 0.0) || !(gate.test_fraction > 0.0 && gate.test_fraction < 1.0)) {
      throw std::invalid_argument("gate training settings out of range");
    }
    if (brute_force_horizon == 0) throw std::invalid_argument("brute_force.horizon must be > 0");
    if (run.eval_episodes == 0) throw std::invalid_argument("run.eval_episodes must be > 0");
    if (!(run.start_time_s >= 0.0)) throw std::invalid_argument("run.start_time_s must be >= 0");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

LoopConfig RunConfig::loop_config() const {
  LoopConfig lc;
  lc.env = env;
  lc.oracle = oracle;
  lc.reward = agent.reward;
  lc.window = surrogate.train.window;
  lc.start_time_s = run.start_time_s;
  return lc;
}

ActionGrid RunConfig::grid() const { return ActionGrid(env.actuators, agent.grid_levels); }

ObservationEncoder RunConfig::encoder() const {
  return ObservationEncoder::from(env, oracle, agent.observation);
}

Hyperparams RunConfig::hyperparams() const {
  Hyperparams hp;
  hp.gamma = agent.gamma;
  hp.epsilon = agent.epsilon;
  hp.learning_rate = agent.learning_rate;
  hp.batch_size = agent.batch_size;
  hp.target_sync_steps = agent.target_sync_steps;
  hp.replay_capacity = agent.replay_capacity;
  hp.hidden = agent.hidden;
  hp.episodes = agent.train_episodes;
  hp.episode_length = run.episode_length;
  hp.scope = agent.scope;
  hp.seed = stage_seed("train-agent");
  return hp;
}

std::uint64_t RunConfig::stage_seed(std::string_view stage) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(run.seed ^ h);
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;

  ordered_json env;
  env["dt_s"] = cfg.env.dt_s;
  env["base_cost_per_step"] = cfg.env.base_cost_per_step;
  ordered_json acts = ordered_json::object();
  for (Var v : kAllVars) {
    const VarActuator& a = cfg.env.actuators[v];
    acts[std::string(var_name(v))] = {{"tau_actuator_s", a.tau_actuator_s},
                                      {"tau_outdoor_s", tau(a.tau_outdoor_s)},
                                      {"range_min", a.range_min},
                                      {"range_max", a.range_max},
                                      {"kappa", a.kappa},
                                      {"noise_sigma", a.noise_sigma}};
  }
  env["actuators"] = acts;
  env["outdoor"] = {{"temperature_c", day_cycle(cfg.env.outdoor.temperature)},
                    {"light_ppfd", day_cycle(cfg.env.outdoor.light)},
                    {"humidity_rel", cfg.env.outdoor.humidity_rel},
                    {"co2_ppm", cfg.env.outdoor.co2_ppm}};
  j["env"] = env;

  ordered_json o;
  o["delta1_cm"] = cfg.oracle.delta1_cm;
  o["delta2_cm"] = cfg.oracle.delta2_cm;
  o["mature_duration_s"] = cfg.oracle.mature_duration_s;
  o["p_female"] = cfg.oracle.p_female;
  o["male_leaf_area_factor"] = cfg.oracle.male_leaf_area_factor;
  o["gs_weight_stem"] = cfg.oracle.gs_weights.stem;
  o["gs_weight_leaf"] = cfg.oracle.gs_weights.leaf;
  ordered_json periods = ordered_json::object();
  for (GrowingPeriod g : kAllPeriods) {
    const PeriodParams& p = cfg.oracle[g];
    periods[std::string(period_name(g))] = {{"optimum", var_table(p.optimum)},
                                            {"width", var_table(p.width)},
                                            {"r_stem_cm_per_day", p.r_stem_cm_per_day},
                                            {"stem_max_cm", p.stem_max_cm},
                                            {"lambda_leaf_per_cm", p.lambda_leaf_per_cm},
                                            {"alpha_area_cm2", p.alpha_area_cm2},
                                            {"r_flower_cm3_per_day", p.r_flower_cm3_per_day}};
  }
  o["periods"] = periods;
  j["oracle"] = o;

  const GrowthTrainConfig& t = cfg.surrogate.train;
  j["surrogate"] = {{"window", t.window},
                    {"hidden", t.hidden},
                    {"learning_rate", t.learning_rate},
                    {"batch_size", t.batch_size},
                    {"epochs", t.epochs},
                    {"validation_fraction", t.validation_fraction},
                    {"optimizer", t.optimizer == Optimizer::Adam ? "adam" : "sgd"},
                    {"episodes", cfg.surrogate.episodes},
                    {"steps", cfg.surrogate.steps},
                    {"hold_steps", cfg.surrogate.hold_steps}};

  j["gate"] = {{"delta1_cm", cfg.gate.thresholds.delta1_cm},
               {"delta2_cm", cfg.gate.thresholds.delta2_cm},
               {"learning_rate", cfg.gate.learning_rate},
               {"epochs", cfg.gate.epochs},
               {"test_fraction", cfg.gate.test_fraction}};

  const AgentConfig& a = cfg.agent;
  ordered_json levels = ordered_json::array();
  for (std::size_t k : a.grid_levels) levels.push_back(k);
  j["agent"] = {{"mode", train_mode_name(a.mode)},
                {"observation", observation_mode_name(a.observation)},
                {"grid_levels", levels},
                {"hidden", a.hidden},
                {"gamma", a.gamma},
                {"epsilon_start", a.epsilon.start},
                {"epsilon_end", a.epsilon.end},
                {"epsilon_decay_steps", a.epsilon.decay_steps},
                {"learning_rate", a.learning_rate},
                {"batch_size", a.batch_size},
                {"target_sync_steps", a.target_sync_steps},
                {"replay_capacity", a.replay_capacity},
                {"train_episodes", a.train_episodes},
                {"episode_scope", episode_scope_name(a.scope)},
                {"reward", {{"a", a.reward.a}, {"b", a.reward.b},
                            {"gs_mode", gs_mode_name(a.reward.gs_mode)}}}};

  j["brute_force"] = {{"horizon", cfg.brute_force_horizon}};
  j["run"] = {{"episode_length", cfg.run.episode_length},
              {"eval_episodes", cfg.run.eval_episodes},
              {"log_episodes", cfg.run.log_episodes},
              {"seed", cfg.run.seed},
              {"start_time_s", cfg.run.start_time_s},
              {"output_dir", cfg.run.output_dir}};
  return j;
}

}  // namespace medrl
