#include "medrl/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include "medrl/csv.hpp"
#include "medrl/episode_log.hpp"
#include "medrl/error.hpp"
#include "medrl/weights_io.hpp"

namespace medrl::pipeline {

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

std::string growth_file(GrowingPeriod p) { return "growth_" + std::string(period_name(p)) + ".json"; }
std::string qnet_file(GrowingPeriod p) { return "qnet_" + std::string(period_name(p)) + ".json"; }

std::string padded(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

Dataset read_dataset(const fs::path& out) {
  const fs::path path = out / "dataset.csv";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("missing dataset " + path.string() + " (run generate-data first)");
  return read_dataset_csv(in);
}

nlohmann::ordered_json growth_config_json(const GrowthTrainConfig& t) {
  return {{"window", t.window},
          {"hidden", t.hidden},
          {"learning_rate", t.learning_rate},
          {"batch_size", t.batch_size},
          {"epochs", t.epochs},
          {"validation_fraction", t.validation_fraction},
          {"optimizer", t.optimizer == Optimizer::Adam ? "adam" : "sgd"}};
}

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
  return idx;
}

void write_episode(const fs::path& out, const std::string& stem, const EpisodeResult& ep) {
  std::vector<EpisodeRow> rows;
  rows.reserve(ep.steps.size());
  for (const StepOutcome& s : ep.steps) rows.push_back(EpisodeRow::from(s));
  std::ofstream csv = open_out(out / (stem + ".csv"));
  std::ofstream nd = open_out(out / (stem + ".ndjson"));
  write_episode_log(csv, nd, rows);
}

}  // namespace

void write_config_echo(const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  write_json_file(out / "config.json", to_json(cfg));
}

Dataset generate_data(const RunConfig& cfg, const fs::path& out) {
  write_config_echo(cfg, out);
  const Dataset data =
      generate_dataset(cfg.loop_config(),
                       random_hold_schedule(cfg.env.actuators, cfg.surrogate.hold_steps),
                       cfg.surrogate.episodes, cfg.surrogate.steps, cfg.stage_seed("generate-data"));
  std::ofstream f = open_out(out / "dataset.csv");
  write_dataset_csv(f, data);
  return data;
}

GrowthReport train_growth(const RunConfig& cfg, const fs::path& out) {
  write_config_echo(cfg, out);
  const Dataset data = read_dataset(out);
  const std::vector<WindowSample> windows = build_windows(data, cfg.surrogate.train.window);
  const auto ranges = morphology_ranges(data);

  GrowthReport report;
  std::ofstream log = open_out(out / "growth_training.csv");
  log << "period,epoch,train_loss,validation_loss\n";
  std::ofstream fid = open_out(out / "growth_fidelity.csv");
  fid << "period,train_samples,validation_samples";
  for (std::size_t f = 0; f < Morphology::kSize; ++f) fid << ",nrmse_" << morphology_field_name(f);
  fid << '\n';

  for (GrowingPeriod p : kAllPeriods) {
    std::vector<WindowSample> samples;
    for (const WindowSample& w : windows) {
      if (w.period == p) samples.push_back(w);
    }
    // A period needs at least two episodes to have a validation split.
    std::vector<std::uint64_t> eps;
    for (const WindowSample& w : samples) {
      if (eps.empty() || eps.back() != w.episode) eps.push_back(w.episode);
    }
    if (eps.size() < 2) continue;

    GrowthTrainConfig tc = cfg.surrogate.train;
    tc.seed = cfg.stage_seed("train-growth/" + std::string(period_name(p)));
    GrowthTrainResult r = train(samples, tc);
    for (std::size_t e = 0; e < r.train_loss.size(); ++e) {
      log << period_name(p) << ',' << e << ',' << csv::format(r.train_loss[e]) << ','
          << csv::format(r.validation_loss[e]) << '\n';
    }
    write_json_file(out / growth_file(p),
                    growth_model_to_json(r.model, p, tc.seed, growth_config_json(tc)));
    report.models.set(p, r.model);
    const auto nrmse = normalized_rmse(report.models, p, r.validation_samples, ranges);
    report.nrmse[index_of(p)] = nrmse;
    fid << period_name(p) << ',' << r.train_samples.size() << ',' << r.validation_samples.size();
    for (double v : nrmse) fid << ',' << csv::format(v);
    fid << '\n';
  }
  return report;
}

std::vector<std::pair<FeatureVector, Record>> gate_snapshots(const Dataset& data,
                                                             double start_time_s) {
  std::vector<std::pair<FeatureVector, Record>> snaps;
  snaps.reserve(data.record_count());
  for (const EpisodeRecords& ep : data.episodes) {
    for (const Record& r : ep) snaps.emplace_back(FeatureVector::from(r.morphology, r.t - start_time_s), r);
  }
  return snaps;
}

GateReport train_gate(const RunConfig& cfg, const fs::path& out) {
  return train_gate(cfg, read_dataset(out), out);
}

GateReport train_gate(const RunConfig& cfg, const Dataset& data, const fs::path& out) {
  write_config_echo(cfg, out);
  const std::uint64_t seed = cfg.stage_seed("train-gate");
  const auto snaps = gate_snapshots(data, cfg.run.start_time_s);

  // Hold out whole episodes.
  Rng rng = make_rng(seed, Stream::Shuffle);
  const std::vector<std::size_t> order = permutation(data.episodes.size(), rng);
  const std::size_t n_test = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.gate.test_fraction * static_cast<double>(order.size())));
  std::vector<bool> is_test(data.episodes.size(), false);
  for (std::size_t i = 0; i < n_test && i < order.size(); ++i) is_test[order[i]] = true;

  GateReport rep;
  rep.snapshots = snaps.size();
  std::size_t early = 0, early_ok = 0;
  std::vector<LabeledFeature> stage_train, stage_test, sex_train, sex_test;
  for (const auto& [f, r] : snaps) {
    const bool test = is_test[r.episode];
    if (r.period == GrowingPeriod::Germination || r.period == GrowingPeriod::Seedling) {
      ++early;
      const double stem = f.stem_length_cm();
      const GrowingPeriod by_threshold = stem < cfg.gate.thresholds.delta1_cm ? GrowingPeriod::Germination
                                         : stem < cfg.gate.thresholds.delta2_cm ? GrowingPeriod::Seedling
                                                                                : GrowingPeriod::Mature;
      if (by_threshold == r.period) ++early_ok;
      if (r.sex != Sex::Unknown) ++rep.sex_gating_violations;
      continue;
    }
    if (r.sex == Sex::Unknown) ++rep.sex_gating_violations;
    const int stage_label = r.period == GrowingPeriod::Blooming ? 1 : 0;
    (test ? stage_test : stage_train).push_back({f, stage_label});
    if (r.sex != Sex::Unknown) {
      (test ? sex_test : sex_train).push_back({f, r.sex == Sex::Female ? 1 : 0});
    }
  }
  rep.threshold_agreement = early == 0 ? 1.0 : static_cast<double>(early_ok) / static_cast<double>(early);

  const nlohmann::ordered_json tc = {{"learning_rate", cfg.gate.learning_rate},
                                     {"epochs", cfg.gate.epochs},
                                     {"test_fraction", cfg.gate.test_fraction}};
  // A classifier is only fitted when its training split holds both labels;
  // short scenarios may never leave the early periods.
  const auto fit = [&](const std::vector<LabeledFeature>& train, const std::vector<LabeledFeature>& test,
                       const char* role, const fs::path& file, double& acc) {
    bool pos = false, neg = false;
    for (const LabeledFeature& x : train) (x.label == 1 ? pos : neg) = true;
    if (!(pos && neg)) {
      fs::remove(file);
      return false;
    }
    const BinaryClassifier clf = train_classifier(train, cfg.gate.learning_rate, cfg.gate.epochs, seed);
    acc = test.empty() ? 0.0 : accuracy(clf, test);
    write_json_file(file, classifier_to_json(clf, role, cfg.gate.thresholds, seed, tc));
    return true;
  };
  rep.stage_trained = fit(stage_train, stage_test, "stage", out / "gate_stage.json", rep.stage_accuracy);
  rep.sex_trained = fit(sex_train, sex_test, "sex", out / "gate_sex.json", rep.sex_accuracy);

  std::ofstream f = open_out(out / "gate_report.csv");
  f << "metric,value\n"
    << "snapshots," << rep.snapshots << '\n'
    << "threshold_agreement," << csv::format(rep.threshold_agreement) << '\n'
    << "stage_trained," << rep.stage_trained << '\n'
    << "stage_accuracy," << csv::format(rep.stage_accuracy) << '\n'
    << "sex_trained," << rep.sex_trained << '\n'
    << "sex_accuracy," << csv::format(rep.sex_accuracy) << '\n'
    << "sex_gating_violations," << rep.sex_gating_violations << '\n';
  return rep;
}

GrowthModelSet load_growth_models(const fs::path& out) {
  GrowthModelSet models;
  bool any = false;
  for (GrowingPeriod p : kAllPeriods) {
    const fs::path path = out / growth_file(p);
    if (!fs::exists(path)) continue;
    models.set(p, growth_model_from_json(read_json_file(path), p));
    any = true;
  }
  if (!any) {
    throw MissingArtifact("missing surrogate: no growth_<period>.json in " + out.string() +
                          " (run train-growth first)");
  }
  return models;
}

AgentTrainResult train_agent(const RunConfig& cfg, const fs::path& out) {
  write_config_echo(cfg, out);
  std::optional<GrowthModelSet> models;
  if (cfg.agent.mode == TrainMode::Embedded) models = load_growth_models(out);
  const Hyperparams hp = cfg.hyperparams();
  AgentTrainResult r = medrl::train_agent(cfg.loop_config(), cfg.agent.mode,
                                          models ? &*models : nullptr, cfg.grid(), cfg.encoder(), hp);

  const nlohmann::ordered_json hc = to_json(cfg)["agent"];
  for (GrowingPeriod p : kAllPeriods) {
    write_json_file(out / qnet_file(p), qnet_to_json(r.agent.nets[index_of(p)].online, p, hp.seed, hc));
  }
  std::ofstream log = open_out(out / "agent_training.csv");
  log << "episode,steps,return,mean_loss,epsilon,final_period\n";
  for (const EpisodeSummary& s : r.log) {
    log << s.episode << ',' << s.steps << ',' << csv::format(s.episode_return) << ','
        << csv::format(s.mean_loss) << ',' << csv::format(s.epsilon) << ','
        << period_name(s.final_period) << '\n';
  }
  return r;
}

Agent load_agent(const RunConfig& cfg, const fs::path& out) {
  Agent agent{{}, cfg.encoder(), cfg.grid()};
  for (GrowingPeriod p : kAllPeriods) {
    const fs::path path = out / qnet_file(p);
    if (!fs::exists(path)) {
      throw MissingArtifact("missing agent weights " + path.string() + " (run train-agent first)");
    }
    QNet& q = agent.nets[index_of(p)];
    q.online = qnet_from_json(read_json_file(path), p);
    if (q.online.output_size() != agent.grid.size()) {
      throw Error("agent weights in " + path.string() + " do not match the configured action grid");
    }
    q.sync();
  }
  return agent;
}

EvaluationReport evaluate(const RunConfig& cfg, const fs::path& out) {
  write_config_echo(cfg, out);
  const Agent agent = load_agent(cfg, out);
  const LoopConfig lc = cfg.loop_config();
  const std::uint64_t seed = cfg.stage_seed("evaluate");
  const auto trained = evaluate_policy(lc, greedy_policy(agent), agent.grid, agent.encoder,
                                       cfg.run.eval_episodes, cfg.run.episode_length, seed);
  const auto random = evaluate_policy(lc, random_policy(agent.grid.size()), agent.grid, agent.encoder,
                                      cfg.run.eval_episodes, cfg.run.episode_length, seed);

  EvaluationReport rep;
  std::ofstream f = open_out(out / "evaluation.csv");
  f << "policy,episode,return,final_period\n";
  const auto emit = [&](std::string_view name, const std::vector<EpisodeResult>& res,
                        std::vector<double>& returns) {
    for (std::size_t i = 0; i < res.size(); ++i) {
      returns.push_back(res[i].episode_return);
      const GrowingPeriod fp = res[i].steps.empty() ? GrowingPeriod::Germination : res[i].steps.back().period;
      f << name << ',' << i << ',' << csv::format(res[i].episode_return) << ',' << period_name(fp) << '\n';
    }
    for (std::size_t i = 0; i < std::min(cfg.run.log_episodes, res.size()); ++i) {
      write_episode(out, "episode_" + std::string(name) + "_" + padded(i), res[i]);
    }
  };
  emit("trained", trained, rep.trained_returns);
  emit("random", random, rep.random_returns);
  rep.trained_mean = mean_return(trained);
  rep.random_mean = mean_return(random);

  std::ofstream s = open_out(out / "evaluation_summary.csv");
  s << "policy,episodes,mean_return\n"
    << "trained," << trained.size() << ',' << csv::format(rep.trained_mean) << '\n'
    << "random," << random.size() << ',' << csv::format(rep.random_mean) << '\n';
  return rep;
}

BruteForceResult brute_force(const RunConfig& cfg, const fs::path& out) {
  write_config_echo(cfg, out);
  const LoopConfig lc = cfg.loop_config();
  const ActionGrid grid = cfg.grid();
  const std::uint64_t seed = cfg.stage_seed("evaluate");
  const BruteForceResult r = brute_force_optimum(lc, grid, cfg.brute_force_horizon, seed);

  nlohmann::ordered_json doc;
  doc["horizon"] = cfg.brute_force_horizon;
  doc["actions_per_step"] = grid.size();
  doc["sequences"] = r.sequences;
  doc["best_return"] = r.best_return;
  doc["actions"] = r.actions;
  nlohmann::ordered_json sp = nlohmann::ordered_json::array();
  for (std::size_t a : r.actions) {
    const Setpoints u = grid.action_to_setpoints(a);
    nlohmann::ordered_json row;
    for (Var v : kAllVars) row[std::string(var_name(v))] = u[v];
    sp.push_back(row);
  }
  doc["setpoints"] = sp;
  write_json_file(out / "brute_force.json", doc);

  const auto replay = evaluate_policy(lc, sequence_policy(r.actions), grid, cfg.encoder(), 1,
                                      cfg.brute_force_horizon, seed);
  write_episode(out, "brute_force_episode", replay.front());
  return r;
}

void run_all(const RunConfig& cfg, const fs::path& out) {
  generate_data(cfg, out);
  train_growth(cfg, out);
  train_gate(cfg, out);
  train_agent(cfg, out);
  const EvaluationReport embedded = evaluate(cfg, out);
  brute_force(cfg, out);

  // Ablation: the same agent trained directly against the oracle.
  RunConfig alt = cfg;
  alt.agent.mode = cfg.agent.mode == TrainMode::Embedded ? TrainMode::Oracle : TrainMode::Embedded;
  const fs::path alt_dir = out / "ablation";
  fs::create_directories(alt_dir);
  if (alt.agent.mode == TrainMode::Embedded) {
    for (GrowingPeriod p : kAllPeriods) {
      if (fs::exists(out / growth_file(p))) {
        fs::copy_file(out / growth_file(p), alt_dir / growth_file(p),
                      fs::copy_options::overwrite_existing);
      }
    }
  }
  train_agent(alt, alt_dir);
  const EvaluationReport ablated = evaluate(alt, alt_dir);

  const EvaluationReport& emb = cfg.agent.mode == TrainMode::Embedded ? embedded : ablated;
  const EvaluationReport& orc = cfg.agent.mode == TrainMode::Embedded ? ablated : embedded;
  std::ofstream f = open_out(out / "ablation.csv");
  f << "policy,mean_return\n"
    << "embedded," << csv::format(emb.trained_mean) << '\n'
    << "oracle," << csv::format(orc.trained_mean) << '\n'
    << "random," << csv::format(emb.random_mean) << '\n';
}

wire::SessionReport replay_wire(const fs::path& ndjson, const wire::ReplayOptions& options) {
  std::ifstream in(ndjson, std::ios::binary);
  if (!in) throw MissingArtifact("missing session log " + ndjson.string());
  return wire::session_replay(in, options);
}

}  // namespace medrl::pipeline
