// medrl: command-line driver for the greenhouse control pipeline.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "medrl/csv.hpp"
#include "medrl/error.hpp"
#include "medrl/pipeline.hpp"

namespace {

using namespace medrl;
namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON config file (built-in defaults if omitted)")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Root seed, overrides run.seed");
  sub->add_option("--out", f.out, "Output directory, overrides run.output_dir");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed) cfg.run.seed = *f.seed;
  if (!f.out.empty()) cfg.run.output_dir = f.out;
  cfg.validate();
  return cfg;
}

void print_nrmse(const pipeline::GrowthReport& r) {
  for (GrowingPeriod p : kAllPeriods) {
    const auto& n = r.nrmse[index_of(p)];
    if (!n) {
      std::cout << period_name(p) << ": no training windows\n";
      continue;
    }
    std::cout << period_name(p) << " nrmse";
    for (std::size_t i = 0; i < n->size(); ++i) {
      std::cout << ' ' << morphology_field_name(i) << '=' << csv::format((*n)[i]);
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-embedded Q-learning for greenhouse crop control"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string wire_input;
  std::uint64_t ack_window = wire::ReplayOptions{}.ack_window_s;

  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd cmds[] = {
      {"generate-data", "Roll the crop oracle under random setpoints and write dataset.csv"},
      {"train-growth", "Fit one growth surrogate per period from dataset.csv"},
      {"train-gate", "Fit the stage and sex classifiers from dataset.csv"},
      {"train-agent", "Train the per-period Q-networks"},
      {"evaluate", "Evaluate the trained and random policies on the oracle"},
      {"brute-force", "Exhaustive optimum over short action sequences"},
      {"run-all", "Every stage in order, plus the training-mode ablation"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const Cmd& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    add_common(s, flags);
    subs[c.name] = s;
  }
  CLI::App* replay = app.add_subcommand("replay-wire", "Replay-validate an NDJSON session log");
  replay->add_option("input", wire_input, "Session log (.ndjson)")->required();
  replay->add_option("--ack-window", ack_window, "Seconds allowed between a command and its ack");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (replay->parsed()) {
      const wire::SessionReport r = pipeline::replay_wire(wire_input, {ack_window});
      for (const wire::Violation& v : r.violations) {
        std::cout << "line " << v.line + 1 << ": " << wire::violation_kind_name(v.kind) << ": "
                  << v.detail << '\n';
      }
      std::cout << r.messages.size() << " messages, " << r.violations.size() << " violations\n";
      return r.violations.empty() ? 0 : 2;
    }

    const RunConfig cfg = resolve(flags);
    const fs::path out = cfg.run.output_dir;

    if (subs["generate-data"]->parsed()) {
      const Dataset d = pipeline::generate_data(cfg, out);
      std::cout << "wrote " << d.record_count() << " records to " << (out / "dataset.csv").string()
                << '\n';
    } else if (subs["train-growth"]->parsed()) {
      print_nrmse(pipeline::train_growth(cfg, out));
    } else if (subs["train-gate"]->parsed()) {
      const auto r = pipeline::train_gate(cfg, out);
      const auto acc = [](bool trained, double a) {
        return trained ? csv::format(a) : std::string("n/a (one label missing)");
      };
      std::cout << "threshold agreement " << csv::format(r.threshold_agreement)
                << ", stage accuracy " << acc(r.stage_trained, r.stage_accuracy)
                << ", sex accuracy " << acc(r.sex_trained, r.sex_accuracy) << '\n';
    } else if (subs["train-agent"]->parsed()) {
      const auto r = pipeline::train_agent(cfg, out);
      std::cout << "trained " << r.log.size() << " episodes ("
                << train_mode_name(cfg.agent.mode) << "), last return "
                << csv::format(r.log.empty() ? 0.0 : r.log.back().episode_return) << '\n';
    } else if (subs["evaluate"]->parsed()) {
      const auto r = pipeline::evaluate(cfg, out);
      std::cout << "mean return: trained " << csv::format(r.trained_mean) << ", random "
                << csv::format(r.random_mean) << '\n';
    } else if (subs["brute-force"]->parsed()) {
      const auto r = pipeline::brute_force(cfg, out);
      std::cout << "optimum " << csv::format(r.best_return) << " over " << r.sequences
                << " sequences\n";
    } else if (subs["run-all"]->parsed()) {
      pipeline::run_all(cfg, out);
      std::cout << "artifacts in " << out.string() << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "medrl: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "medrl: " << e.what() << '\n';
    return 2;
  }
}
