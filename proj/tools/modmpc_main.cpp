#include "modmpc/runcfg.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using modmpc::cli::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir = "out";
  std::int64_t seed = -1;
  std::string optimizer;
  int max_evals = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required = true) {
  auto* opt = cmd->add_option("--config", f.config_path, "run configuration JSON");
  if (config_required) {
    opt->required();
  }
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--seed", f.seed, "override the config seed");
}

RunConfig load(const CommonFlags& f) {
  RunConfig cfg = modmpc::cli::load_config_file(f.config_path);
  nlohmann::json raw = cfg.raw;
  bool changed = false;
  if (f.seed >= 0) {
    raw["seed"] = static_cast<std::uint64_t>(f.seed);
    changed = true;
  }
  if (!f.optimizer.empty()) {
    raw["optimizer"]["kind"] = f.optimizer;
    changed = true;
  }
  if (f.max_evals > 0) {
    raw["optimizer"]["max_evals"] = f.max_evals;
    changed = true;
  }
  // Re-parse so the manifest embeds the effective configuration.
  return changed ? modmpc::cli::parse_config(raw) : cfg;
}

modmpc::Vector parse_x0(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    values.push_back(std::stod(field));
  }
  modmpc::Vector x0(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    x0[static_cast<Eigen::Index>(i)] = values[i];
  }
  return x0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective MPC design toolkit"};
  app.require_subcommand(1);

  CommonFlags calibrate_f, sweep_f, optimize_f, simulate_f;
  std::string replay_path, metrics_run, metrics_ref, metrics_out = "out";
  double sim_h = 0.0;
  int sim_n = 0;
  std::string sim_x0;

  auto* calibrate = app.add_subcommand("calibrate", "time the QP solver and fit the resource model");
  add_common(calibrate, calibrate_f);

  auto* sweep = app.add_subcommand("sweep", "brute-force grid exploration of the search space");
  add_common(sweep, sweep_f);

  auto* optimize = app.add_subcommand("optimize", "run the multi-objective design search");
  add_common(optimize, optimize_f, false);
  optimize->add_option("--optimizer", optimize_f.optimizer, "ditri or nsga")
      ->check(CLI::IsMember({"ditri", "nsga"}));
  optimize->add_option("--max-evals", optimize_f.max_evals, "evaluation budget");
  optimize->add_option("--replay", replay_path, "re-execute a run manifest");

  auto* simulate = app.add_subcommand("simulate", "single closed-loop rollout to CSV");
  simulate->set_help_flag("--help", "print help");  // frees -h for the sampling period
  add_common(simulate, simulate_f);
  simulate->add_option("--h", sim_h, "sampling period")->required();
  simulate->add_option("--N", sim_n, "prediction steps")->required();
  simulate->add_option("--x0", sim_x0, "initial state, comma separated");

  auto* metrics = app.add_subcommand("metrics", "closeness and coverage against a reference front");
  metrics->add_option("--run", metrics_run, "archive or front CSV of the run")->required();
  metrics->add_option("--ref", metrics_ref, "reference archive or front CSV")->required();
  metrics->add_option("--out", metrics_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate) {
      return modmpc::cli::cmd_calibrate(load(calibrate_f), calibrate_f.out_dir);
    }
    if (*sweep) {
      return modmpc::cli::cmd_sweep(load(sweep_f), sweep_f.out_dir);
    }
    if (*optimize) {
      if (!replay_path.empty()) {
        return modmpc::cli::cmd_replay(replay_path, optimize_f.out_dir);
      }
      if (optimize_f.config_path.empty()) {
        std::cerr << "config error: optimize needs --config or --replay\n";
        return 2;
      }
      return modmpc::cli::cmd_optimize(load(optimize_f), optimize_f.out_dir);
    }
    if (*simulate) {
      const RunConfig cfg = load(simulate_f);
      const modmpc::Vector x0 =
          sim_x0.empty() ? cfg.scenarios.x0.front() : parse_x0(sim_x0);
      return modmpc::cli::cmd_simulate(cfg, sim_h, sim_n, x0, simulate_f.out_dir);
    }
    if (*metrics) {
      return modmpc::cli::cmd_metrics(metrics_run, metrics_ref, metrics_out);
    }
  } catch (const modmpc::cli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
