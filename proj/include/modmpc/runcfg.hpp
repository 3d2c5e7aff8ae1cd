#pragma once

#include "modmpc/cloop.hpp"
#include "modmpc/ditri.hpp"
#include "modmpc/moo.hpp"
#include "modmpc/nsga.hpp"
#include "modmpc/plants.hpp"
#include "modmpc/resource.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace modmpc::cli {

/// Config problems exit with code 2; runtime failures with 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OptimizerChoice {
  std::string kind = "ditri";  // "ditri" | "nsga"
  ditri::DitriConfig ditri;
  nsga::NsgaConfig nsga;
};

struct CalibrationConfig {
  int n_lo = 3;
  int n_hi = 15;
  int reps = 5;
  int degree = 1;
  double h = 0.05;
};

/// Fully resolved run description. `raw` keeps the effective JSON (after
/// any command-line overrides) so a manifest can reproduce the run.
struct RunConfig {
  plants::PlantModel plant;
  Matrix Q, R;
  Matrix Qf;
  bool qf_auto = true;
  mpc::CostMode cost_mode = mpc::CostMode::Euler;
  Vector x_lb, x_ub, u_lb, u_ub;
  plants::ScenarioSet scenarios;
  cloop::SimConfig sim;
  std::optional<resource::ResourceModel> model;
  moo::Bounds search;
  OptimizerChoice optimizer;
  int sweep_n_h = 400;
  CalibrationConfig calibration;
  std::uint64_t seed = 0;
  nlohmann::json raw;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// OCP for one design point, using the configured weights and bounds.
mpc::OcpSpec make_ocp(const RunConfig& cfg, const moo::DesignPoint& p);

/// Closed-loop objective evaluator l(p) = (V, eta). Design points whose
/// sampled pair has no Riccati solution score the penalty value.
moo::Evaluator make_evaluator(const RunConfig& cfg);

int cmd_calibrate(const RunConfig& cfg, const std::string& out_dir);
int cmd_sweep(const RunConfig& cfg, const std::string& out_dir);
int cmd_optimize(const RunConfig& cfg, const std::string& out_dir);
int cmd_replay(const std::string& manifest_path, const std::string& out_dir);
int cmd_simulate(const RunConfig& cfg, double h, int N, const Vector& x0,
                 const std::string& out_dir);
int cmd_metrics(const std::string& run_csv, const std::string& ref_csv,
                const std::string& out_dir);

}  // namespace modmpc::cli
