#pragma once

#include "modmpc/mpc.hpp"
#include "modmpc/plants.hpp"

#include <cstdint>
#include <vector>

namespace modmpc::cloop {

enum class SimStatus { Converged, Truncated, InfeasibleQP, Diverged };

const char* to_string(SimStatus s);

/// Closed-loop simulation settings. t_max <= 0 derives the truncation
/// horizon as 50*N*h from the active design point; penalty <= 0 derives the
/// failure value as 1e6*(1 + |x0|^2).
struct SimConfig {
  double t_max = 0.0;
  int substeps = 10;
  double tail_eps = 1e-9;
  int tail_steps = 10;
  double blowup = 1e6;
  double penalty = 0.0;
};

double effective_t_max(const SimConfig& cfg, const mpc::OcpSpec& spec);
double effective_penalty(const SimConfig& cfg, const Vector& x0);

/// Sampled-data rollout at substep resolution. Inputs are constant within
/// each sampling interval (one entry of u_samples per interval).
struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> u_at;  // held input at each recorded instant
  std::vector<double> v;     // instantaneous stage cost at each instant
  std::vector<double> sample_t;
  std::vector<Vector> u_samples;
  SimStatus status = SimStatus::Truncated;
};

struct SimResult {
  Trajectory traj;
  double U = 0.0;
  SimStatus status = SimStatus::Truncated;
};

/// Runs the plant under the MPC law from x0, accumulating the integrated
/// squared error of states and inputs as an extra quadrature state of the
/// integrator. Failures become data: the QP going infeasible or the state
/// blowing up yields the penalty value, never an exception. The seed is
/// accepted for interface stability; the rollout itself is deterministic.
SimResult simulate(const plants::PlantModel& plant, const mpc::OcpSpec& spec, const Vector& x0,
                   const SimConfig& cfg, std::uint64_t seed = 0);

/// Weighted control-performance objective over the scenario set. Scenario
/// results are always reduced in index order so the sum is reproducible;
/// the MODMPC_THREADS environment variable (>1) evaluates scenarios
/// concurrently without changing the result.
double performance(const plants::PlantModel& plant, const mpc::OcpSpec& spec,
                   const plants::ScenarioSet& scenarios, const SimConfig& cfg);

}  // namespace modmpc::cloop
