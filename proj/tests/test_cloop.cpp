#include "modmpc/cloop.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace modmpc;
using namespace modmpc::cloop;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

plants::PlantModel single_integrator() {
  plants::PlantModel p;
  p.n_x = 1;
  p.n_u = 1;
  p.A = Matrix::Zero(1, 1);
  p.B = Matrix::Identity(1, 1);
  p.f = [](const Vector& x, const Vector& u) -> Vector { return u; };
  p.x_lb = Vector::Constant(1, -kInf);
  p.x_ub = Vector::Constant(1, kInf);
  p.u_lb = Vector::Constant(1, -kInf);
  p.u_ub = Vector::Constant(1, kInf);
  p.name = "single_integrator";
  return p;
}

mpc::OcpSpec spec_for(const plants::PlantModel& p, double h, int n_steps) {
  mpc::OcpSpec s;
  s.A = p.A;
  s.B = p.B;
  s.Q = Matrix::Identity(p.n_x, p.n_x);
  s.R = Matrix::Identity(p.n_u, p.n_u);
  s.x_lb = p.x_lb;
  s.x_ub = p.x_ub;
  s.u_lb = p.u_lb;
  s.u_ub = p.u_ub;
  s.h = h;
  s.N = n_steps;
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("cloop");

TEST_CASE("equilibrium start costs nothing") {
  const plants::PlantModel p = plants::builtin("double_integrator");
  const mpc::OcpSpec s = spec_for(p, 0.1, 4);
  const SimResult r = simulate(p, s, Vector::Zero(2), SimConfig{});
  CHECK(r.status == SimStatus::Converged);
  CHECK(r.U == 0.0);
}

TEST_CASE("scalar closed loop matches the geometric-series value") {
  const plants::PlantModel p = single_integrator();
  const mpc::OcpSpec s = spec_for(p, 1.0, 5);
  const SimResult r = simulate(p, s, Vector::Constant(1, 1.0), SimConfig{});
  REQUIRE(r.status == SimStatus::Converged);

  // With the Riccati terminal weight the loop is x+ = (1 - K) x with the
  // golden-ratio gain; the ISE is then a geometric series evaluated by hand
  // over the piecewise-linear state.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double k = phi / (1.0 + phi);
  const double rho = (1.0 - k) * (1.0 - k);
  const double per_interval = 1.0 - k + (4.0 / 3.0) * k * k;
  const double expected = per_interval / (1.0 - rho);
  CHECK(r.U == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("unrecoverable start hits the penalty path") {
  const plants::PlantModel p = plants::builtin("double_integrator");
  mpc::OcpSpec s = spec_for(p, 0.2, 4);
  s.u_lb[0] = -0.01;
  s.u_ub[0] = 0.01;
  Vector x0(2);
  x0 << 4.9, 4.9;  // the predicted state cannot stay in the box
  const SimConfig cfg;
  const SimResult r = simulate(p, s, x0, cfg);
  CHECK((r.status == SimStatus::InfeasibleQP || r.status == SimStatus::Diverged));
  CHECK(r.U == effective_penalty(cfg, x0));
}

TEST_CASE("performance is the weighted sum reduced in scenario order") {
  const plants::PlantModel p = plants::builtin("double_integrator");
  const mpc::OcpSpec s = spec_for(p, 0.2, 4);
  Vector a(2), b(2);
  a << 1.0, 0.0;
  b << -0.5, 0.5;
  const auto scen = plants::ScenarioSet::make({a, b}, {1.0, 3.0});
  SimConfig cfg;
  cfg.t_max = 10.0;

  const double ua = simulate(p, s, a, cfg).U;
  const double ub = simulate(p, s, b, cfg).U;
  const double v = performance(p, s, scen, cfg);
  CHECK(v == 0.25 * ua + 0.75 * ub);
  CHECK(ua > 0.0);

  const auto single = plants::ScenarioSet::make({a}, {1.0});
  CHECK(performance(p, s, single, cfg) == ua);

  const auto origin = plants::ScenarioSet::make({Vector::Zero(2)}, {1.0});
  CHECK(performance(p, s, origin, cfg) == 0.0);
}

TEST_CASE("doubling substeps barely moves a converged value") {
  const plants::PlantModel p = plants::builtin("pendulum");
  const mpc::OcpSpec s = spec_for(p, 0.1, 6);
  Vector x0(2);
  x0 << 0.4, 0.0;
  SimConfig coarse;
  coarse.substeps = 10;
  SimConfig fine = coarse;
  fine.substeps = 20;
  const SimResult rc = simulate(p, s, x0, coarse);
  const SimResult rf = simulate(p, s, x0, fine);
  REQUIRE(rc.status == SimStatus::Converged);
  REQUIRE(rf.status == SimStatus::Converged);
  CHECK(std::abs(rc.U - rf.U) < 0.01 * rf.U);
}

TEST_CASE("simulation is bit-deterministic") {
  const plants::PlantModel p = plants::builtin("pendulum");
  const mpc::OcpSpec s = spec_for(p, 0.1, 5);
  Vector x0(2);
  x0 << 0.3, -0.2;
  const SimResult a = simulate(p, s, x0, SimConfig{});
  const SimResult b = simulate(p, s, x0, SimConfig{});
  CHECK(a.U == b.U);
  CHECK(a.status == b.status);
}

TEST_CASE("trajectory holds the input constant over each interval") {
  const plants::PlantModel p = plants::builtin("double_integrator");
  const mpc::OcpSpec s = spec_for(p, 0.25, 3);
  Vector x0(2);
  x0 << 1.0, 0.0;
  SimConfig cfg;
  cfg.t_max = 2.0;
  cfg.substeps = 4;
  const SimResult r = simulate(p, s, x0, cfg);
  const Trajectory& t = r.traj;
  REQUIRE(!t.sample_t.empty());
  REQUIRE(t.t.size() == t.x.size());
  REQUIRE(t.t.size() == t.u_at.size());
  // Recorded held inputs only change at sampling instants.
  size_t changes = 0;
  for (size_t i = 1; i < t.u_at.size(); ++i) {
    if (t.u_at[i] != t.u_at[i - 1]) {
      ++changes;
    }
  }
  CHECK(changes <= t.sample_t.size());
  CHECK(r.U >= 0.0);
}

TEST_CASE("thread count does not change the performance value") {
  const plants::PlantModel p = plants::builtin("double_integrator");
  const mpc::OcpSpec s = spec_for(p, 0.2, 4);
  Vector a(2), b(2), c(2);
  a << 1.0, 0.0;
  b << -0.5, 0.5;
  c << 0.3, -0.8;
  const auto scen = plants::ScenarioSet::make({a, b, c}, {1.0, 1.0, 2.0});
  SimConfig cfg;
  cfg.t_max = 6.0;

  const double sequential = performance(p, s, scen, cfg);
  setenv("MODMPC_THREADS", "3", 1);
  const double parallel = performance(p, s, scen, cfg);
  unsetenv("MODMPC_THREADS");
  CHECK(sequential == parallel);
}

TEST_CASE("derived defaults") {
  const plants::PlantModel p = single_integrator();
  const mpc::OcpSpec s = spec_for(p, 0.5, 8);
  SimConfig cfg;
  CHECK(effective_t_max(cfg, s) == doctest::Approx(50.0 * 8 * 0.5));
  cfg.t_max = 7.0;
  CHECK(effective_t_max(cfg, s) == 7.0);
  Vector x0 = Vector::Constant(1, 2.0);
  CHECK(effective_penalty(cfg, x0) == doctest::Approx(1e6 * 5.0));
  cfg.penalty = 123.0;
  CHECK(effective_penalty(cfg, x0) == 123.0);
}

TEST_SUITE_END();
