#include "modmpc/cloop.hpp"

#include <cmath>
#include <cstdlib>
#include <future>
#include <stdexcept>

namespace modmpc::cloop {

const char* to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Converged: return "Converged";
    case SimStatus::Truncated: return "Truncated";
    case SimStatus::InfeasibleQP: return "InfeasibleQP";
    case SimStatus::Diverged: return "Diverged";
  }
  return "?";
}

double effective_t_max(const SimConfig& cfg, const mpc::OcpSpec& spec) {
  return cfg.t_max > 0.0 ? cfg.t_max : 50.0 * spec.N * spec.h;
}

double effective_penalty(const SimConfig& cfg, const Vector& x0) {
  return cfg.penalty > 0.0 ? cfg.penalty : 1e6 * (1.0 + x0.squaredNorm());
}

namespace {

double stage_value(const mpc::OcpSpec& spec, const Vector& x, const Vector& u) {
  return x.dot(spec.Q * x) + u.dot(spec.R * u);
}

}  // namespace

SimResult simulate(const plants::PlantModel& plant, const mpc::OcpSpec& spec, const Vector& x0,
                   const SimConfig& cfg, std::uint64_t /*seed*/) {
  mpc::validate(spec);
  if (x0.size() != plant.n_x || plant.n_x != spec.n_x() || plant.n_u != spec.n_u()) {
    throw std::invalid_argument("simulate: dimension mismatch between plant, spec and x0");
  }
  if (cfg.substeps < 1) {
    throw std::invalid_argument("simulate: substeps must be >= 1");
  }

  SimResult out;
  const double penalty = effective_penalty(cfg, x0);

  mpc::OcpSpec resolved;
  try {
    resolved = mpc::with_resolved_terminal_weight(spec);
  } catch (const std::runtime_error&) {
    // Unstabilizable sampled pair: the controller cannot be formed at this
    // design point, so the run is scored like any other failure.
    out.status = out.traj.status = SimStatus::InfeasibleQP;
    out.U = penalty;
    return out;
  }

  const double t_max = effective_t_max(cfg, resolved);
  const double h = resolved.h;
  const int nx = plant.n_x;

  // The QP differs between sampling instants only in the initial-state rows
  // of beq; build once and patch.
  qp::QpProblem q = mpc::build_qp(resolved, Vector::Zero(nx));
  const int u0_offset = (resolved.N + 1) * nx;

  const auto field = plant.f;

  Trajectory& traj = out.traj;
  Vector x = x0;
  double accumulated = 0.0;
  double t = 0.0;
  int tail_streak = 0;

  const auto fail = [&](SimStatus s) {
    traj.status = s;
    out.status = s;
    out.U = penalty;
    return out;
  };

  if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > cfg.blowup) {
    return fail(SimStatus::Diverged);
  }

  traj.status = SimStatus::Truncated;
  while (t < t_max - 1e-12) {
    q.beq.head(nx) = x;
    const qp::QpSolution sol = qp::solve_qp(q);
    if (sol.status != qp::QpStatus::Solved) {
      return fail(SimStatus::InfeasibleQP);
    }
    const Vector u = sol.z.segment(u0_offset, plant.n_u);

    traj.sample_t.push_back(t);
    traj.u_samples.push_back(u);
    if (traj.t.empty()) {
      traj.t.push_back(t);
      traj.x.push_back(x);
      traj.u_at.push_back(u);
      traj.v.push_back(stage_value(resolved, x, u));
    }

    const double v_sample = stage_value(resolved, x, u);
    tail_streak = v_sample < cfg.tail_eps ? tail_streak + 1 : 0;
    if (tail_streak >= cfg.tail_steps) {
      traj.status = SimStatus::Converged;
      break;
    }

    // Integrate the hold interval with the stage cost as an extra
    // quadrature state, so U inherits the integrator order.
    const double interval = std::min(h, t_max - t);
    const double dt = interval / cfg.substeps;
    for (int s = 0; s < cfg.substeps; ++s) {
      Vector aug(nx + 1);
      aug.head(nx) = x;
      aug[nx] = accumulated;
      const Vector next = numkernel::rk4_step(
          [&](const Vector& y, const Vector& uu) {
            Vector dy(nx + 1);
            const Vector xs = y.head(nx);
            dy.head(nx) = field(xs, uu);
            dy[nx] = stage_value(resolved, xs, uu);
            return dy;
          },
          aug, u, dt);
      x = next.head(nx);
      accumulated = next[nx];
      t += dt;
      if (!x.allFinite() || !std::isfinite(accumulated) ||
          x.lpNorm<Eigen::Infinity>() > cfg.blowup) {
        return fail(SimStatus::Diverged);
      }
      traj.t.push_back(t);
      traj.x.push_back(x);
      traj.u_at.push_back(u);
      traj.v.push_back(stage_value(resolved, x, u));
    }
  }

  out.status = traj.status;
  out.U = accumulated;
  return out;
}

namespace {

int evaluator_threads() {
  const char* env = std::getenv("MODMPC_THREADS");
  if (env == nullptr) {
    return 1;
  }
  const int k = std::atoi(env);
  return k > 1 ? k : 1;
}

}  // namespace

double performance(const plants::PlantModel& plant, const mpc::OcpSpec& spec,
                   const plants::ScenarioSet& scenarios, const SimConfig& cfg) {
  if (scenarios.x0.empty()) {
    throw std::invalid_argument("performance: empty scenario set");
  }
  const size_t n = scenarios.x0.size();
  std::vector<double> u_values(n, 0.0);

  const int threads = evaluator_threads();
  if (threads <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) {
      u_values[i] = simulate(plant, spec, scenarios.x0[i], cfg).U;
    }
  } else {
    for (size_t base = 0; base < n; base += static_cast<size_t>(threads)) {
      const size_t end = std::min(n, base + static_cast<size_t>(threads));
      std::vector<std::future<double>> batch;
      for (size_t i = base; i < end; ++i) {
        batch.push_back(std::async(std::launch::async, [&, i] {
          return simulate(plant, spec, scenarios.x0[i], cfg).U;
        }));
      }
      for (size_t i = base; i < end; ++i) {
        u_values[i] = batch[i - base].get();
      }
    }
  }

  // Fixed summation order keeps the result identical across thread counts.
  double v = 0.0;
  for (size_t i = 0; i < n; ++i) {
    v += scenarios.w[i] * u_values[i];
  }
  return v;
}

}  // namespace modmpc::cloop
