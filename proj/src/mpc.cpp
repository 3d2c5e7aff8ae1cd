#include "modmpc/mpc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace modmpc::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool origin_inside(const Vector& lb, const Vector& ub) {
  for (int i = 0; i < lb.size(); ++i) {
    if (lb[i] > 0.0 || ub[i] < 0.0) {
      return false;
    }
  }
  return true;
}

}  // namespace

void validate(const OcpSpec& spec) {
  const int nx = spec.n_x();
  const int nu = spec.n_u();
  if (nx <= 0 || nu <= 0 || spec.A.cols() != nx || spec.B.rows() != nx) {
    throw std::invalid_argument("ocp: model dimensions");
  }
  if (spec.Q.rows() != nx || spec.Q.cols() != nx || spec.R.rows() != nu || spec.R.cols() != nu) {
    throw std::invalid_argument("ocp: weight dimensions");
  }
  if (!spec.qf_auto && (spec.Qf.rows() != nx || spec.Qf.cols() != nx)) {
    throw std::invalid_argument("ocp: terminal weight dimensions");
  }
  if (spec.x_lb.size() != nx || spec.x_ub.size() != nx || spec.u_lb.size() != nu ||
      spec.u_ub.size() != nu) {
    throw std::invalid_argument("ocp: bound dimensions");
  }
  if (!(spec.h > 0.0) || spec.N < 1) {
    throw std::invalid_argument("ocp: need h > 0 and N >= 1");
  }
  if (!origin_inside(spec.x_lb, spec.x_ub) || !origin_inside(spec.u_lb, spec.u_ub)) {
    throw std::invalid_argument("ocp: origin must be feasible");
  }
}

StageCost stage_cost(const OcpSpec& spec) {
  const int nx = spec.n_x();
  const int nu = spec.n_u();
  StageCost c;
  if (spec.cost_mode == CostMode::Euler) {
    c.Qd = spec.h * spec.Q;
    c.Md = Matrix::Zero(nx, nu);
    c.Rd = spec.h * spec.R;
    return c;
  }

  // Exact mode: integrate the continuous stage cost over one hold interval
  // (Van Loan construction on the input-augmented pair).
  const int na = nx + nu;
  Matrix abar = Matrix::Zero(na, na);
  abar.topLeftCorner(nx, nx) = spec.A;
  abar.topRightCorner(nx, nu) = spec.B;
  Matrix qbar = Matrix::Zero(na, na);
  qbar.topLeftCorner(nx, nx) = spec.Q;
  qbar.bottomRightCorner(nu, nu) = spec.R;

  Matrix big = Matrix::Zero(2 * na, 2 * na);
  big.topLeftCorner(na, na) = -abar.transpose() * spec.h;
  big.topRightCorner(na, na) = qbar * spec.h;
  big.bottomRightCorner(na, na) = abar * spec.h;

  const Matrix e = numkernel::expm(big);
  const Matrix m22 = e.bottomRightCorner(na, na);
  const Matrix m12 = e.topRightCorner(na, na);
  Matrix qd_bar = m22.transpose() * m12;
  qd_bar = 0.5 * (qd_bar + qd_bar.transpose()).eval();

  c.Qd = qd_bar.topLeftCorner(nx, nx);
  c.Md = qd_bar.topRightCorner(nx, nu);
  c.Rd = qd_bar.bottomRightCorner(nu, nu);
  return c;
}

qp::QpProblem build_qp(const OcpSpec& spec, const Vector& x0) {
  validate(spec);
  const int nx = spec.n_x();
  const int nu = spec.n_u();
  const int N = spec.N;
  if (x0.size() != nx) {
    throw std::invalid_argument("build_qp: x0 dimension");
  }

  const numkernel::DiscreteModel d = numkernel::zoh_discretize(spec.A, spec.B, spec.h);
  const StageCost c = stage_cost(spec);
  const Matrix qf = spec.qf_auto ? terminal_weight(spec) : spec.Qf;

  const int n_z = (N + 1) * nx + N * nu;
  const int m_eq = (N + 1) * nx;
  const auto xi = [nx](int k) { return k * nx; };
  const auto ui = [nx, nu, N](int k) { return (N + 1) * nx + k * nu; };

  qp::QpProblem q;
  q.n_z = n_z;
  q.H = Matrix::Zero(n_z, n_z);
  q.g = Vector::Zero(n_z);
  q.Aeq = Matrix::Zero(m_eq, n_z);
  q.beq = Vector::Zero(m_eq);
  q.lb = Vector::Constant(n_z, -kInf);
  q.ub = Vector::Constant(n_z, kInf);

  // Stage weights. Euler mode leaves x_0 unweighted (its stage term is a
  // constant anyway); Exact mode keeps the x_0/u_0 cross term, which does
  // change the minimizer.
  for (int k = 1; k < N; ++k) {
    q.H.block(xi(k), xi(k), nx, nx) = c.Qd;
  }
  q.H.block(xi(N), xi(N), nx, nx) = qf;
  for (int k = 0; k < N; ++k) {
    q.H.block(ui(k), ui(k), nu, nu) = c.Rd;
  }
  if (spec.cost_mode == CostMode::Exact) {
    q.H.block(xi(0), xi(0), nx, nx) = c.Qd;
    for (int k = 0; k < N; ++k) {
      q.H.block(xi(k), ui(k), nx, nu) = c.Md;
      q.H.block(ui(k), xi(k), nu, nx) = c.Md.transpose();
    }
  }

  // x_0 = x0, then x_{k+1} - Ad x_k - Bd u_k = 0.
  q.Aeq.block(0, xi(0), nx, nx) = Matrix::Identity(nx, nx);
  q.beq.head(nx) = x0;
  for (int k = 0; k < N; ++k) {
    const int row = (k + 1) * nx;
    q.Aeq.block(row, xi(k + 1), nx, nx) = Matrix::Identity(nx, nx);
    q.Aeq.block(row, xi(k), nx, nx) = -d.Ad;
    q.Aeq.block(row, ui(k), nx, nu) = -d.Bd;
  }

  // Boxes on interior states and every input; x_0 is pinned by the equality
  // and x_N is deliberately unbounded.
  for (int k = 1; k < N; ++k) {
    q.lb.segment(xi(k), nx) = spec.x_lb;
    q.ub.segment(xi(k), nx) = spec.x_ub;
  }
  for (int k = 0; k < N; ++k) {
    q.lb.segment(ui(k), nu) = spec.u_lb;
    q.ub.segment(ui(k), nu) = spec.u_ub;
  }
  return q;
}

ControlResult control(const OcpSpec& spec, const Vector& x0, const qp::QpSettings& settings) {
  const qp::QpProblem q = build_qp(spec, x0);
  const qp::QpSolution sol = qp::solve_qp(q, settings);
  ControlResult r;
  r.status = sol.status;
  if (sol.status == qp::QpStatus::Solved) {
    r.u = sol.z.segment((spec.N + 1) * spec.n_x(), spec.n_u());
  }
  return r;
}

Matrix terminal_weight(const OcpSpec& spec) {
  validate(spec);
  const numkernel::DiscreteModel d = numkernel::zoh_discretize(spec.A, spec.B, spec.h);
  const StageCost c = stage_cost(spec);
  if (spec.cost_mode == CostMode::Euler) {
    return numkernel::dare_solve(d.Ad, d.Bd, c.Qd, c.Rd);
  }
  // Cross-term Riccati equation via the standard substitution
  // A~ = Ad - Bd Rd^-1 Md', Q~ = Qd - Md Rd^-1 Md'.
  const Matrix rinv_mt = c.Rd.ldlt().solve(c.Md.transpose());
  const Matrix a_t = d.Ad - d.Bd * rinv_mt;
  Matrix q_t = c.Qd - c.Md * rinv_mt;
  q_t = 0.5 * (q_t + q_t.transpose()).eval();
  return numkernel::dare_solve(a_t, d.Bd, q_t, c.Rd);
}

OcpSpec with_resolved_terminal_weight(const OcpSpec& spec) {
  OcpSpec out = spec;
  if (out.qf_auto) {
    out.Qf = terminal_weight(spec);
    out.qf_auto = false;
  }
  return out;
}

}  // namespace modmpc::mpc
