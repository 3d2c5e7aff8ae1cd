#pragma once

#include "modmpc/numkernel.hpp"
#include "modmpc/qp.hpp"

namespace modmpc::mpc {

enum class CostMode { Euler, Exact };

/// Finite-horizon optimal control problem over an LTI prediction model:
/// states and inputs box-bounded on [0, T), quadratic stage cost weighted
/// by (Q, R), terminal cost Qf on x_N. Qf may be fixed or derived from the
/// discrete Riccati equation of the sampled pair (qf_auto).
struct OcpSpec {
  Matrix A;
  Matrix B;
  Matrix Q;
  Matrix R;
  Matrix Qf;           // ignored when qf_auto
  bool qf_auto = true;
  Vector x_lb, x_ub;
  Vector u_lb, u_ub;
  double h = 0.1;
  int N = 1;
  CostMode cost_mode = CostMode::Euler;

  int n_x() const { return static_cast<int>(A.rows()); }
  int n_u() const { return static_cast<int>(B.cols()); }
};

void validate(const OcpSpec& spec);

/// Builds the sparse-form QP with decision vector
///   z = (x_0, ..., x_N, u_0, ..., u_{N-1}).
/// Equalities pin x_0 = x0 and the sampled dynamics; boxes apply to
/// x_1..x_{N-1} and every u_k; x_N is unconstrained. Euler mode weights
/// stages by h*Q and h*R; Exact mode uses the integrated stage cost of the
/// hold interval, including the state-input cross term.
qp::QpProblem build_qp(const OcpSpec& spec, const Vector& x0);

struct ControlResult {
  Vector u;
  qp::QpStatus status = qp::QpStatus::MaxIterations;
};

/// MPC control law: first input block of the QP minimizer.
ControlResult control(const OcpSpec& spec, const Vector& x0, const qp::QpSettings& settings = {});

/// Terminal weight from the discrete Riccati equation of the sampled pair
/// and the discretized stage weights.
Matrix terminal_weight(const OcpSpec& spec);

/// Copy of spec with Qf resolved to a concrete matrix (qf_auto cleared).
OcpSpec with_resolved_terminal_weight(const OcpSpec& spec);

/// Discretized stage cost blocks for one sampling interval: x'Qd x +
/// 2 x'Md u + u'Rd u. Euler mode has Md = 0.
struct StageCost {
  Matrix Qd;
  Matrix Md;
  Matrix Rd;
};
StageCost stage_cost(const OcpSpec& spec);

}  // namespace modmpc::mpc
