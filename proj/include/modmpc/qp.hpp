#pragma once

#include "modmpc/numkernel.hpp"

namespace modmpc::qp {

enum class QpStatus { Solved, MaxIterations, Infeasible };

/// Convex QP: minimize 0.5 z'Hz + g'z subject to Aeq z = beq and
/// lb <= z <= ub element-wise (+-inf entries disable a bound).
struct QpProblem {
  Matrix H;
  Vector g;
  Matrix Aeq;
  Vector beq;
  Vector lb;
  Vector ub;
  int n_z = 0;
};

struct QpSolution {
  Vector z;
  double objective = 0.0;
  int iterations = 0;
  QpStatus status = QpStatus::MaxIterations;
};

struct QpSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 20000;
  // Operator-splitting constants; fixed, no adaptive scheme.
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  // Iterate-stall window used as the infeasibility certificate substitute.
  double stall_tol = 1e-12;
  int stall_window = 100;
};

/// First-order operator-splitting (ADMM) solve. Deterministic: identical
/// inputs yield bit-identical iterates. Declares Infeasible when the
/// iterates stall while the primal residual stays large.
QpSolution solve_qp(const QpProblem& q, const QpSettings& settings = {});

/// Exact reference minimizer by enumerating every active-set combination of
/// the box bounds and solving the corresponding equality-constrained KKT
/// system. Test oracle only: requires n_z <= 8 and at most 16 finite bounds.
QpSolution oracle_qp(const QpProblem& q);

double objective_value(const QpProblem& q, const Vector& z);

}  // namespace modmpc::qp
