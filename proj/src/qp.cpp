#include "modmpc/qp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace modmpc::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const QpProblem& q) {
  const int n = q.n_z;
  if (n <= 0 || q.H.rows() != n || q.H.cols() != n || q.g.size() != n || q.lb.size() != n ||
      q.ub.size() != n) {
    throw std::invalid_argument("qp: inconsistent dimensions");
  }
  if (q.Aeq.size() > 0 && (q.Aeq.cols() != n || q.Aeq.rows() != q.beq.size())) {
    throw std::invalid_argument("qp: equality block dimensions");
  }
  const double hnorm = q.H.lpNorm<Eigen::Infinity>();
  if ((q.H - q.H.transpose()).lpNorm<Eigen::Infinity>() > 1e-9 * std::max(1.0, hnorm)) {
    throw std::invalid_argument("qp: H must be symmetric");
  }
  for (int i = 0; i < n; ++i) {
    if (q.lb[i] > q.ub[i]) {
      throw std::invalid_argument("qp: lb > ub");
    }
  }
}

double inf_norm_or_zero(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

}  // namespace

double objective_value(const QpProblem& q, const Vector& z) {
  return 0.5 * z.dot(q.H * z) + q.g.dot(z);
}

QpSolution solve_qp(const QpProblem& q, const QpSettings& s) {
  validate(q);
  const int n = q.n_z;
  const int m_eq = static_cast<int>(q.Aeq.rows());

  // Stack equality rows and box rows (only variables with a finite bound)
  // into a single constraint set l <= A z <= u.
  std::vector<int> boxed;
  for (int i = 0; i < n; ++i) {
    if (q.lb[i] > -kInf || q.ub[i] < kInf) {
      boxed.push_back(i);
    }
  }
  const int m = m_eq + static_cast<int>(boxed.size());

  Matrix A = Matrix::Zero(m, n);
  Vector l(m), u(m);
  if (m_eq > 0) {
    A.topRows(m_eq) = q.Aeq;
    l.head(m_eq) = q.beq;
    u.head(m_eq) = q.beq;
  }
  for (size_t k = 0; k < boxed.size(); ++k) {
    A(m_eq + static_cast<int>(k), boxed[k]) = 1.0;
    l[m_eq + static_cast<int>(k)] = q.lb[boxed[k]];
    u[m_eq + static_cast<int>(k)] = q.ub[boxed[k]];
  }

  Matrix K = q.H + s.sigma * Matrix::Identity(n, n);
  if (m > 0) {
    K += s.rho * (A.transpose() * A);
  }
  const Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("qp: H is not positive semidefinite");
  }

  Vector x = Vector::Zero(n);
  Vector zc = Vector::Zero(m);
  Vector y = Vector::Zero(m);

  QpSolution sol;
  int stall = 0;

  for (int it = 1; it <= s.max_iter; ++it) {
    Vector rhs = s.sigma * x - q.g;
    if (m > 0) {
      rhs += A.transpose() * (s.rho * zc - y);
    }
    const Vector x_tilde = llt.solve(rhs);
    const Vector z_tilde = m > 0 ? Vector(A * x_tilde) : Vector();

    const Vector x_next = s.alpha * x_tilde + (1.0 - s.alpha) * x;
    Vector zc_next(m), y_next(m);
    if (m > 0) {
      const Vector w = s.alpha * z_tilde + (1.0 - s.alpha) * zc;
      zc_next = (w + y / s.rho).cwiseMax(l).cwiseMin(u);
      y_next = y + s.rho * (w - zc_next);
    }

    const double dx = (x_next - x).lpNorm<Eigen::Infinity>();
    const double x_scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());

    x = x_next;
    if (m > 0) {
      zc = zc_next;
      y = y_next;
    }

    const Vector ax = m > 0 ? Vector(A * x) : Vector();
    const double r_prim = m > 0 ? (ax - zc).lpNorm<Eigen::Infinity>() : 0.0;

    Vector dual = q.H * x + q.g;
    if (m > 0) {
      dual += A.transpose() * y;
    }
    const double r_dual = dual.lpNorm<Eigen::Infinity>();

    const double tol_prim =
        s.eps_abs + s.eps_rel * std::max(inf_norm_or_zero(ax), inf_norm_or_zero(zc));
    const double tol_dual =
        s.eps_abs + s.eps_rel * std::max({(q.H * x).lpNorm<Eigen::Infinity>(),
                                          inf_norm_or_zero(q.g),
                                          m > 0 ? (A.transpose() * y).lpNorm<Eigen::Infinity>() : 0.0});

    if (r_prim <= tol_prim && r_dual <= tol_dual) {
      sol.z = x;
      sol.objective = objective_value(q, x);
      sol.iterations = it;
      sol.status = QpStatus::Solved;
      return sol;
    }

    if (dx < s.stall_tol * x_scale) {
      ++stall;
      if (stall >= s.stall_window && r_prim > 1e3 * s.eps_abs) {
        sol.z = x;
        sol.objective = objective_value(q, x);
        sol.iterations = it;
        sol.status = QpStatus::Infeasible;
        return sol;
      }
    } else {
      stall = 0;
    }
  }

  sol.z = x;
  sol.objective = objective_value(q, x);
  sol.iterations = s.max_iter;
  sol.status = QpStatus::MaxIterations;
  return sol;
}

QpSolution oracle_qp(const QpProblem& q) {
  validate(q);
  const int n = q.n_z;
  if (n > 8) {
    throw std::invalid_argument("oracle_qp: n_z must be <= 8");
  }
  int finite_bounds = 0;
  for (int i = 0; i < n; ++i) {
    finite_bounds += (q.lb[i] > -kInf) + (q.ub[i] < kInf);
  }
  if (finite_bounds > 16) {
    throw std::invalid_argument("oracle_qp: too many finite bounds");
  }

  const int m_eq = static_cast<int>(q.Aeq.rows());
  constexpr double feas_tol = 1e-7;

  QpSolution best;
  best.status = QpStatus::Infeasible;
  bool found = false;

  // Ternary mask per variable: 0 = free, 1 = at lower bound, 2 = at upper.
  std::vector<int> mask(n, 0);
  bool done = false;
  while (!done) {
    bool valid = true;
    for (int i = 0; i < n && valid; ++i) {
      if (mask[i] == 1 && q.lb[i] <= -kInf) valid = false;
      if (mask[i] == 2 && q.ub[i] >= kInf) valid = false;
    }

    if (valid) {
      std::vector<int> free_idx;
      Vector z = Vector::Zero(n);
      for (int i = 0; i < n; ++i) {
        if (mask[i] == 0) {
          free_idx.push_back(i);
        } else {
          z[i] = (mask[i] == 1) ? q.lb[i] : q.ub[i];
        }
      }
      const int nf = static_cast<int>(free_idx.size());

      // KKT system in the free variables with the equality constraints.
      Matrix kkt = Matrix::Zero(nf + m_eq, nf + m_eq);
      Vector rhs = Vector::Zero(nf + m_eq);
      for (int a = 0; a < nf; ++a) {
        for (int b = 0; b < nf; ++b) {
          kkt(a, b) = q.H(free_idx[a], free_idx[b]);
        }
        double lin = q.g[free_idx[a]];
        for (int i = 0; i < n; ++i) {
          if (mask[i] != 0) {
            lin += q.H(free_idx[a], i) * z[i];
          }
        }
        rhs[a] = -lin;
      }
      for (int r = 0; r < m_eq; ++r) {
        for (int a = 0; a < nf; ++a) {
          kkt(nf + r, a) = q.Aeq(r, free_idx[a]);
          kkt(a, nf + r) = q.Aeq(r, free_idx[a]);
        }
        double fixed = 0.0;
        for (int i = 0; i < n; ++i) {
          if (mask[i] != 0) {
            fixed += q.Aeq(r, i) * z[i];
          }
        }
        rhs[nf + r] = q.beq[r] - fixed;
      }

      bool candidate_ok = true;
      if (nf + m_eq > 0) {
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
        const Vector sol = cod.solve(rhs);
        const double res = (kkt * sol - rhs).lpNorm<Eigen::Infinity>();
        if (res > 1e-8 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) {
          candidate_ok = false;  // inconsistent stationarity system
        } else {
          for (int a = 0; a < nf; ++a) {
            z[free_idx[a]] = sol[a];
          }
        }
      }

      if (candidate_ok) {
        for (int i = 0; i < n && candidate_ok; ++i) {
          if (z[i] < q.lb[i] - feas_tol || z[i] > q.ub[i] + feas_tol) {
            candidate_ok = false;
          }
        }
        if (candidate_ok && m_eq > 0) {
          const double eq_res = (q.Aeq * z - q.beq).lpNorm<Eigen::Infinity>();
          if (eq_res > feas_tol * std::max(1.0, q.beq.lpNorm<Eigen::Infinity>())) {
            candidate_ok = false;
          }
        }
        if (candidate_ok) {
          const double obj = objective_value(q, z);
          if (!found || obj < best.objective) {
            best.z = z;
            best.objective = obj;
            best.status = QpStatus::Solved;
            found = true;
          }
        }
      }
    }

    // Next ternary mask.
    done = true;
    for (int i = 0; i < n; ++i) {
      if (++mask[i] <= 2) {
        done = false;
        break;
      }
      mask[i] = 0;
    }
    ++best.iterations;
  }

  if (!found) {
    best.z = Vector::Zero(n);
    best.objective = 0.0;
  }
  return best;
}

}  // namespace modmpc::qp
