#pragma once

#include <Eigen/Dense>

#include <functional>

namespace modmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numkernel {

/// Continuous pair (A, B) sampled with period h under zero-order hold.
struct DiscreteModel {
  Matrix Ad;
  Matrix Bd;
  double h = 0.0;
};

using VectorField = std::function<Vector(const Vector& x, const Vector& u)>;

/// Matrix exponential by scaling-and-squaring with an order-13 truncated
/// series. Accurate to ~1e-10 relative for the small, mildly scaled
/// matrices used here (inf-norm up to ~10).
Matrix expm(const Matrix& m);

/// Zero-order-hold discretization: (Ad, Bd) are the top blocks of
/// expm([[A, B], [0, 0]] * h).
DiscreteModel zoh_discretize(const Matrix& a, const Matrix& b, double h);

/// Classical fourth-order Runge-Kutta update with u held constant over dt.
Vector rk4_step(const VectorField& f, const Vector& x, const Vector& u, double dt);

/// Discrete algebraic Riccati equation via the fixed-point recursion
///   P <- Qd + Ad' P Ad - Ad' P Bd (Rd + Bd' P Bd)^-1 Bd' P Ad
/// started from P = Qd. Throws std::runtime_error when the iteration does
/// not contract within max_iter (unstabilizable or badly scaled pair).
Matrix dare_solve(const Matrix& ad, const Matrix& bd, const Matrix& qd, const Matrix& rd,
                  double tol = 1e-13, int max_iter = 100000);

/// Inf-norm of the DARE residual for a candidate solution P.
double dare_residual(const Matrix& ad, const Matrix& bd, const Matrix& qd, const Matrix& rd,
                     const Matrix& p);

/// State-feedback gain K = (Rd + Bd' P Bd)^-1 Bd' P Ad for a DARE solution P.
Matrix dare_gain(const Matrix& ad, const Matrix& bd, const Matrix& rd, const Matrix& p);

}  // namespace numkernel
}  // namespace modmpc
