#include "modmpc/numkernel.hpp"

#include <cmath>
#include <stdexcept>

namespace modmpc::numkernel {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

}  // namespace

Matrix expm(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("expm: matrix must be square");
  }
  require_finite(m, "expm");

  const Eigen::Index n = m.rows();
  const double norm = m.lpNorm<Eigen::Infinity>();

  // Scale so the series argument has inf-norm <= 0.5; the order-13 tail is
  // then below 1e-18 relative.
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Matrix a = m / std::ldexp(1.0, squarings);

  // Horner evaluation of I + A + A^2/2! + ... + A^13/13!.
  constexpr int order = 13;
  Matrix e = Matrix::Identity(n, n);
  for (int k = order; k >= 1; --k) {
    e = Matrix::Identity(n, n) + (a * e) / static_cast<double>(k);
  }

  for (int i = 0; i < squarings; ++i) {
    e = e * e;
  }
  return e;
}

DiscreteModel zoh_discretize(const Matrix& a, const Matrix& b, double h) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("zoh_discretize: A must be square");
  }
  if (b.rows() != a.rows()) {
    throw std::invalid_argument("zoh_discretize: B row count must match A");
  }
  if (!(h > 0.0)) {
    throw std::invalid_argument("zoh_discretize: h must be positive");
  }

  const Eigen::Index nx = a.rows();
  const Eigen::Index nu = b.cols();

  Matrix aug = Matrix::Zero(nx + nu, nx + nu);
  aug.topLeftCorner(nx, nx) = a * h;
  aug.topRightCorner(nx, nu) = b * h;

  const Matrix e = expm(aug);
  DiscreteModel d;
  d.Ad = e.topLeftCorner(nx, nx);
  d.Bd = e.topRightCorner(nx, nu);
  d.h = h;
  return d;
}

Vector rk4_step(const VectorField& f, const Vector& x, const Vector& u, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("rk4_step: dt must be positive");
  }
  const Vector k1 = f(x, u);
  const Vector k2 = f(x + 0.5 * dt * k1, u);
  const Vector k3 = f(x + 0.5 * dt * k2, u);
  const Vector k4 = f(x + dt * k3, u);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

Matrix dare_step(const Matrix& ad, const Matrix& bd, const Matrix& qd, const Matrix& rd,
                 const Matrix& p) {
  const Matrix bpb = rd + bd.transpose() * p * bd;
  const Matrix bpa = bd.transpose() * p * ad;
  Matrix next = qd + ad.transpose() * p * ad - bpa.transpose() * bpb.ldlt().solve(bpa);
  // Keep the iterate exactly symmetric; the recursion preserves symmetry
  // only up to roundoff.
  next = 0.5 * (next + next.transpose()).eval();
  return next;
}

}  // namespace

Matrix dare_solve(const Matrix& ad, const Matrix& bd, const Matrix& qd, const Matrix& rd,
                  double tol, int max_iter) {
  if (ad.rows() != ad.cols() || bd.rows() != ad.rows() || qd.rows() != ad.rows() ||
      qd.rows() != qd.cols() || rd.rows() != rd.cols() || rd.rows() != bd.cols()) {
    throw std::invalid_argument("dare_solve: inconsistent dimensions");
  }
  require_finite(ad, "dare_solve");
  require_finite(bd, "dare_solve");

  Matrix p = 0.5 * (qd + qd.transpose());
  for (int it = 0; it < max_iter; ++it) {
    const Matrix next = dare_step(ad, bd, qd, rd, p);
    const double diff = (next - p).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());
    p = next;
    if (!p.allFinite()) {
      throw std::runtime_error("dare_solve: iteration diverged");
    }
    if (diff <= tol * scale) {
      return p;
    }
  }
  throw std::runtime_error("dare_solve: no convergence within max_iter");
}

double dare_residual(const Matrix& ad, const Matrix& bd, const Matrix& qd, const Matrix& rd,
                     const Matrix& p) {
  return (dare_step(ad, bd, qd, rd, p) - p).lpNorm<Eigen::Infinity>();
}

Matrix dare_gain(const Matrix& ad, const Matrix& bd, const Matrix& rd, const Matrix& p) {
  const Matrix bpb = rd + bd.transpose() * p * bd;
  return bpb.ldlt().solve(bd.transpose() * p * ad);
}

}  // namespace modmpc::numkernel
