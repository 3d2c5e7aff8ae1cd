#include "modmpc/plants.hpp"

#include <cmath>
#include <stdexcept>

namespace modmpc::plants {

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"double_integrator", "pendulum"};
  return names;
}

PlantModel builtin(const std::string& name) {
  PlantModel p;
  p.name = name;
  if (name == "double_integrator") {
    p.n_x = 2;
    p.n_u = 1;
    p.f = [](const Vector& x, const Vector& u) { return vec2(x[1], u[0]); };
    p.A = Matrix::Zero(2, 2);
    p.A(0, 1) = 1.0;
    p.B = Matrix::Zero(2, 1);
    p.B(1, 0) = 1.0;
    p.x_lb = vec2(-5.0, -5.0);
    p.x_ub = vec2(5.0, 5.0);
    p.u_lb = Vector::Constant(1, -2.0);
    p.u_ub = Vector::Constant(1, 2.0);
    return p;
  }
  if (name == "pendulum") {
    // Upright pendulum with normalized constants (g/l = 1, damping 0.1);
    // the open-loop equilibrium at the origin is unstable.
    p.n_x = 2;
    p.n_u = 1;
    p.f = [](const Vector& x, const Vector& u) {
      return vec2(x[1], std::sin(x[0]) - 0.1 * x[1] + u[0]);
    };
    p.A = Matrix::Zero(2, 2);
    p.A(0, 1) = 1.0;
    p.A(1, 0) = 1.0;
    p.A(1, 1) = -0.1;
    p.B = Matrix::Zero(2, 1);
    p.B(1, 0) = 1.0;
    p.x_lb = vec2(-1.2, -4.0);
    p.x_ub = vec2(1.2, 4.0);
    p.u_lb = Vector::Constant(1, -4.0);
    p.u_ub = Vector::Constant(1, 4.0);
    return p;
  }
  throw std::invalid_argument("builtin plant: unknown name '" + name + "'");
}

std::pair<Matrix, Matrix> linearize_fd(const numkernel::VectorField& f, int n_x, int n_u,
                                       const Vector& x, const Vector& u, double step) {
  Matrix a(n_x, n_x), b(n_x, n_u);
  for (int j = 0; j < n_x; ++j) {
    Vector xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    a.col(j) = (f(xp, u) - f(xm, u)) / (2.0 * step);
  }
  for (int j = 0; j < n_u; ++j) {
    Vector up = u, um = u;
    up[j] += step;
    um[j] -= step;
    b.col(j) = (f(x, up) - f(x, um)) / (2.0 * step);
  }
  return {a, b};
}

PlantModel shift(const PlantModel& tracking, const Vector& e_s, const Vector& u_s) {
  if (e_s.size() != tracking.n_x || u_s.size() != tracking.n_u) {
    throw std::invalid_argument("shift: setpoint dimensions");
  }
  const Vector residual = tracking.f(e_s, u_s);
  if (residual.lpNorm<Eigen::Infinity>() > 1e-8) {
    throw std::invalid_argument("shift: (e_s, u_s) is not an equilibrium");
  }

  PlantModel p;
  p.n_x = tracking.n_x;
  p.n_u = tracking.n_u;
  p.name = tracking.name + "_shifted";
  const auto base = tracking.f;
  p.f = [base, e_s, u_s](const Vector& x, const Vector& u) { return base(x + e_s, u + u_s); };
  std::tie(p.A, p.B) = linearize_fd(base, p.n_x, p.n_u, e_s, u_s);
  p.x_lb = tracking.x_lb - e_s;
  p.x_ub = tracking.x_ub - e_s;
  p.u_lb = tracking.u_lb - u_s;
  p.u_ub = tracking.u_ub - u_s;
  return p;
}

ScenarioSet ScenarioSet::make(std::vector<Vector> x0, std::vector<double> weights) {
  if (x0.empty() || x0.size() != weights.size()) {
    throw std::invalid_argument("scenarios: need matching, non-empty x0 and weight lists");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) {
      throw std::invalid_argument("scenarios: weights must be positive");
    }
    total += w;
  }
  for (double& w : weights) {
    w /= total;
  }
  ScenarioSet s;
  s.x0 = std::move(x0);
  s.w = std::move(weights);
  return s;
}

}  // namespace modmpc::plants
