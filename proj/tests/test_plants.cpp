#include "modmpc/plants.hpp"

#include <doctest.h>

#include <cmath>

using namespace modmpc;
using namespace modmpc::plants;

TEST_SUITE_BEGIN("plants");

TEST_CASE("double integrator linearization is the model itself") {
  const PlantModel p = builtin("double_integrator");
  CHECK(p.A(0, 1) == 1.0);
  CHECK(p.A(1, 0) == 0.0);
  CHECK(p.B(1, 0) == 1.0);
  CHECK(p.f(Vector::Zero(2), Vector::Zero(1)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("pendulum equilibrium and hand linearization") {
  const PlantModel p = builtin("pendulum");
  CHECK(p.f(Vector::Zero(2), Vector::Zero(1)).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(p.A(0, 1) == 1.0);
  CHECK(p.A(1, 0) == 1.0);  // d(sin x1)/dx1 at 0
  CHECK(p.A(1, 1) == -0.1);
  CHECK(p.B(1, 0) == 1.0);
}

TEST_CASE("unknown builtin name") {
  CHECK_THROWS_AS(builtin("tricycle"), std::invalid_argument);
}

TEST_CASE("finite differences confirm every builtin linearization") {
  for (const auto& name : builtin_names()) {
    const PlantModel p = builtin(name);
    const auto [a, b] =
        linearize_fd(p.f, p.n_x, p.n_u, Vector::Zero(p.n_x), Vector::Zero(p.n_u));
    CHECK((a - p.A).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((b - p.B).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("shift by zero is the identity transformation") {
  const PlantModel p = builtin("double_integrator");
  const PlantModel s = shift(p, Vector::Zero(2), Vector::Zero(1));
  CHECK(s.x_lb == p.x_lb);
  CHECK(s.x_ub == p.x_ub);
  Vector x(2), u(1);
  x << 0.7, -0.3;
  u << 0.5;
  CHECK((s.f(x, u) - p.f(x, u)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("shift moves the operating box") {
  const PlantModel p = builtin("double_integrator");
  Vector e_s(2);
  e_s << 1.0, 0.0;
  const PlantModel s = shift(p, e_s, Vector::Zero(1));
  CHECK(s.x_lb[0] == -6.0);
  CHECK(s.x_ub[0] == 4.0);
  CHECK(s.f(Vector::Zero(2), Vector::Zero(1)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("shift rejects a non-equilibrium setpoint") {
  const PlantModel p = builtin("double_integrator");
  Vector e_s(2);
  e_s << 1.0, 1.0;  // nonzero velocity cannot be steady
  CHECK_THROWS_AS(shift(p, e_s, Vector::Zero(1)), std::invalid_argument);
}

TEST_CASE("shift preserves trajectories up to the coordinate change") {
  const PlantModel p = builtin("pendulum");
  Vector e_s(2), u_s(1);
  e_s << 0.5, 0.0;
  u_s << -std::sin(0.5);  // holds the pendulum at 0.5 rad
  const PlantModel s = shift(p, e_s, u_s);

  Vector e = Vector::Zero(2);
  e << 0.8, 0.2;
  Vector x = e - e_s;
  Vector u(1);
  u << 0.3;
  const double dt = 0.01;
  for (int k = 0; k < 200; ++k) {
    e = numkernel::rk4_step(p.f, e, u, dt);
    x = numkernel::rk4_step(s.f, x, Vector(u - u_s), dt);
    CHECK((x - (e - e_s)).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("scenario weights normalize to one") {
  std::vector<Vector> x0 = {Vector::Zero(2), Vector::Ones(2)};
  const ScenarioSet s = ScenarioSet::make(x0, {2.0, 6.0});
  CHECK(s.w[0] == doctest::Approx(0.25));
  CHECK(s.w[1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(ScenarioSet::make({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ScenarioSet::make(x0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ScenarioSet::make(x0, {1.0, 0.0}), std::invalid_argument);
}

TEST_SUITE_END();
