#pragma once

#include "modmpc/numkernel.hpp"

#include <string>
#include <vector>

namespace modmpc::plants {

/// Nonlinear plant with equilibrium at the origin, its linearization there,
/// and the operating box used by the controller.
struct PlantModel {
  int n_x = 0;
  int n_u = 0;
  numkernel::VectorField f;
  Matrix A;  // df/dx at (0, 0)
  Matrix B;  // df/du at (0, 0)
  Vector x_lb, x_ub;
  Vector u_lb, u_ub;
  std::string name;
};

/// Built-in desk-scale plants: "double_integrator" and "pendulum".
PlantModel builtin(const std::string& name);
const std::vector<std::string>& builtin_names();

/// Coordinate shift turning a tracking problem around the equilibrium
/// (e_s, u_s) into regulation to the origin. Throws when (e_s, u_s) is not
/// an equilibrium of the given model (tolerance 1e-8).
PlantModel shift(const PlantModel& tracking, const Vector& e_s, const Vector& u_s);

/// Central finite-difference Jacobians of f at (x, u).
std::pair<Matrix, Matrix> linearize_fd(const numkernel::VectorField& f, int n_x, int n_u,
                                       const Vector& x, const Vector& u, double step = 1e-6);

/// Weighted initial-condition set; weights are normalized to sum to one on
/// construction.
struct ScenarioSet {
  std::vector<Vector> x0;
  std::vector<double> w;

  static ScenarioSet make(std::vector<Vector> x0, std::vector<double> weights);
};

}  // namespace modmpc::plants
