#pragma once

#include "modmpc/moo.hpp"

#include <cstdint>

namespace modmpc::nsga {

struct NsgaConfig {
  int population = 20;  // even, >= 4
  int generations = 10;
  double crossover_prob = 0.9;
  double mutation_prob = 0.5;  // 1/n_p with n_p = 2
  double sbx_eta = 15.0;
  double mut_eta = 20.0;
  std::uint64_t seed = 0;
  // Optional evaluation budget; 0 leaves termination to the generation
  // count. Mid-generation the budget stops further evaluations.
  long max_evals = 0;
};

/// Crowding distance within each rank class; boundary individuals get
/// +infinity so they are always retained inside their class.
std::vector<double> crowding_distances(const std::vector<moo::ObjectiveVector>& objectives,
                                       const std::vector<int>& ranks);

/// Generational NSGA-II over the normalized design square: binary
/// tournament on (rank, crowding distance), simulated-binary crossover,
/// polynomial mutation, and (mu + lambda) selection by rank then crowding.
/// Every evaluation lands in the returned archive; integer design
/// coordinates are snapped exactly like the simplex optimizer.
moo::Archive run(const moo::Evaluator& evaluator, const moo::Bounds& bounds,
                 const NsgaConfig& cfg);

}  // namespace modmpc::nsga
