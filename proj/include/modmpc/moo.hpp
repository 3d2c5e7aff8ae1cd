#pragma once

#include <array>
#include <functional>
#include <vector>

namespace modmpc::moo {

/// Candidate MPC structure: sampling period and prediction-step count.
struct DesignPoint {
  double h = 0.0;
  int N = 1;
};

/// Objective pair (control performance V, resource number eta); both
/// minimized, both finite by the penalty policy.
struct ObjectiveVector {
  double V = 0.0;
  double eta = 0.0;
};

/// Strict Pareto dominance: no worse in both components, strictly better in
/// at least one.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Indices of the non-dominated points. Duplicated objective vectors are
/// all retained (no strict improvement between them).
std::vector<int> pareto_filter(const std::vector<ObjectiveVector>& points);

/// Pareto layer of every point: rank 1 is the non-dominated set, rank 2 is
/// non-dominated once rank 1 is removed, and so on.
std::vector<int> ranks(const std::vector<ObjectiveVector>& points);

/// Rectangular search space with per-coordinate integrality.
struct Bounds {
  DesignPoint lower;
  DesignPoint upper;
  bool h_integer = false;
  bool N_integer = true;
};

void validate(const Bounds& b);

/// Continuous point in design units before integer snapping.
struct ContinuousPoint {
  double h = 0.0;
  double N = 0.0;
};

/// Affine map onto the unit square and back: c = (p - lo) / (hi - lo).
std::array<double, 2> normalize(const DesignPoint& p, const Bounds& b);
ContinuousPoint denormalize(const std::array<double, 2>& c, const Bounds& b);

/// Rounds integer-valued coordinates to the nearest integer, half away
/// toward the larger integer; continuous coordinates pass through.
DesignPoint snap(const ContinuousPoint& p, const Bounds& b);

struct EvalRecord {
  DesignPoint p;
  std::array<double, 2> c{};  // normalized coordinates of p
  ObjectiveVector l;
  int eval_index = 0;
};

/// Append-only evaluation log with an incrementally maintained
/// non-dominated front. After every append the front equals
/// pareto_filter over all records.
class Archive {
 public:
  int append(const EvalRecord& record);
  const std::vector<EvalRecord>& records() const { return records_; }
  const std::vector<int>& front() const { return front_; }
  std::vector<ObjectiveVector> objectives() const;
  std::vector<ObjectiveVector> front_objectives() const;

 private:
  std::vector<EvalRecord> records_;
  std::vector<int> front_;
};

/// Affine rescale of points using per-axis min/max over the union of the
/// fronts being compared; a degenerate axis maps to 0.
std::vector<ObjectiveVector> normalize_front(const std::vector<ObjectiveVector>& points,
                                             const std::vector<ObjectiveVector>& reference_union);

/// Closeness: mean over front points of the smallest Euclidean distance to
/// the reference front. Inputs are expected in jointly normalized space.
double closeness(const std::vector<ObjectiveVector>& front,
                 const std::vector<ObjectiveVector>& ref_front);

struct CoverageVariants {
  double mean = 0.0;
  double sum = 0.0;
  double max = 0.0;
};

/// Coverage: distances between the min-V tips and between the min-eta tips
/// of the two fronts. coverage() returns the mean of the two; the variants
/// report all aggregations.
CoverageVariants coverage_variants(const std::vector<ObjectiveVector>& front,
                                   const std::vector<ObjectiveVector>& ref_front);
double coverage(const std::vector<ObjectiveVector>& front,
                const std::vector<ObjectiveVector>& ref_front);

using Evaluator = std::function<ObjectiveVector(const DesignPoint&)>;

/// Brute-force reference: n_h uniform h values (endpoints included) for
/// every integer N in the bounds.
Archive grid_oracle(const Evaluator& evaluator, const Bounds& bounds, int n_h = 400);

}  // namespace modmpc::moo
