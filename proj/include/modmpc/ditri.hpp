#pragma once

#include "modmpc/moo.hpp"
#include "modmpc/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace modmpc::ditri {

using moo::Bounds;
using moo::DesignPoint;
using moo::Evaluator;

using Point2 = std::array<double, 2>;

/// Triangle in normalized design space. Each simplex carries exactly one
/// evaluated point (an archive record) and its size measure d, the longest
/// centroid-to-vertex distance. Divided simplexes stay in the pool with
/// active = false.
struct Simplex {
  std::array<Point2, 3> v;
  double d = 0.0;
  int record = -1;
  bool active = true;
};

struct DitriConfig {
  int max_evals = 20;
  long max_iters = 1000000;
  std::uint64_t seed = 0;
  // Lipschitz-constant surrogate of the projected-bound rule; with integer
  // ranks its limit reduces selection to rank-1 membership, so the value
  // never enters the arithmetic.
  double epsilon = 1e-9;
  // Forced-division schedule dbar(i) = sqrt(dbar_c / dbar_base^(i/dbar_div)).
  double dbar_c = 5.0;
  double dbar_base = 9.0;
  double dbar_div = 8.0;
  // Strict reading of the projected-bound rule: among rank-1 simplexes keep
  // only those of largest d.
  bool strict_rank_tie = false;
};

double simplex_area(const Simplex& s);
double simplex_size(const Simplex& s);
Point2 simplex_centroid(const Simplex& s);

/// Uniform sample inside the simplex via the vertex-interpolation
/// recurrence s_1 = b_1, s_i = b_i + U^(1/(i-1)) (s_{i-1} - b_i); the
/// expected value is the centroid.
Point2 sample_in_simplex(const Simplex& s, Rng& rng);

/// Same recurrence with explicit uniform draws.
Point2 sample_point(const Simplex& s, double u1, double u2);

/// Barycentric coordinates of c with respect to the simplex vertices.
std::array<double, 3> barycentric(const Simplex& s, const Point2& c);

/// Bisects the longest edge at its midpoint; each child keeps the opposite
/// vertex and one endpoint of the bisected edge, so the two children have
/// equal area. Edge-length ties break toward the lowest vertex-index pair.
std::pair<Simplex, Simplex> divide(const Simplex& s);

/// Forced-division threshold at iteration i.
double dbar(long i, const DitriConfig& cfg);

/// Indices of the active simplexes to divide: those whose evaluated point
/// is on the archive front (rank 1 among all evaluated points), plus every
/// active simplex larger than dbar(iter).
std::vector<int> potentially_optimal(const std::vector<Simplex>& pool, const moo::Archive& archive,
                                     long iter, const DitriConfig& cfg);

using IterObserver =
    std::function<void(long iter, const std::vector<Simplex>& pool, const moo::Archive& archive)>;

struct RunResult {
  moo::Archive archive;
  std::vector<Simplex> pool;
  long iterations = 0;
  int evaluations = 0;
};

/// Full optimizer run. The unit square is first split along the
/// anti-diagonal into two simplexes, one point is sampled and evaluated per
/// simplex, and the loop divides every potentially optimal simplex until
/// the evaluation or iteration budget is exhausted. Snapped designs that
/// exactly repeat an earlier evaluation reuse the cached objectives without
/// consuming budget. The observer, when given, is called after the initial
/// phase (iter 0) and after every iteration.
RunResult run(const Evaluator& evaluator, const Bounds& bounds, const DitriConfig& cfg,
              const IterObserver& observer = {});

}  // namespace modmpc::ditri
