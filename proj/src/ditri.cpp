#include "modmpc/ditri.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace modmpc::ditri {

namespace {

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

double simplex_area(const Simplex& s) {
  const double cross = (s.v[1][0] - s.v[0][0]) * (s.v[2][1] - s.v[0][1]) -
                       (s.v[1][1] - s.v[0][1]) * (s.v[2][0] - s.v[0][0]);
  return 0.5 * std::abs(cross);
}

Point2 simplex_centroid(const Simplex& s) {
  return {(s.v[0][0] + s.v[1][0] + s.v[2][0]) / 3.0, (s.v[0][1] + s.v[1][1] + s.v[2][1]) / 3.0};
}

double simplex_size(const Simplex& s) {
  const Point2 c = simplex_centroid(s);
  return std::max({dist(c, s.v[0]), dist(c, s.v[1]), dist(c, s.v[2])});
}

Point2 sample_point(const Simplex& s, double u1, double u2) {
  Point2 p = s.v[0];  // s_1 = b_1
  const double draws[2] = {u1, u2};
  for (int i = 2; i <= 3; ++i) {
    const double t = std::pow(draws[i - 2], 1.0 / (i - 1));
    const Point2& b = s.v[i - 1];
    p = {b[0] + t * (p[0] - b[0]), b[1] + t * (p[1] - b[1])};
  }
  return p;
}

Point2 sample_in_simplex(const Simplex& s, Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return sample_point(s, u1, u2);
}

std::array<double, 3> barycentric(const Simplex& s, const Point2& c) {
  const double det = (s.v[1][1] - s.v[2][1]) * (s.v[0][0] - s.v[2][0]) +
                     (s.v[2][0] - s.v[1][0]) * (s.v[0][1] - s.v[2][1]);
  const double l0 = ((s.v[1][1] - s.v[2][1]) * (c[0] - s.v[2][0]) +
                     (s.v[2][0] - s.v[1][0]) * (c[1] - s.v[2][1])) /
                    det;
  const double l1 = ((s.v[2][1] - s.v[0][1]) * (c[0] - s.v[2][0]) +
                     (s.v[0][0] - s.v[2][0]) * (c[1] - s.v[2][1])) /
                    det;
  return {l0, l1, 1.0 - l0 - l1};
}

std::pair<Simplex, Simplex> divide(const Simplex& s) {
  if (simplex_area(s) < 1e-12) {
    throw std::invalid_argument("divide: degenerate simplex");
  }
  // Edge pairs in lowest-index order; strict comparison keeps the first on
  // ties.
  constexpr std::array<std::array<int, 2>, 3> edges = {{{0, 1}, {0, 2}, {1, 2}}};
  int best = 0;
  double best_len = -1.0;
  for (int e = 0; e < 3; ++e) {
    const double len = dist(s.v[edges[e][0]], s.v[edges[e][1]]);
    if (len > best_len) {
      best_len = len;
      best = e;
    }
  }
  const int ea = edges[best][0];
  const int eb = edges[best][1];
  const int opposite = 3 - ea - eb;
  const Point2 mid = {0.5 * (s.v[ea][0] + s.v[eb][0]), 0.5 * (s.v[ea][1] + s.v[eb][1])};

  Simplex a, b;
  a.v = {mid, s.v[opposite], s.v[ea]};
  b.v = {mid, s.v[opposite], s.v[eb]};
  a.d = simplex_size(a);
  b.d = simplex_size(b);
  return {a, b};
}

double dbar(long i, const DitriConfig& cfg) {
  return std::sqrt(cfg.dbar_c / std::pow(cfg.dbar_base, static_cast<double>(i) / cfg.dbar_div));
}

std::vector<int> potentially_optimal(const std::vector<Simplex>& pool, const moo::Archive& archive,
                                     long iter, const DitriConfig& cfg) {
  std::vector<bool> on_front(archive.records().size(), false);
  for (int r : archive.front()) {
    on_front[r] = true;
  }

  std::vector<int> rank1;
  std::vector<int> selected;
  const double threshold = dbar(iter, cfg);
  for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
    const Simplex& s = pool[i];
    if (!s.active) continue;
    const bool is_rank1 = s.record >= 0 && on_front[s.record];
    if (is_rank1) {
      rank1.push_back(i);
    }
    if (s.d > threshold) {
      selected.push_back(i);
    }
  }

  if (cfg.strict_rank_tie && !rank1.empty()) {
    double d_max = 0.0;
    for (int i : rank1) {
      d_max = std::max(d_max, pool[i].d);
    }
    std::erase_if(rank1, [&](int i) { return pool[i].d < d_max; });
  }

  for (int i : rank1) {
    if (std::find(selected.begin(), selected.end(), i) == selected.end()) {
      selected.push_back(i);
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

namespace {

struct EvalContext {
  const Evaluator& evaluator;
  const Bounds& bounds;
  moo::Archive& archive;
  std::map<std::pair<std::uint64_t, std::uint64_t>, int>& cache;
  int& evals;
};

// Samples one point in the simplex, snaps it, and either evaluates or
// reuses the cached record for an exactly repeated design.
void evaluate_simplex(Simplex& s, Rng& rng, EvalContext& ctx) {
  const Point2 c = sample_in_simplex(s, rng);
  const DesignPoint p = moo::snap(moo::denormalize(c, ctx.bounds), ctx.bounds);
  const std::pair<std::uint64_t, std::uint64_t> key = {std::bit_cast<std::uint64_t>(p.h),
                                                       static_cast<std::uint64_t>(p.N)};
  if (const auto it = ctx.cache.find(key); it != ctx.cache.end()) {
    s.record = it->second;
    return;
  }
  moo::EvalRecord rec;
  rec.p = p;
  rec.c = moo::normalize(p, ctx.bounds);
  rec.l = ctx.evaluator(p);
  rec.eval_index = ++ctx.evals;
  s.record = ctx.archive.append(rec);
  ctx.cache.emplace(key, s.record);
}

}  // namespace

RunResult run(const Evaluator& evaluator, const Bounds& bounds, const DitriConfig& cfg,
              const IterObserver& observer) {
  moo::validate(bounds);
  if (cfg.max_evals < 2) {
    throw std::invalid_argument("ditri: max_evals must be >= 2");
  }

  RunResult result;
  Rng rng(cfg.seed);
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> cache;
  EvalContext ctx{evaluator, bounds, result.archive, cache, result.evaluations};

  // Anti-diagonal split of the unit square.
  Simplex s1, s2;
  s1.v = {Point2{0.0, 0.0}, Point2{1.0, 0.0}, Point2{0.0, 1.0}};
  s2.v = {Point2{1.0, 1.0}, Point2{1.0, 0.0}, Point2{0.0, 1.0}};
  s1.d = simplex_size(s1);
  s2.d = simplex_size(s2);
  result.pool = {s1, s2};
  for (Simplex& s : result.pool) {
    evaluate_simplex(s, rng, ctx);
  }

  if (observer) {
    observer(0, result.pool, result.archive);
  }

  long iter = 0;
  bool budget_hit = result.evaluations >= cfg.max_evals;
  while (!budget_hit && iter < cfg.max_iters) {
    const std::vector<int> chosen = potentially_optimal(result.pool, result.archive, iter, cfg);
    for (int idx : chosen) {
      auto [a, b] = divide(result.pool[idx]);
      result.pool[idx].active = false;
      const size_t first_child = result.pool.size();
      result.pool.push_back(a);
      result.pool.push_back(b);
      for (size_t k = first_child; k < first_child + 2; ++k) {
        evaluate_simplex(result.pool[k], rng, ctx);
        if (result.evaluations >= cfg.max_evals) {
          budget_hit = true;
          break;
        }
      }
      if (budget_hit) break;
    }
    ++iter;
    if (observer) {
      observer(iter, result.pool, result.archive);
    }
  }

  result.iterations = iter;
  return result;
}

}  // namespace modmpc::ditri
