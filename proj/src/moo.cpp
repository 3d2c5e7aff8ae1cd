#include "modmpc/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace modmpc::moo {

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  return a.V <= b.V && a.eta <= b.eta && (a.V < b.V || a.eta < b.eta);
}

std::vector<int> pareto_filter(const std::vector<ObjectiveVector>& points) {
  const int n = static_cast<int>(points.size());
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    bool dominated = false;
    for (int j = 0; j < n && !dominated; ++j) {
      dominated = dominates(points[j], points[i]);
    }
    if (!dominated) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<int> ranks(const std::vector<ObjectiveVector>& points) {
  const int n = static_cast<int>(points.size());
  std::vector<int> rank(n, 0);
  int assigned = 0;
  int level = 1;
  while (assigned < n) {
    // Peel: non-dominated among the not-yet-ranked points.
    std::vector<int> layer;
    for (int i = 0; i < n; ++i) {
      if (rank[i] != 0) continue;
      bool dominated = false;
      for (int j = 0; j < n && !dominated; ++j) {
        dominated = rank[j] == 0 && dominates(points[j], points[i]);
      }
      if (!dominated) {
        layer.push_back(i);
      }
    }
    for (int i : layer) {
      rank[i] = level;
    }
    assigned += static_cast<int>(layer.size());
    ++level;
  }
  return rank;
}

void validate(const Bounds& b) {
  if (!(b.lower.h < b.upper.h) || !(b.lower.N < b.upper.N)) {
    throw std::invalid_argument("bounds: lower must be strictly below upper");
  }
  if (!(b.lower.h > 0.0) || b.lower.N < 1) {
    throw std::invalid_argument("bounds: need h > 0 and N >= 1");
  }
}

std::array<double, 2> normalize(const DesignPoint& p, const Bounds& b) {
  return {(p.h - b.lower.h) / (b.upper.h - b.lower.h),
          (static_cast<double>(p.N) - b.lower.N) / (static_cast<double>(b.upper.N) - b.lower.N)};
}

ContinuousPoint denormalize(const std::array<double, 2>& c, const Bounds& b) {
  ContinuousPoint p;
  p.h = b.lower.h + (b.upper.h - b.lower.h) * c[0];
  p.N = b.lower.N + (static_cast<double>(b.upper.N) - b.lower.N) * c[1];
  return p;
}

namespace {

double round_half_up(double x) { return std::floor(x + 0.5); }

}  // namespace

DesignPoint snap(const ContinuousPoint& p, const Bounds& b) {
  DesignPoint out;
  out.h = b.h_integer ? round_half_up(p.h) : p.h;
  out.N = static_cast<int>(b.N_integer ? round_half_up(p.N) : p.N);
  return out;
}

int Archive::append(const EvalRecord& record) {
  const int idx = static_cast<int>(records_.size());
  records_.push_back(record);

  bool dominated = false;
  for (int i : front_) {
    if (dominates(records_[i].l, record.l)) {
      dominated = true;
      break;
    }
  }
  if (!dominated) {
    std::erase_if(front_, [&](int i) { return dominates(record.l, records_[i].l); });
    front_.push_back(idx);
  }
  return idx;
}

std::vector<ObjectiveVector> Archive::objectives() const {
  std::vector<ObjectiveVector> out;
  out.reserve(records_.size());
  for (const auto& r : records_) {
    out.push_back(r.l);
  }
  return out;
}

std::vector<ObjectiveVector> Archive::front_objectives() const {
  std::vector<ObjectiveVector> out;
  out.reserve(front_.size());
  for (int i : front_) {
    out.push_back(records_[i].l);
  }
  return out;
}

std::vector<ObjectiveVector> normalize_front(const std::vector<ObjectiveVector>& points,
                                             const std::vector<ObjectiveVector>& reference_union) {
  if (reference_union.empty()) {
    throw std::invalid_argument("normalize_front: empty reference union");
  }
  double v_lo = reference_union[0].V, v_hi = reference_union[0].V;
  double e_lo = reference_union[0].eta, e_hi = reference_union[0].eta;
  for (const auto& q : reference_union) {
    v_lo = std::min(v_lo, q.V);
    v_hi = std::max(v_hi, q.V);
    e_lo = std::min(e_lo, q.eta);
    e_hi = std::max(e_hi, q.eta);
  }
  std::vector<ObjectiveVector> out;
  out.reserve(points.size());
  for (const auto& q : points) {
    ObjectiveVector n;
    n.V = v_hi > v_lo ? (q.V - v_lo) / (v_hi - v_lo) : 0.0;
    n.eta = e_hi > e_lo ? (q.eta - e_lo) / (e_hi - e_lo) : 0.0;
    out.push_back(n);
  }
  return out;
}

namespace {

double dist(const ObjectiveVector& a, const ObjectiveVector& b) {
  return std::hypot(a.V - b.V, a.eta - b.eta);
}

}  // namespace

double closeness(const std::vector<ObjectiveVector>& front,
                 const std::vector<ObjectiveVector>& ref_front) {
  if (front.empty() || ref_front.empty()) {
    throw std::invalid_argument("closeness: empty front");
  }
  double total = 0.0;
  for (const auto& p : front) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : ref_front) {
      best = std::min(best, dist(p, q));
    }
    total += best;
  }
  return total / static_cast<double>(front.size());
}

namespace {

const ObjectiveVector& min_v_tip(const std::vector<ObjectiveVector>& f) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(f.size()); ++i) {
    if (f[i].V < f[best].V) best = i;
  }
  return f[best];
}

const ObjectiveVector& min_eta_tip(const std::vector<ObjectiveVector>& f) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(f.size()); ++i) {
    if (f[i].eta < f[best].eta) best = i;
  }
  return f[best];
}

}  // namespace

CoverageVariants coverage_variants(const std::vector<ObjectiveVector>& front,
                                   const std::vector<ObjectiveVector>& ref_front) {
  if (front.empty() || ref_front.empty()) {
    throw std::invalid_argument("coverage: empty front");
  }
  const double dv = dist(min_v_tip(front), min_v_tip(ref_front));
  const double de = dist(min_eta_tip(front), min_eta_tip(ref_front));
  CoverageVariants c;
  c.mean = 0.5 * (dv + de);
  c.sum = dv + de;
  c.max = std::max(dv, de);
  return c;
}

double coverage(const std::vector<ObjectiveVector>& front,
                const std::vector<ObjectiveVector>& ref_front) {
  return coverage_variants(front, ref_front).mean;
}

Archive grid_oracle(const Evaluator& evaluator, const Bounds& bounds, int n_h) {
  validate(bounds);
  if (n_h < 1) {
    throw std::invalid_argument("grid_oracle: n_h must be >= 1");
  }
  Archive archive;
  int eval_index = 0;
  for (int n = bounds.lower.N; n <= bounds.upper.N; ++n) {
    for (int j = 0; j < n_h; ++j) {
      DesignPoint p;
      p.h = n_h == 1 ? bounds.lower.h
                     : bounds.lower.h + (bounds.upper.h - bounds.lower.h) * j / (n_h - 1.0);
      p.N = n;
      EvalRecord rec;
      rec.p = p;
      rec.c = normalize(p, bounds);
      rec.l = evaluator(p);
      rec.eval_index = ++eval_index;
      archive.append(rec);
    }
  }
  return archive;
}

}  // namespace modmpc::moo
