#include "modmpc/nsga.hpp"

#include "modmpc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace modmpc::nsga {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Individual {
  std::array<double, 2> c{};
  moo::ObjectiveVector l;
  int rank = 0;
  double crowding = 0.0;
};

void assign_rank_and_crowding(std::vector<Individual>& pop) {
  std::vector<moo::ObjectiveVector> objs;
  objs.reserve(pop.size());
  for (const auto& ind : pop) {
    objs.push_back(ind.l);
  }
  const std::vector<int> r = moo::ranks(objs);
  const std::vector<double> crowd = crowding_distances(objs, r);
  for (size_t i = 0; i < pop.size(); ++i) {
    pop[i].rank = r[i];
    pop[i].crowding = crowd[i];
  }
}

// Rank first, then crowding; index breaks remaining ties deterministically.
bool beats(const std::vector<Individual>& pop, int a, int b) {
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank;
  if (pop[a].crowding != pop[b].crowding) return pop[a].crowding > pop[b].crowding;
  return a < b;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void sbx_pair(double& a, double& b, double eta, Rng& rng) {
  const double u = rng.uniform();
  const double beta =
      u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
               : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
  const double c1 = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b);
  const double c2 = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b);
  a = clamp01(c1);
  b = clamp01(c2);
}

void mutate(double& x, double eta, Rng& rng) {
  const double u = rng.uniform();
  const double delta = u < 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0
                               : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
  x = clamp01(x + delta);
}

}  // namespace

std::vector<double> crowding_distances(const std::vector<moo::ObjectiveVector>& objectives,
                                       const std::vector<int>& ranks) {
  const int n = static_cast<int>(objectives.size());
  std::vector<double> crowd(n, 0.0);
  int max_rank = 0;
  for (int r : ranks) {
    max_rank = std::max(max_rank, r);
  }
  for (int level = 1; level <= max_rank; ++level) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (ranks[i] == level) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() <= 2) {
      for (int i : members) crowd[i] = kInf;
      continue;
    }
    for (int obj = 0; obj < 2; ++obj) {
      const auto value = [&](int i) { return obj == 0 ? objectives[i].V : objectives[i].eta; };
      std::vector<int> order = members;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return value(a) < value(b) || (value(a) == value(b) && a < b);
      });
      const double span = value(order.back()) - value(order.front());
      crowd[order.front()] = kInf;
      crowd[order.back()] = kInf;
      if (span <= 0.0) continue;
      for (size_t k = 1; k + 1 < order.size(); ++k) {
        if (crowd[order[k]] < kInf) {
          crowd[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / span;
        }
      }
    }
  }
  return crowd;
}

moo::Archive run(const moo::Evaluator& evaluator, const moo::Bounds& bounds,
                 const NsgaConfig& cfg) {
  moo::validate(bounds);
  if (cfg.population < 4 || cfg.population % 2 != 0) {
    throw std::invalid_argument("nsga: population must be even and >= 4");
  }
  if (cfg.generations < 0) {
    throw std::invalid_argument("nsga: generations must be >= 0");
  }

  moo::Archive archive;
  Rng rng(cfg.seed);
  long evals = 0;
  const auto budget_left = [&] { return cfg.max_evals <= 0 || evals < cfg.max_evals; };

  const auto evaluate = [&](Individual& ind) {
    const moo::DesignPoint p = moo::snap(moo::denormalize(ind.c, bounds), bounds);
    moo::EvalRecord rec;
    rec.p = p;
    rec.c = moo::normalize(p, bounds);
    rec.l = evaluator(p);
    rec.eval_index = static_cast<int>(++evals);
    archive.append(rec);
    ind.l = rec.l;
  };

  std::vector<Individual> pop(cfg.population);
  for (auto& ind : pop) {
    ind.c = {rng.uniform(), rng.uniform()};
    if (!budget_left()) break;
    evaluate(ind);
  }
  assign_rank_and_crowding(pop);

  for (int gen = 0; gen < cfg.generations && budget_left(); ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(cfg.population);
    while (static_cast<int>(offspring.size()) < cfg.population) {
      const auto tournament = [&] {
        const int a = rng.below(cfg.population);
        const int b = rng.below(cfg.population);
        return beats(pop, a, b) ? a : b;
      };
      Individual c1 = pop[tournament()];
      Individual c2 = pop[tournament()];
      if (rng.uniform() <= cfg.crossover_prob) {
        for (int var = 0; var < 2; ++var) {
          if (rng.uniform() <= 0.5) {
            sbx_pair(c1.c[var], c2.c[var], cfg.sbx_eta, rng);
          }
        }
      }
      for (Individual* child : {&c1, &c2}) {
        for (int var = 0; var < 2; ++var) {
          if (rng.uniform() <= cfg.mutation_prob) {
            mutate(child->c[var], cfg.mut_eta, rng);
          }
        }
      }
      offspring.push_back(c1);
      offspring.push_back(c2);
    }

    std::vector<Individual> evaluated;
    for (auto& child : offspring) {
      if (!budget_left()) break;
      evaluate(child);
      evaluated.push_back(child);
    }
    if (evaluated.empty()) break;

    std::vector<Individual> merged = pop;
    merged.insert(merged.end(), evaluated.begin(), evaluated.end());
    assign_rank_and_crowding(merged);
    std::vector<int> order(merged.size());
    for (size_t i = 0; i < order.size(); ++i) order[static_cast<size_t>(i)] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return beats(merged, a, b); });

    std::vector<Individual> next;
    next.reserve(cfg.population);
    for (int i = 0; i < cfg.population; ++i) {
      next.push_back(merged[order[i]]);
    }
    pop = std::move(next);
    assign_rank_and_crowding(pop);
  }

  return archive;
}

}  // namespace modmpc::nsga
