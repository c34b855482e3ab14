#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "pearl/density.hpp"
#include "pearl/pareto.hpp"
#include "pearl/problems.hpp"
#include "pearl/rewards.hpp"
#include "pearl/trainer.hpp"

namespace pearl {

struct GAConfig {
  std::size_t lambda_ = 32;  // offspring per generation
  std::size_t mu = 32;       // population kept
  double mutpb = 0.3;
  double cxpb = 0.65;
  double blend_alpha = 0.5;
  double mutation_sigma = 0.1;  // fraction of the box width
  double indpb = 0.0;           // per-gene mutation probability; 0 means 1/n_x
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  bool constrained = false;  // NSGA-III only
  int divisions = 0;         // NSGA-III lattice; 0 picks the smallest with >= mu directions
  std::vector<double> constraint_weights;

  void validate() const {
    if (mutpb < 0.0 || mutpb > 1.0 || cxpb < 0.0 || cxpb > 1.0)
      throw UsageError("GAConfig: mutpb and cxpb must lie in [0, 1]");
    if (cxpb + mutpb > 1.0 + 1e-12) throw UsageError("GAConfig: cxpb + mutpb must not exceed 1");
    if (mu == 0 || lambda_ == 0) throw UsageError("GAConfig: mu and lambda_ must be positive");
    if (mu > lambda_) throw UsageError("GAConfig: mu must not exceed lambda_");
    if (budget < mu) throw UsageError("GAConfig: budget is smaller than the initial population");
  }
};

struct Population {
  std::vector<Solution> members;
  std::size_t generation = 0;
};

// Evaluates x and wraps it as a maximization-sense Solution.
inline Solution evaluate_solution(const ProblemSpec& problem, const std::vector<double>& x,
                                  const std::vector<double>& weights, std::size_t index = 0) {
  return make_solution(evaluate(problem, x, index), weights);
}

// Either a blend crossover (first child), a Gaussian mutation or a plain copy
// of random parents, one choice per offspring. Results are clamped to the box.
template <class Rng>
std::vector<std::vector<double>> es_variation(const Population& pop, const GAConfig& cfg, const ProblemSpec& problem,
                                              Rng& rng) {
  const std::size_t n = pop.members.size();
  if (n == 0) throw UsageError("es_variation: empty population");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double indpb = cfg.indpb > 0.0 ? cfg.indpb : 1.0 / problem.n_x;

  std::vector<std::vector<double>> kids;
  kids.reserve(cfg.lambda_);
  for (std::size_t k = 0; k < cfg.lambda_; ++k) {
    const double r = unit(rng);
    std::vector<double> child;
    if (r < cfg.cxpb && n >= 2) {
      const std::size_t a = pick(rng);
      std::size_t b = pick(rng);
      while (b == a) b = pick(rng);
      const auto& xa = pop.members[a].x;
      const auto& xb = pop.members[b].x;
      child.resize(xa.size());
      for (std::size_t d = 0; d < xa.size(); ++d) {
        const double gamma = (1.0 + 2.0 * cfg.blend_alpha) * unit(rng) - cfg.blend_alpha;
        child[d] = (1.0 - gamma) * xa[d] + gamma * xb[d];
      }
    } else if (r < cfg.cxpb + cfg.mutpb) {
      child = pop.members[pick(rng)].x;
      for (std::size_t d = 0; d < child.size(); ++d)
        if (unit(rng) < indpb) child[d] += cfg.mutation_sigma * (problem.upper[d] - problem.lower[d]) * normal(rng);
    } else {
      child = pop.members[pick(rng)].x;
    }
    for (std::size_t d = 0; d < child.size(); ++d) child[d] = std::clamp(child[d], problem.lower[d], problem.upper[d]);
    kids.push_back(std::move(child));
  }
  return kids;
}

// NSGA-III niche-preserving choice of `count` members from `last`, given the
// members already accepted. Objectives are minimization sense; normalization
// translates by the ideal point of accepted+last and divides by its range.
template <class Rng>
std::vector<std::size_t> niching_select(const std::vector<ObjectiveVector>& objs,
                                        const std::vector<std::size_t>& accepted,
                                        const std::vector<std::size_t>& last, std::size_t count,
                                        const ReferenceDirectionSet& dirs, Rng& rng) {
  if (count > last.size()) throw UsageError("niching_select: count exceeds the last front");
  if (count == 0) return {};
  std::vector<std::size_t> all(accepted);
  all.insert(all.end(), last.begin(), last.end());
  const std::size_t nobj = objs[all.front()].size();
  std::vector<double> ideal(nobj, std::numeric_limits<double>::infinity());
  std::vector<double> worst(nobj, -std::numeric_limits<double>::infinity());
  for (std::size_t i : all)
    for (std::size_t m = 0; m < nobj; ++m) {
      ideal[m] = std::min(ideal[m], objs[i][m]);
      worst[m] = std::max(worst[m], objs[i][m]);
    }
  auto normalized = [&](std::size_t i) {
    std::vector<double> v(nobj);
    for (std::size_t m = 0; m < nobj; ++m) {
      const double range = worst[m] - ideal[m];
      v[m] = range > 0.0 ? (objs[i][m] - ideal[m]) / range : 0.0;
    }
    return v;
  };
  auto associate = [&](std::size_t i, double& dist) {
    const auto v = normalized(i);
    std::size_t best = 0;
    dist = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < dirs.directions.size(); ++d) {
      const double pd = perpendicular_distance(v, dirs.directions[d]);
      if (pd < dist) {
        dist = pd;
        best = d;
      }
    }
    return best;
  };

  std::vector<std::size_t> niche(dirs.directions.size(), 0);
  for (std::size_t i : accepted) {
    double dist;
    ++niche[associate(i, dist)];
  }
  struct Candidate {
    std::size_t index, niche;
    double dist;
  };
  std::vector<Candidate> pool;
  for (std::size_t i : last) {
    double dist;
    const std::size_t d = associate(i, dist);
    pool.push_back({i, d, dist});
  }

  std::vector<bool> excluded(dirs.directions.size(), false);
  std::vector<std::size_t> chosen;
  while (chosen.size() < count) {
    // Least crowded niche that still has candidates; ties broken at random.
    std::size_t best_count = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> ties;
    for (std::size_t d = 0; d < niche.size(); ++d) {
      if (excluded[d]) continue;
      const bool has = std::any_of(pool.begin(), pool.end(), [&](const Candidate& c) { return c.niche == d; });
      if (!has) {
        excluded[d] = true;
        continue;
      }
      if (niche[d] < best_count) {
        best_count = niche[d];
        ties.assign(1, d);
      } else if (niche[d] == best_count) {
        ties.push_back(d);
      }
    }
    const std::size_t d = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
    std::vector<std::size_t> members;
    for (std::size_t c = 0; c < pool.size(); ++c)
      if (pool[c].niche == d) members.push_back(c);
    std::size_t take;
    if (niche[d] == 0) {
      take = *std::min_element(members.begin(), members.end(),
                               [&](std::size_t a, std::size_t b) { return pool[a].dist < pool[b].dist; });
    } else {
      take = members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)];
    }
    chosen.push_back(pool[take].index);
    ++niche[d];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return chosen;
}

namespace detail {

// Fills survivors front by front; the front that overflows is cut by
// `cut(accepted, last, count)`.
template <class Relation, class Cut>
Population environmental_selection(std::vector<Solution> pool, std::size_t keep, Relation dom, Cut cut,
                                   std::size_t generation) {
  const auto fronts = non_dominated_sort(pool, dom);
  std::vector<std::size_t> accepted;
  for (const auto& f : fronts) {
    if (accepted.size() + f.size() <= keep) {
      accepted.insert(accepted.end(), f.begin(), f.end());
      if (accepted.size() == keep) break;
      continue;
    }
    const auto extra = cut(accepted, f, keep - accepted.size());
    accepted.insert(accepted.end(), extra.begin(), extra.end());
    break;
  }
  Population next;
  next.generation = generation;
  for (std::size_t i : accepted) next.members.push_back(std::move(pool[i]));
  return next;
}

inline std::vector<Solution> merged(const Population& pop, std::vector<Solution> offspring) {
  std::vector<Solution> pool = pop.members;
  std::move(offspring.begin(), offspring.end(), std::back_inserter(pool));
  return pool;
}

}  // namespace detail

// Survivor selection from parents+offspring: non-dominated sort, then
// crowding distance on the overflowing front.
inline Population nsga2_select(const Population& pop, std::vector<Solution> offspring, std::size_t keep) {
  auto pool = detail::merged(pop, std::move(offspring));
  auto cut = [&](const std::vector<std::size_t>&, const std::vector<std::size_t>& last, std::size_t count) {
    std::vector<ObjectiveVector> objs;
    for (std::size_t i : last) objs.push_back(pool[i].obj);
    const auto order = crowding_rank(objs).order;
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < count; ++r) out.push_back(last[order[r]]);
    return out;
  };
  return detail::environmental_selection(pool, keep, PlainDominance{}, cut, pop.generation + 1);
}

template <class Rng>
Population nsga3_select(const Population& pop, std::vector<Solution> offspring, std::size_t keep,
                        const ReferenceDirectionSet& dirs, bool constrained, Rng& rng) {
  auto pool = detail::merged(pop, std::move(offspring));
  std::vector<ObjectiveVector> objs;
  for (const auto& s : pool) objs.push_back(negated(s.obj));
  auto cut = [&](const std::vector<std::size_t>& accepted, const std::vector<std::size_t>& last, std::size_t count) {
    return niching_select(objs, accepted, last, count, dirs, rng);
  };
  if (constrained) return detail::environmental_selection(pool, keep, ConstrainedDominance{}, cut, pop.generation + 1);
  return detail::environmental_selection(pool, keep, PlainDominance{}, cut, pop.generation + 1);
}

template <class Rng>
std::vector<Solution> make_offspring(const Population& pop, const GAConfig& cfg, const ProblemSpec& problem,
                                     Rng& rng) {
  std::vector<Solution> kids;
  for (auto& x : es_variation(pop, cfg, problem, rng))
    kids.push_back(evaluate_solution(problem, x, cfg.constraint_weights));
  return kids;
}

template <class Rng>
Population nsga2_step(const Population& pop, const GAConfig& cfg, const ProblemSpec& problem, Rng& rng) {
  return nsga2_select(pop, make_offspring(pop, cfg, problem, rng), pop.members.size());
}

template <class Rng>
Population nsga3_step(const Population& pop, const GAConfig& cfg, const ProblemSpec& problem,
                      const ReferenceDirectionSet& dirs, bool constrained, Rng& rng) {
  return nsga3_select(pop, make_offspring(pop, cfg, problem, rng), pop.members.size(), dirs, constrained, rng);
}

enum class GAKind { nsga2, nsga3 };

// Generational loop until the evaluation budget is spent. The reported front
// is the non-dominated set of every feasible evaluation made, not just the
// final population.
inline RunResult run_ga(const ProblemSpec& problem, const GAConfig& cfg, GAKind kind) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 101);
  const ReferenceDirectionSet dirs =
      kind == GAKind::nsga3
          ? das_dennis(problem.nobj, cfg.divisions > 0 ? cfg.divisions : default_divisions(problem.nobj, cfg.mu))
          : ReferenceDirectionSet{};

  RunResult result;
  auto log = [&](const Solution& s, std::size_t generation) {
    EvaluationRow row;
    row.step = result.log.size();
    row.worker = static_cast<int>(generation);
    row.x = s.x;
    row.f = negated(s.obj);
    row.g = s.g;
    row.cv = s.cv;
    result.log.push_back(std::move(row));
  };

  Population pop;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < cfg.mu; ++i) {
    std::vector<double> x(problem.n_x);
    for (int d = 0; d < problem.n_x; ++d) x[d] = problem.lower[d] + (problem.upper[d] - problem.lower[d]) * unit(rng);
    pop.members.push_back(evaluate_solution(problem, x, cfg.constraint_weights));
    log(pop.members.back(), 0);
  }

  const std::size_t generations = (cfg.budget - cfg.mu) / cfg.lambda_;
  for (std::size_t gen = 0; gen < generations; ++gen) {
    auto kids = make_offspring(pop, cfg, problem, rng);
    for (const auto& k : kids) log(k, gen + 1);
    pop = kind == GAKind::nsga2 ? nsga2_select(pop, std::move(kids), cfg.mu)
                                : nsga3_select(pop, std::move(kids), cfg.mu, dirs, cfg.constrained, rng);
  }
  result.rounds = generations;
  result.evaluations = result.log.size();
  result.front = front_of_log(result.log);
  return result;
}

}  // namespace pearl
