#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "pearl/types.hpp"

namespace pearl {

// a >= b componentwise with at least one strict improvement (maximization).
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) throw UsageError("dominates: objective vectors differ in length");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

// Same relation for minimization-sense vectors (used by the metric layer).
inline bool dominates_min(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) throw UsageError("dominates_min: objective vectors differ in length");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

// Feasible beats infeasible; two infeasible compare by violation; two
// feasible compare by plain dominance.
inline bool constrained_dominates(const Solution& a, const Solution& b) {
  const bool fa = a.feasible();
  const bool fb = b.feasible();
  if (fa && !fb) return true;
  if (!fa && fb) return false;
  if (!fa && !fb) return a.cv < b.cv;
  return dominates(a.obj, b.obj);
}

struct PlainDominance {
  bool operator()(const Solution& a, const Solution& b) const { return dominates(a.obj, b.obj); }
  bool operator()(const ObjectiveVector& a, const ObjectiveVector& b) const { return dominates(a, b); }
};

struct ConstrainedDominance {
  bool operator()(const Solution& a, const Solution& b) const { return constrained_dominates(a, b); }
};

struct MinDominance {
  bool operator()(const ObjectiveVector& a, const ObjectiveVector& b) const {
    return dominates_min(a, b);
  }
};

// Fast non-dominated sorting. Returns fronts of indices into `pop`; front 0 is
// the non-dominated set and every index appears in exactly one front.
template <class T, class Relation>
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const T> pop, Relation dom) {
  if (pop.empty()) throw UsageError("non_dominated_sort: empty population");
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> counts(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dom(pop[p], pop[q])) {
        dominated_by[p].push_back(q);
        ++counts[q];
      } else if (dom(pop[q], pop[p])) {
        dominated_by[q].push_back(p);
        ++counts[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    if (counts[p] == 0) fronts[0].push_back(p);

  while (true) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts.back()) {
      for (std::size_t q : dominated_by[p])
        if (--counts[q] == 0) next.push_back(q);
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  return fronts;
}

template <class T, class Relation>
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<T>& pop, Relation dom) {
  return non_dominated_sort(std::span<const T>(pop), dom);
}

// Indices of the non-dominated members, in input order. Empty input gives an
// empty result.
template <class T, class Relation>
std::vector<std::size_t> non_dominated_indices(std::span<const T> pop, Relation dom) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pop.size() && !dominated; ++j)
      dominated = (j != i) && dom(pop[j], pop[i]);
    if (!dominated) out.push_back(i);
  }
  return out;
}

// Non-dominated subset of minimization-sense points with exact duplicates
// collapsed. Sort-based; much faster than the pairwise filter for large sets.
inline std::vector<ObjectiveVector> nondominated_min(std::vector<ObjectiveVector> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // Lexicographic order guarantees a point can only be dominated by an
  // earlier one.
  std::vector<ObjectiveVector> kept;
  for (auto& p : pts) {
    bool dominated = false;
    for (const auto& k : kept)
      if (dominates_min(k, p)) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(std::move(p));
  }
  return kept;
}

}  // namespace pearl
