#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "pearl/types.hpp"

namespace pearl {

// Ranking of a mutually non-dominated set, best member first.
struct DensityRank {
  std::vector<std::size_t> order;
  // Crowding distance for crowding_rank, perpendicular distance to the
  // associated reference direction for niching_rank.
  std::vector<double> scores;
  // Filled by niching_rank only.
  std::vector<std::size_t> niche_counts;
  std::vector<std::size_t> association;

  // position[i] = rank of member i
  std::vector<std::size_t> positions() const {
    std::vector<std::size_t> pos(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) pos[order[r]] = r;
    return pos;
  }
};

struct ReferenceDirectionSet {
  std::vector<std::vector<double>> directions;
  int divisions = 0;
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// Crowding distance of each member of a non-dominated front. Boundary members
// get +inf; ties within an objective are broken by the full lexicographic
// order so the result does not depend on input order.
inline std::vector<double> crowding_distances(std::span<const ObjectiveVector> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;
  const std::size_t nobj = front[0].size();
  std::vector<std::size_t> idx(n);
  for (std::size_t m = 0; m < nobj; ++m) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (front[a][m] != front[b][m]) return front[a][m] < front[b][m];
      return front[a] < front[b];
    });
    const double lo = front[idx.front()][m];
    const double hi = front[idx.back()][m];
    dist[idx.front()] = std::numeric_limits<double>::infinity();
    dist[idx.back()] = std::numeric_limits<double>::infinity();
    const double range = hi - lo;
    if (range <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < n; ++k)
      dist[idx[k]] += (front[idx[k + 1]][m] - front[idx[k - 1]][m]) / range;
  }
  return dist;
}

inline DensityRank crowding_rank(std::span<const ObjectiveVector> front) {
  if (front.empty()) throw UsageError("crowding_rank: empty front");
  DensityRank rank;
  rank.scores = crowding_distances(front);
  rank.order.resize(front.size());
  std::iota(rank.order.begin(), rank.order.end(), std::size_t{0});
  std::sort(rank.order.begin(), rank.order.end(), [&](std::size_t a, std::size_t b) {
    if (rank.scores[a] != rank.scores[b]) return rank.scores[a] > rank.scores[b];
    if (front[a] != front[b]) return front[a] < front[b];
    return a < b;
  });
  return rank;
}

inline DensityRank crowding_rank(const std::vector<ObjectiveVector>& front) {
  return crowding_rank(std::span<const ObjectiveVector>(front));
}

// Das-Dennis lattice: every vector (k_1/p, ..., k_F/p) with nonnegative
// integers k_i summing to p.
inline ReferenceDirectionSet das_dennis(int nobj, int divisions) {
  if (nobj < 2 || divisions < 1) throw UsageError("das_dennis: need F >= 2 and p >= 1");
  ReferenceDirectionSet set;
  set.divisions = divisions;
  std::vector<int> k(nobj, 0);
  // Recursive enumeration over the first F-1 coordinates; last one is implied.
  auto rec = [&](auto&& self, int dim, int left) -> void {
    if (dim == nobj - 1) {
      k[dim] = left;
      std::vector<double> d(nobj);
      for (int i = 0; i < nobj; ++i) d[i] = static_cast<double>(k[i]) / divisions;
      set.directions.push_back(std::move(d));
      return;
    }
    for (int v = left; v >= 0; --v) {
      k[dim] = v;
      self(self, dim + 1, left - v);
    }
  };
  rec(rec, 0, divisions);
  return set;
}

// Smallest p whose lattice has at least `capacity` directions.
inline int default_divisions(int nobj, std::size_t capacity) {
  if (capacity == unbounded) throw UsageError("default_divisions: capacity must be finite");
  int p = 1;
  while (binomial(nobj + p - 1, p) < static_cast<double>(capacity)) ++p;
  return p;
}

// Perpendicular distance from `point` to the line spanned by `dir`.
inline double perpendicular_distance(const std::vector<double>& point, const std::vector<double>& dir) {
  double dd = 0.0, pd = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    dd += dir[i] * dir[i];
    pd += point[i] * dir[i];
  }
  double sq = 0.0;
  const double t = dd > 0.0 ? pd / dd : 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    const double e = point[i] - t * dir[i];
    sq += e * e;
  }
  return std::sqrt(sq);
}

// Maps maximization-sense objectives into [0,1]^F with 0 at the front's best
// value, matching the minimization orientation reference directions assume.
// A constant objective maps to 0.
inline std::vector<std::vector<double>> normalize_to_ideal(std::span<const ObjectiveVector> front) {
  const std::size_t n = front.size();
  const std::size_t nobj = front[0].size();
  std::vector<double> best(nobj, -std::numeric_limits<double>::infinity());
  std::vector<double> worst(nobj, std::numeric_limits<double>::infinity());
  for (const auto& p : front)
    for (std::size_t m = 0; m < nobj; ++m) {
      best[m] = std::max(best[m], p[m]);
      worst[m] = std::min(worst[m], p[m]);
    }
  std::vector<std::vector<double>> out(n, std::vector<double>(nobj, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < nobj; ++m) {
      const double range = best[m] - worst[m];
      out[i][m] = range > 0.0 ? (best[m] - front[i][m]) / range : 0.0;
    }
  return out;
}

inline DensityRank niching_rank(std::span<const ObjectiveVector> front, const ReferenceDirectionSet& dirs) {
  if (front.empty()) throw UsageError("niching_rank: empty front");
  if (dirs.directions.empty()) throw UsageError("niching_rank: no reference directions");
  const std::size_t n = front.size();
  const auto norm = normalize_to_ideal(front);

  DensityRank rank;
  rank.scores.assign(n, 0.0);
  rank.association.assign(n, 0);
  rank.niche_counts.assign(dirs.directions.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < dirs.directions.size(); ++d) {
      const double dist = perpendicular_distance(norm[i], dirs.directions[d]);
      if (dist < best) {
        best = dist;
        rank.association[i] = d;
      }
    }
    rank.scores[i] = best;
    ++rank.niche_counts[rank.association[i]];
  }

  rank.order.resize(n);
  std::iota(rank.order.begin(), rank.order.end(), std::size_t{0});
  std::sort(rank.order.begin(), rank.order.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = rank.niche_counts[rank.association[a]];
    const auto cb = rank.niche_counts[rank.association[b]];
    if (ca != cb) return ca < cb;
    if (rank.scores[a] != rank.scores[b]) return rank.scores[a] < rank.scores[b];
    if (front[a] != front[b]) return front[a] < front[b];
    return a < b;
  });
  return rank;
}

inline DensityRank niching_rank(const std::vector<ObjectiveVector>& front, const ReferenceDirectionSet& dirs) {
  return niching_rank(std::span<const ObjectiveVector>(front), dirs);
}

}  // namespace pearl
