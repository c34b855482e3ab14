#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "pearl/pareto.hpp"
#include "pearl/types.hpp"

// Quality indicators. Everything here is minimization sense.
namespace pearl {

namespace detail {

// Area dominated by 2D points (all strictly better than ref).
inline double hv2d(std::vector<std::pair<double, double>> pts, double r1, double r2) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0, floor = r2;
  for (const auto& [a, b] : pts) {
    if (b < floor) {
      area += (r1 - a) * (floor - b);
      floor = b;
    }
  }
  return area;
}

}  // namespace detail

// Exact hypervolume for two or three objectives. Points that do not strictly
// dominate `ref` contribute nothing.
inline double hypervolume(const std::vector<ObjectiveVector>& front, const ObjectiveVector& ref) {
  const std::size_t nobj = ref.size();
  if (nobj < 2 || nobj > 3) throw UsageError("hypervolume: only 2 or 3 objectives are supported");
  std::vector<ObjectiveVector> pts;
  for (const auto& p : front) {
    if (p.size() != nobj) throw UsageError("hypervolume: point dimension does not match the reference point");
    bool inside = true;
    for (std::size_t m = 0; m < nobj; ++m) inside = inside && p[m] < ref[m];
    if (inside) pts.push_back(p);
  }
  if (pts.empty()) return 0.0;
  if (nobj == 2) {
    std::vector<std::pair<double, double>> p2;
    for (const auto& p : pts) p2.emplace_back(p[0], p[1]);
    return detail::hv2d(std::move(p2), ref[0], ref[1]);
  }
  // Slice along f3: between consecutive f3 levels the cross-section is the 2D
  // union of every point at or below the slab.
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  double vol = 0.0;
  std::vector<std::pair<double, double>> active;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    active.emplace_back(pts[i][0], pts[i][1]);
    const double top = i + 1 < pts.size() ? pts[i + 1][2] : ref[2];
    const double height = top - pts[i][2];
    if (height > 0.0) vol += height * detail::hv2d(active, ref[0], ref[1]);
  }
  return vol;
}

inline double euclidean(const ObjectiveVector& a, const ObjectiveVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Mean distance from each point of `from` to its nearest point of `to`.
inline double mean_nearest_distance(const std::vector<ObjectiveVector>& from, const std::vector<ObjectiveVector>& to) {
  if (from.empty() || to.empty()) throw UsageError("distance indicator: both sets must be non-empty");
  double total = 0.0;
  for (const auto& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : to) best = std::min(best, euclidean(a, z));
    total += best;
  }
  return total / static_cast<double>(from.size());
}

inline double gd(const std::vector<ObjectiveVector>& front, const std::vector<ObjectiveVector>& reference) {
  return mean_nearest_distance(front, reference);
}

inline double igd(const std::vector<ObjectiveVector>& front, const std::vector<ObjectiveVector>& reference) {
  return mean_nearest_distance(reference, front);
}

// max over z of min over a of max_i (a_i - z_i)
inline double additive_epsilon(const std::vector<ObjectiveVector>& front, const std::vector<ObjectiveVector>& reference) {
  if (front.empty() || reference.empty()) throw UsageError("additive_epsilon: both sets must be non-empty");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& z : reference) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : front) {
      double shift = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < z.size(); ++i) shift = std::max(shift, a[i] - z[i]);
      best = std::min(best, shift);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

struct Cardinality {
  std::size_t i_c = 0;
  double c_metric = 0.0;
};

inline bool same_vector(const ObjectiveVector& a, const ObjectiveVector& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

// Combined reference Z = non-dominated union of all fronts. For each
// algorithm, i_c counts its distinct non-dominated points that are members of
// Z and c_metric is that count over its non-dominated size.
inline std::map<std::string, Cardinality> cardinality_metrics(
    const std::map<std::string, std::vector<ObjectiveVector>>& fronts, double tol = 1e-9) {
  if (fronts.empty()) throw UsageError("cardinality_metrics: no algorithms");
  std::vector<ObjectiveVector> all;
  for (const auto& [name, f] : fronts) all.insert(all.end(), f.begin(), f.end());
  const auto z = nondominated_min(std::move(all));
  std::map<std::string, Cardinality> out;
  for (const auto& [name, f] : fronts) {
    const auto own = nondominated_min(f);
    Cardinality c;
    for (const auto& a : own)
      if (std::any_of(z.begin(), z.end(), [&](const ObjectiveVector& p) { return same_vector(a, p, tol); })) ++c.i_c;
    c.c_metric = own.empty() ? 0.0 : static_cast<double>(c.i_c) / static_cast<double>(own.size());
    out[name] = c;
  }
  return out;
}

struct EntropySelection {
  std::vector<std::size_t> indices;  // into the input front, best first
  std::vector<double> weights;
  std::vector<double> entropies;
};

// Entropy-weight method. Works on the distinct objective vectors of `front`
// (first occurrence kept), so at most that many are returned. Columns with
// negative entries are shifted by their minimum before forming proportions;
// a column summing to zero has entropy 1. If every weight is zero the weights
// become uniform. Scores are the weighted min-max normalized objectives; the
// k lowest win, ties broken lexicographically.
inline EntropySelection entropy_select(const std::vector<ObjectiveVector>& front, std::size_t k) {
  if (k < 1 || front.size() < k) throw UsageError("entropy_select: need 1 <= k <= front size");
  std::vector<std::size_t> distinct;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](std::size_t j) { return front[j] == front[i]; });
    if (!seen) distinct.push_back(i);
  }
  const std::size_t m = distinct.size();
  const std::size_t nobj = front[0].size();

  EntropySelection sel;
  sel.entropies.assign(nobj, 1.0);
  sel.weights.assign(nobj, 0.0);
  std::vector<double> lo(nobj), hi(nobj);
  for (std::size_t j = 0; j < nobj; ++j) {
    lo[j] = hi[j] = front[distinct[0]][j];
    for (std::size_t i : distinct) {
      lo[j] = std::min(lo[j], front[i][j]);
      hi[j] = std::max(hi[j], front[i][j]);
    }
    if (m < 2) continue;
    const double shift = lo[j] < 0.0 ? -lo[j] : 0.0;
    double sum = 0.0;
    for (std::size_t i : distinct) sum += front[i][j] + shift;
    if (sum <= 0.0) continue;
    double h = 0.0;
    for (std::size_t i : distinct) {
      const double p = (front[i][j] + shift) / sum;
      if (p > 0.0) h -= p * std::log(p);
    }
    sel.entropies[j] = h / std::log(static_cast<double>(m));
  }
  double wsum = 0.0;
  for (std::size_t j = 0; j < nobj; ++j) {
    sel.weights[j] = std::max(0.0, 1.0 - sel.entropies[j]);
    wsum += sel.weights[j];
  }
  for (double& w : sel.weights) w = wsum > 0.0 ? w / wsum : 1.0 / static_cast<double>(nobj);

  std::vector<double> score(front.size(), 0.0);
  for (std::size_t i : distinct)
    for (std::size_t j = 0; j < nobj; ++j) {
      const double range = hi[j] - lo[j];
      score[i] += sel.weights[j] * (range > 0.0 ? (front[i][j] - lo[j]) / range : 0.0);
    }
  std::sort(distinct.begin(), distinct.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    return front[a] < front[b];
  });
  distinct.resize(std::min(k, m));
  sel.indices = std::move(distinct);
  return sel;
}

struct MetricReport {
  std::string run_id, algorithm, problem;
  double hv = 0.0, gd = 0.0, igd = 0.0, eps_plus = 0.0;
  std::size_t i_c = 0;
  double c_metric = 0.0;
};

inline const char* metric_csv_header() { return "run_id,algorithm,problem,hv,gd,igd,eps,i_c,c_metric"; }

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_metric_row(std::ostream& os, const MetricReport& r) {
  os << r.run_id << ',' << r.algorithm << ',' << r.problem << ',' << format_double(r.hv) << ','
     << format_double(r.gd) << ',' << format_double(r.igd) << ',' << format_double(r.eps_plus) << ',' << r.i_c << ','
     << format_double(r.c_metric) << '\n';
}

}  // namespace pearl
