#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "pearl/archive.hpp"
#include "pearl/density.hpp"
#include "pearl/pareto.hpp"
#include "pearl/types.hpp"

namespace pearl {

// ---------------------------------------------------------------------------
// Preference sampling

struct PreferenceSet {
  std::vector<double> alpha;
  std::vector<std::vector<double>> rays;
  int resample_period = 32;
};

// `count` independent Dirichlet(alpha) draws built from normalized Gamma
// variates.
template <class Rng>
std::vector<std::vector<double>> sample_preferences(std::span<const double> alpha, std::size_t count, Rng& rng) {
  if (alpha.empty()) throw UsageError("sample_preferences: empty concentration vector");
  for (double a : alpha)
    if (!(a > 0.0)) throw UsageError("sample_preferences: concentration components must be positive");
  std::vector<std::vector<double>> rays;
  rays.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> w(alpha.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      std::gamma_distribution<double> gamma(alpha[i], 1.0);
      w[i] = gamma(rng);
      sum += w[i];
    }
    if (sum <= 0.0) {
      // Every variate underflowed (tiny alpha); fall back to a random corner.
      std::uniform_int_distribution<std::size_t> pick(0, alpha.size() - 1);
      std::fill(w.begin(), w.end(), 0.0);
      w[pick(rng)] = 1.0;
    } else {
      for (double& e : w) e /= sum;
    }
    rays.push_back(std::move(w));
  }
  return rays;
}

template <class Rng>
std::vector<std::vector<double>> sample_preferences(const std::vector<double>& alpha, std::size_t count, Rng& rng) {
  return sample_preferences(std::span<const double>(alpha), count, rng);
}

// ---------------------------------------------------------------------------
// Envelope reward

enum class UniformityKind { cosine, kl };

struct UniformityConfig {
  UniformityKind kind = UniformityKind::cosine;
  double lambda = 1.0;
  bool normalized_obj = false;
};

// Componentwise running min/max of every objective vector seen so far.
class RunningBounds {
public:
  void update(const ObjectiveVector& v) {
    if (lo_.empty()) {
      lo_ = v;
      hi_ = v;
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      lo_[i] = std::min(lo_[i], v[i]);
      hi_[i] = std::max(hi_[i], v[i]);
    }
  }
  bool empty() const noexcept { return lo_.empty(); }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }

  // Min-max scaling into [0,1]; a degenerate range maps to 0.
  ObjectiveVector normalize(const ObjectiveVector& v) const {
    if (lo_.empty()) return v;
    ObjectiveVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double range = hi_[i] - lo_[i];
      out[i] = range > 0.0 ? (v[i] - lo_[i]) / range : 0.0;
    }
    return out;
  }

private:
  std::vector<double> lo_, hi_;
};

inline double cosine_similarity(std::span<const double> w, std::span<const double> r) {
  double dot = 0.0, nw = 0.0, nr = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    dot += w[i] * r[i];
    nw += w[i] * w[i];
    nr += r[i] * r[i];
  }
  if (nw == 0.0 || nr == 0.0) return 0.0;
  return dot / (std::sqrt(nw) * std::sqrt(nr));
}

// KL(p || uniform) of the weighted profile p_i = w_i r_i / sum_k w_k r_k.
// Mixed-sign profiles are taken in absolute value; a zero profile gives 0.
inline double weighted_profile_kl(std::span<const double> w, std::span<const double> r) {
  const std::size_t n = w.size();
  std::vector<double> p(n);
  double sum = 0.0;
  bool mixed = false;
  for (std::size_t i = 0; i < n; ++i) p[i] = w[i] * r[i];
  const bool any_pos = std::any_of(p.begin(), p.end(), [](double v) { return v > 0.0; });
  const bool any_neg = std::any_of(p.begin(), p.end(), [](double v) { return v < 0.0; });
  mixed = any_pos && any_neg;
  for (double& v : p) {
    if (mixed) v = std::abs(v);
    sum += v;
  }
  if (sum == 0.0) return 0.0;
  double kl = 0.0;
  for (double v : p) {
    const double q = v / sum;
    if (q > 0.0) kl += q * std::log(q * static_cast<double>(n));
  }
  return std::max(kl, 0.0);
}

// Uniformity term: cosine alignment, or the negated KL non-uniformity so that
// larger always means better aligned.
inline double uniformity(std::span<const double> w, std::span<const double> r, UniformityKind kind) {
  return kind == UniformityKind::cosine ? cosine_similarity(w, r) : -weighted_profile_kl(w, r);
}

// max over rays of w.r' + lambda * u(w, r'), where r' is r min-max scaled by
// `bounds` when normalized_obj is set.
inline double pearl_e_reward(const ObjectiveVector& r, const std::vector<std::vector<double>>& rays,
                             const UniformityConfig& cfg, const RunningBounds* bounds = nullptr) {
  if (rays.empty()) throw UsageError("pearl_e_reward: empty preference set");
  if (!all_finite(r)) throw UsageError("pearl_e_reward: non-finite objective vector");
  ObjectiveVector rp = r;
  if (cfg.normalized_obj) {
    if (bounds == nullptr || bounds->empty())
      throw UsageError("pearl_e_reward: normalized_obj requires running bounds");
    rp = bounds->normalize(r);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& w : rays) {
    if (w.size() != rp.size()) throw UsageError("pearl_e_reward: ray length mismatch");
    double val = std::inner_product(w.begin(), w.end(), rp.begin(), 0.0);
    if (cfg.lambda != 0.0) val += cfg.lambda * uniformity(w, rp, cfg.kind);
    best = std::max(best, val);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Rank rewards

struct RewardOutcome {
  double reward = 0.0;
  bool feasible = true;
  bool archived = false;
};

// Additive epsilon indicator I(a, b) in maximization sense: the smallest
// shift that makes a weakly dominate b.
inline double additive_epsilon_max(std::span<const double> a, std::span<const double> b) {
  double eps = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) eps = std::max(eps, b[i] - a[i]);
  return eps;
}

// IBEA-style fitness F(x) = sum_{y != x} -exp(-I(y, x) / nu) on normalized
// objectives, ranked descending (ties lexicographic on raw objectives).
struct EpsilonRanker {
  const RunningBounds* bounds = nullptr;
  double nu = 0.05;
  mutable std::vector<double> last_fitness;

  std::vector<std::size_t> operator()(const std::vector<Solution>& members) const {
    const std::size_t n = members.size();
    std::vector<ObjectiveVector> norm(n);
    for (std::size_t i = 0; i < n; ++i) norm[i] = bounds ? bounds->normalize(members[i].obj) : members[i].obj;
    last_fitness.assign(n, 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (y != x) last_fitness[x] += -std::exp(-additive_epsilon_max(norm[y], norm[x]) / nu);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (last_fitness[a] != last_fitness[b]) return last_fitness[a] > last_fitness[b];
      if (members[a].obj != members[b].obj) return members[a].obj < members[b].obj;
      return a < b;
    });
    return order;
  }
};

inline double kappa_reward(const ParetoArchive& archive) {
  return -static_cast<double>(archive.capacity());
}

// `bounds` accumulates the objective range of every accepted member.
inline RewardOutcome pearl_eps_reward(const Solution& s, ParetoArchive& archive, double nu, RunningBounds& bounds) {
  if (archive.capacity() == unbounded) throw UsageError("pearl_eps_reward: archive needs a finite capacity");
  if (archive.rejects(s)) return {kappa_reward(archive), s.feasible(), false};
  bounds.update(s.obj);
  const EpsilonRanker ranker{&bounds, nu, {}};
  const auto out = archive_insert(archive, s, ranker);
  return {-static_cast<double>(*out.rank), s.feasible(), *out.rank < archive.capacity()};
}

inline RewardOutcome pearl_nds_reward(const Solution& s, ParetoArchive& archive, const DensityRanker& ranker) {
  if (archive.capacity() == unbounded) throw UsageError("pearl_nds_reward: archive needs a finite capacity");
  const auto out = archive_insert(archive, s, ranker);
  if (out.dominated()) return {kappa_reward(archive), s.feasible(), false};
  return {-static_cast<double>(*out.rank), s.feasible(), *out.rank < archive.capacity()};
}

// ---------------------------------------------------------------------------
// Constraint handling

// Benchmark form (g <= 0 means satisfied): sum_i gamma_i * max(0, g_i)^2.
// Violations within the feasibility tolerance count as satisfied. Empty
// weights mean unit weights.
inline double constraint_violation(std::span<const double> g, std::span<const double> weights = {}) {
  if (!weights.empty() && weights.size() != g.size())
    throw UsageError("constraint_violation: weight count mismatch");
  double cv = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] <= feasibility_tolerance) continue;
    const double gamma = weights.empty() ? 1.0 : weights[i];
    cv += gamma * g[i] * g[i];
  }
  return cv;
}

// Threshold form: a value x_i above its limit c_i contributes
// gamma_i * ((x_i - c_i) / |c_i|)^2. A zero limit falls back to the absolute
// gap.
inline double constraint_violation(std::span<const double> values, std::span<const double> limits,
                                   std::span<const double> weights) {
  if (values.size() != limits.size() || (!weights.empty() && weights.size() != values.size()))
    throw UsageError("constraint_violation: length mismatch");
  double cv = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double gap = values[i] - limits[i];
    if (gap <= feasibility_tolerance * std::max(1.0, std::abs(limits[i]))) continue;
    const double scaled = limits[i] != 0.0 ? gap / std::abs(limits[i]) : gap;
    const double gamma = weights.empty() ? 1.0 : weights[i];
    cv += gamma * scaled * scaled;
  }
  return cv;
}

enum class ConstraintMode { distance_cl, rank2 };

struct ConstraintConfig {
  std::vector<double> limits;   // empty for benchmark constraints (g <= 0)
  std::vector<double> weights;  // empty means unit weights
  double bonus = -1.0;          // M; negative means "use kappa"
  ConstraintMode mode = ConstraintMode::distance_cl;

  double bonus_for(const ParetoArchive& archive) const {
    return bonus >= 0.0 ? bonus : static_cast<double>(archive.capacity());
  }
};

// Distance-CL reward for an infeasible solution: -cv - M.
inline double infeasible_reward(const Solution& s, double bonus) { return -s.cv - bonus; }

}  // namespace pearl
