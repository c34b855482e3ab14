#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pearl/archive.hpp"
#include "pearl/rewards.hpp"

namespace pearl {

// C-PEARL. distance_cl: feasible solutions go through `inner` (whose archive
// only ever sees feasible members), infeasible ones get -cv - M and leave the
// archive untouched. rank2: the archive uses constrained dominance and the
// reward is the density rank (or -kappa when dominated).
template <class Inner>
RewardOutcome c_pearl_reward(const Solution& s, ParetoArchive& archive, Inner&& inner, const ConstraintConfig& ccfg,
                             const DensityRanker& rank2_ranker = DensityRanker::crowding()) {
  if (ccfg.mode == ConstraintMode::rank2) {
    if (archive.dominance() != DominanceKind::constrained)
      throw UsageError("c_pearl_reward: rank2 mode needs a constrained-dominance archive");
    return pearl_nds_reward(s, archive, rank2_ranker);
  }
  if (!s.feasible()) return {infeasible_reward(s, ccfg.bonus_for(archive)), false, false};
  RewardOutcome out = inner(s, archive);
  out.feasible = true;
  return out;
}

enum class Variant { envelope, epsilon, nds };

struct RewardConfig {
  Variant variant = Variant::nds;
  std::size_t kappa = 64;

  // envelope
  std::vector<double> alpha;  // empty means all ones
  std::size_t n_rays = 1;
  UniformityConfig uniformity;

  // epsilon
  double nu = 0.05;

  // nds
  DensityKind ranker = DensityKind::crowding;
  int divisions = 0;  // 0 picks the smallest lattice with >= kappa directions

  // constraints
  bool constrained = false;
  ConstraintConfig constraint;
};

inline std::string variant_name(const RewardConfig& cfg) {
  std::string base = cfg.variant == Variant::envelope  ? "pearl-e"
                     : cfg.variant == Variant::epsilon ? "pearl-eps"
                                                       : "pearl-nds";
  if (cfg.variant == Variant::nds) {
    base += cfg.ranker == DensityKind::crowding ? "-crowding" : "-niching";
    if (cfg.constrained && cfg.constraint.mode == ConstraintMode::rank2) base += "2";
  }
  if (cfg.constrained && cfg.constraint.mode == ConstraintMode::distance_cl) base = "c-" + base + "-cl";
  return base;
}

// Per-worker reward state: archive, running bounds and the configured
// reward rule. Not shared between workers.
class RewardEngine {
public:
  RewardEngine(const RewardConfig& cfg, int nobj) : cfg_(cfg), archive_(make_archive(cfg)) {
    if (cfg.variant != Variant::nds && cfg.constrained && cfg.constraint.mode == ConstraintMode::rank2)
      throw UsageError("rank2 constraint handling is only defined for the nds variant");
    if (cfg.kappa == 0) throw UsageError("kappa must be positive");
    if (cfg.variant == Variant::nds) {
      ranker_.kind = cfg.ranker;
      if (cfg.ranker == DensityKind::niching) {
        const int p = cfg.divisions > 0 ? cfg.divisions : default_divisions(nobj, cfg.kappa);
        ranker_.dirs = das_dennis(nobj, p);
      }
    }
  }

  const RewardConfig& config() const noexcept { return cfg_; }
  const ParetoArchive& archive() const noexcept { return archive_; }

  // Factor applied before policy updates: rank rewards are divided by kappa.
  double reward_scale() const noexcept {
    return cfg_.variant == Variant::envelope ? 1.0 : 1.0 / static_cast<double>(cfg_.kappa);
  }

  // Reward assigned to a failed evaluation.
  double failure_reward() const noexcept { return -static_cast<double>(cfg_.kappa); }

  RewardOutcome operator()(const Solution& s, const std::vector<std::vector<double>>& rays) {
    auto inner = [&](const Solution& sol, ParetoArchive& arch) { return unconstrained(sol, arch, rays); };
    if (cfg_.constrained) return c_pearl_reward(s, archive_, inner, cfg_.constraint, ranker_);
    return inner(s, archive_);
  }

private:
  static ParetoArchive make_archive(const RewardConfig& cfg) {
    const bool rank2 = cfg.constrained && cfg.constraint.mode == ConstraintMode::rank2;
    const std::size_t cap = cfg.variant == Variant::envelope ? unbounded : cfg.kappa;
    return ParetoArchive(cap, rank2 ? DominanceKind::constrained : DominanceKind::plain);
  }

  RewardOutcome unconstrained(const Solution& s, ParetoArchive& arch, const std::vector<std::vector<double>>& rays) {
    switch (cfg_.variant) {
      case Variant::envelope: {
        if (cfg_.uniformity.normalized_obj) bounds_.update(s.obj);
        RewardOutcome out;
        out.reward = pearl_e_reward(s.obj, rays, cfg_.uniformity, &bounds_);
        out.feasible = s.feasible();
        out.archived = archive_add(arch, s);
        return out;
      }
      case Variant::epsilon:
        return pearl_eps_reward(s, arch, cfg_.nu, bounds_);
      case Variant::nds:
        return pearl_nds_reward(s, arch, ranker_);
    }
    return {};
  }

  RewardConfig cfg_;
  ParetoArchive archive_;
  DensityRanker ranker_;
  RunningBounds bounds_;
};

}  // namespace pearl
