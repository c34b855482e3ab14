#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pearl/reward_engine.hpp"
#include "pearl/rewards.hpp"

using namespace pearl;

namespace {

Solution sol(ObjectiveVector obj, double cv = 0.0) {
  Solution s;
  s.obj = std::move(obj);
  s.cv = cv;
  return s;
}

ObjectiveVector random_point(std::mt19937_64& rng, int nobj) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ObjectiveVector p(nobj);
  for (auto& v : p) v = u(rng);
  return p;
}

}  // namespace

TEST(SamplePreferences, UniformDirichletMeanIsCenter) {
  std::mt19937_64 rng(1);
  const auto rays = sample_preferences(std::vector<double>{1, 1, 1}, 10000, rng);
  std::vector<double> mean(3, 0.0);
  for (const auto& r : rays) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(r[i], 0.0);
      mean[i] += r[i] / rays.size();
      s += r[i];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  for (double m : mean) EXPECT_NEAR(m, 1.0 / 3.0, 0.02);
}

TEST(SamplePreferences, ConcentratedAlphaHasSmallerVariance) {
  std::mt19937_64 rng(2);
  auto variance = [&](std::vector<double> alpha) {
    const auto rays = sample_preferences(alpha, 20000, rng);
    double m = 0.0, v = 0.0;
    for (const auto& r : rays) m += r[0] / rays.size();
    for (const auto& r : rays) v += (r[0] - m) * (r[0] - m) / rays.size();
    return v;
  };
  const double v1 = variance({1, 1, 1});
  const double v10 = variance({10, 10, 10});
  EXPECT_LT(v10, v1);
  // alpha_i (alpha_0 - alpha_i) / (alpha_0^2 (alpha_0 + 1))
  EXPECT_NEAR(v1, 1.0 * 2.0 / (9.0 * 4.0), 0.004);
  EXPECT_NEAR(v10, 10.0 * 20.0 / (900.0 * 31.0), 0.001);
}

TEST(SamplePreferences, ZeroCountIsEmpty) {
  std::mt19937_64 rng(3);
  EXPECT_TRUE(sample_preferences(std::vector<double>{1, 1}, 0, rng).empty());
}

TEST(SamplePreferences, NonPositiveAlphaThrows) {
  std::mt19937_64 rng(3);
  EXPECT_THROW(sample_preferences(std::vector<double>{1, 0}, 1, rng), UsageError);
}

TEST(EnvelopeReward, LinearScalarization) {
  UniformityConfig cfg{UniformityKind::cosine, 0.0, false};
  EXPECT_DOUBLE_EQ(pearl_e_reward({2, 4}, {{0.5, 0.5}}, cfg), 3.0);
}

TEST(EnvelopeReward, KlUniformProfileHasNoPenalty) {
  UniformityConfig cfg{UniformityKind::kl, 1.0, false};
  EXPECT_DOUBLE_EQ(pearl_e_reward({1, 1}, {{0.5, 0.5}}, cfg), 1.0);
}

TEST(EnvelopeReward, CosineParallelVectors) {
  UniformityConfig cfg{UniformityKind::cosine, 1.0, false};
  EXPECT_DOUBLE_EQ(pearl_e_reward({1, 0}, {{1, 0}}, cfg), 2.0);
}

TEST(EnvelopeReward, MaxOverRays) {
  UniformityConfig cfg{UniformityKind::cosine, 0.0, false};
  EXPECT_DOUBLE_EQ(pearl_e_reward({2, 4}, {{1, 0}, {0, 1}, {0.5, 0.5}}, cfg), 4.0);
}

TEST(EnvelopeReward, NormalizedNeedsBounds) {
  UniformityConfig cfg{UniformityKind::cosine, 0.0, true};
  EXPECT_THROW(pearl_e_reward({1, 1}, {{0.5, 0.5}}, cfg), UsageError);
  RunningBounds b;
  b.update({0, 0});
  b.update({2, 4});
  EXPECT_DOUBLE_EQ(pearl_e_reward({1, 1}, {{0.5, 0.5}}, cfg, &b), 0.5 * 0.5 + 0.5 * 0.25);
}

TEST(EnvelopeReward, LambdaZeroSingleRayIsDotProduct) {
  std::mt19937_64 rng(4);
  UniformityConfig cfg{UniformityKind::kl, 0.0, false};
  for (int t = 0; t < 1000; ++t) {
    const int m = 2 + t % 3;
    const auto r = random_point(rng, m);
    const auto w = sample_preferences(std::vector<double>(m, 1.0), 1, rng);
    double dot = 0.0;
    for (int i = 0; i < m; ++i) dot += w[0][i] * r[i];
    EXPECT_NEAR(pearl_e_reward(r, w, cfg), dot, 1e-12);
  }
}

TEST(EnvelopeReward, CosineTermEqualsLambdaOnTheRay) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0), lambda(0.0, 3.0);
  for (int t = 0; t < 500; ++t) {
    const auto w = sample_preferences(std::vector<double>{1, 1, 1}, 1, rng)[0];
    const double c = scale(rng), l = lambda(rng);
    ObjectiveVector r(3);
    double dot = 0.0;
    for (int i = 0; i < 3; ++i) {
      r[i] = c * w[i];
      dot += w[i] * r[i];
    }
    UniformityConfig cfg{UniformityKind::cosine, l, false};
    EXPECT_NEAR(pearl_e_reward(r, {w}, cfg) - dot, l, 1e-12);
  }
}

TEST(Uniformity, KlZeroIffUniformProfile) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> w(3), r(3);
    for (int i = 0; i < 3; ++i) w[i] = u(rng);
    const double c = u(rng);
    for (int i = 0; i < 3; ++i) r[i] = c / w[i];  // w_i r_i constant
    EXPECT_NEAR(uniformity(w, r, UniformityKind::kl), 0.0, 1e-12);
    for (int i = 0; i < 3; ++i) r[i] = u(rng);
    const double v = uniformity(w, r, UniformityKind::kl);
    EXPECT_LE(v, 0.0);
  }
  EXPECT_LT(uniformity(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 3}, UniformityKind::kl), 0.0);
}

TEST(EpsilonReward, EmptyArchiveGivesZero) {
  ParetoArchive ar(64);
  RunningBounds b;
  const auto out = pearl_eps_reward(sol({0.3, 0.4}), ar, 0.05, b);
  EXPECT_DOUBLE_EQ(out.reward, 0.0);
  EXPECT_TRUE(out.archived);
}

TEST(EpsilonReward, DominatedGivesMinusKappa) {
  ParetoArchive ar(64);
  RunningBounds b;
  pearl_eps_reward(sol({1, 1}), ar, 0.05, b);
  EXPECT_DOUBLE_EQ(pearl_eps_reward(sol({0, 0}), ar, 0.05, b).reward, -64.0);
}

TEST(EpsilonReward, TwoPointFitnessByHand) {
  // Normalized: (0,1) and (1,0). I(y,x) = max(x - y) = 1 both ways, so
  // each fitness is -exp(-1/0.05); the tie falls to lexicographic order and
  // (0,1) < (1,0) ranks first.
  ParetoArchive ar(64);
  RunningBounds b;
  pearl_eps_reward(sol({0, 1}), ar, 0.05, b);
  const auto out = pearl_eps_reward(sol({1, 0}), ar, 0.05, b);
  EXPECT_EQ(ar.size(), 2u);
  EXPECT_DOUBLE_EQ(out.reward, -1.0);

  EpsilonRanker ranker{&b, 0.05, {}};
  ranker(ar.members());
  for (double f : ranker.last_fitness) EXPECT_NEAR(f, -std::exp(-20.0), 1e-20);
}

TEST(NdsReward, EmptyArchiveGivesZero) {
  ParetoArchive ar(64);
  EXPECT_DOUBLE_EQ(pearl_nds_reward(sol({1, 2}), ar, DensityRanker::crowding()).reward, 0.0);
}

TEST(NdsReward, DominatingWholeArchiveGivesZero) {
  ParetoArchive ar(64);
  for (auto p : {ObjectiveVector{0, 1}, ObjectiveVector{1, 0}, ObjectiveVector{0.5, 0.5}})
    pearl_nds_reward(sol(p), ar, DensityRanker::crowding());
  EXPECT_DOUBLE_EQ(pearl_nds_reward(sol({2, 2}), ar, DensityRanker::crowding()).reward, 0.0);
  EXPECT_EQ(ar.size(), 1u);
}

TEST(NdsReward, InteriorPointOfThree) {
  ParetoArchive ar(64);
  pearl_nds_reward(sol({0, 2}), ar, DensityRanker::crowding());
  pearl_nds_reward(sol({2, 0}), ar, DensityRanker::crowding());
  EXPECT_DOUBLE_EQ(pearl_nds_reward(sol({1, 1}), ar, DensityRanker::crowding()).reward, -2.0);
}

TEST(NdsReward, UnboundedArchiveRejected) {
  ParetoArchive ar;
  EXPECT_THROW(pearl_nds_reward(sol({1, 1}), ar, DensityRanker::crowding()), UsageError);
}

TEST(RankRewards, StayInAllowedSet) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t kappa = 1 + trial * 3;
    ParetoArchive a_eps(kappa), a_nds(kappa), a_nich(kappa);
    RunningBounds b;
    const auto niching = DensityRanker::niching(das_dennis(3, default_divisions(3, kappa)));
    for (int k = 0; k < 400; ++k) {
      const auto p = random_point(rng, 3);
      for (auto [ar, r] : {std::pair<ParetoArchive*, double>{&a_eps, 0.0}, {&a_nds, 0.0}, {&a_nich, 0.0}}) {
        const std::size_t before = ar->size();
        if (ar == &a_eps) r = pearl_eps_reward(sol(p), *ar, 0.05, b).reward;
        if (ar == &a_nds) r = pearl_nds_reward(sol(p), *ar, DensityRanker::crowding()).reward;
        if (ar == &a_nich) r = pearl_nds_reward(sol(p), *ar, niching).reward;
        ASSERT_GE(r, -static_cast<double>(kappa));
        ASSERT_LE(r, 0.0);
        ASSERT_EQ(r, std::round(r));
        // Either -kappa or a rank no larger than the pre-insert size.
        if (r != -static_cast<double>(kappa)) ASSERT_LE(-r, static_cast<double>(before));
      }
    }
  }
}

TEST(NdsReward, DominatingInsertIsNeverRejected) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  int checked = 0;
  for (int t = 0; t < 3000; ++t) {
    const int m = 2 + t % 2;
    ParetoArchive base(8);
    for (int k = 0; k < 30; ++k) pearl_nds_reward(sol(random_point(rng, m)), base, DensityRanker::crowding());
    const auto s2 = random_point(rng, m);
    auto s1 = s2;
    for (auto& v : s1) v += u(rng);
    if (!dominates(s1, s2)) continue;
    ParetoArchive a1 = base, a2 = base;
    const double r1 = pearl_nds_reward(sol(s1), a1, DensityRanker::crowding()).reward;
    const double r2 = pearl_nds_reward(sol(s2), a2, DensityRanker::crowding()).reward;
    // A dominating point is never rejected where the dominated one is kept.
    if (!base.rejects(sol(s2))) EXPECT_FALSE(base.rejects(sol(s1))) << "trial " << t;
    EXPECT_GE(r1, -8.0);
    EXPECT_GE(r2, -8.0);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(NdsReward, DominatingTheWholeArchiveEarnsZero) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    ParetoArchive a(8);
    for (int k = 0; k < 20; ++k) pearl_nds_reward(sol(random_point(rng, 3)), a, DensityRanker::crowding());
    EXPECT_EQ(pearl_nds_reward(sol({5.0, 5.0, 5.0}), a, DensityRanker::crowding()).reward, 0.0);
  }
}

TEST(NdsReward, CrowdingRankIsNotMonotoneInDominance) {
  // s1 dominates s2 but evicts (0.563,0.475), which opens space around
  // (0.529,0.555); that member then out-crowds s1.
  ParetoArchive base(8);
  for (const ObjectiveVector& p : std::vector<ObjectiveVector>{
           {0.901062, 0.13072}, {0.232755, 0.798073}, {0.563443, 0.47478}, {0.528856, 0.554821}})
    pearl_nds_reward(sol(p), base, DensityRanker::crowding());
  ParetoArchive a1 = base, a2 = base;
  EXPECT_EQ(pearl_nds_reward(sol({0.714901, 0.309452}), a2, DensityRanker::crowding()).reward, -2.0);
  EXPECT_EQ(pearl_nds_reward(sol({0.750758, 0.490932}), a1, DensityRanker::crowding()).reward, -3.0);
  EXPECT_EQ(a1.size(), 4u);
}

TEST(ConstraintViolation, AllSatisfied) {
  EXPECT_DOUBLE_EQ(constraint_violation(std::vector<double>{-1.0, 0.0, -0.5}), 0.0);
}

TEST(ConstraintViolation, RelativeThreshold) {
  const std::vector<double> x{1320}, c{1200}, gamma{1};
  EXPECT_NEAR(constraint_violation(x, c, gamma), 0.01, 1e-15);
}

TEST(ConstraintViolation, BenchmarkSquares) {
  EXPECT_NEAR(constraint_violation(std::vector<double>{0.5, 0.2}), 0.29, 1e-15);
  const std::vector<double> g{0.5, 0.2}, w{2.0, 10.0};
  EXPECT_NEAR(constraint_violation(g, w), 0.5 + 0.4, 1e-15);
}

TEST(CPearlReward, FeasibleIntoEmptyArchive) {
  ParetoArchive ar(64);
  ConstraintConfig cc;
  auto inner = [](const Solution& s, ParetoArchive& a) { return pearl_nds_reward(s, a, DensityRanker::crowding()); };
  EXPECT_DOUBLE_EQ(c_pearl_reward(sol({1, 1}), ar, inner, cc).reward, 0.0);
}

TEST(CPearlReward, InfeasibleDistance) {
  ParetoArchive ar(64);
  ConstraintConfig cc;
  cc.bonus = 64;
  auto inner = [](const Solution& s, ParetoArchive& a) { return pearl_nds_reward(s, a, DensityRanker::crowding()); };
  const auto out = c_pearl_reward(sol({1, 1}, 0.29), ar, inner, cc);
  EXPECT_NEAR(out.reward, -64.29, 1e-12);
  EXPECT_FALSE(out.feasible);
  EXPECT_TRUE(ar.empty());
}

TEST(CPearlReward, Rank2InfeasibleAgainstFeasibleMember) {
  ParetoArchive ar(64, DominanceKind::constrained);
  ConstraintConfig cc;
  cc.mode = ConstraintMode::rank2;
  auto inner = [](const Solution& s, ParetoArchive& a) { return pearl_nds_reward(s, a, DensityRanker::crowding()); };
  c_pearl_reward(sol({0, 0}), ar, inner, cc);
  EXPECT_DOUBLE_EQ(c_pearl_reward(sol({5, 5}, 0.1), ar, inner, cc).reward, -64.0);
}

TEST(CPearlReward, Rank2NeedsConstrainedArchive) {
  ParetoArchive ar(64);
  ConstraintConfig cc;
  cc.mode = ConstraintMode::rank2;
  auto inner = [](const Solution& s, ParetoArchive& a) { return pearl_nds_reward(s, a, DensityRanker::crowding()); };
  EXPECT_THROW(c_pearl_reward(sol({0, 0}), ar, inner, cc), UsageError);
}

TEST(CPearlReward, InfeasibleAlwaysBelowFeasible) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> cv(1e-9, 2.0);
  std::bernoulli_distribution feasible(0.5);
  RewardConfig rc;
  rc.constrained = true;
  RewardEngine engine(rc, 3);
  double worst_feasible = 0.0, best_infeasible = -1e300;
  for (int k = 0; k < 3000; ++k) {
    const bool f = feasible(rng);
    const auto out = engine(sol(random_point(rng, 3), f ? 0.0 : cv(rng)), {});
    if (f)
      worst_feasible = std::min(worst_feasible, out.reward);
    else
      best_infeasible = std::max(best_infeasible, out.reward);
  }
  EXPECT_LT(best_infeasible, worst_feasible);
  EXPECT_GE(worst_feasible, -64.0);
}

TEST(RewardEngine, ScaleAndArchiveKinds) {
  RewardConfig e;
  e.variant = Variant::envelope;
  EXPECT_EQ(RewardEngine(e, 3).reward_scale(), 1.0);
  EXPECT_EQ(RewardEngine(e, 3).archive().capacity(), unbounded);
  RewardConfig n;
  EXPECT_DOUBLE_EQ(RewardEngine(n, 3).reward_scale(), 1.0 / 64.0);
  n.constrained = true;
  n.constraint.mode = ConstraintMode::rank2;
  EXPECT_EQ(RewardEngine(n, 3).archive().dominance(), DominanceKind::constrained);
  e.constrained = true;
  e.constraint.mode = ConstraintMode::rank2;
  EXPECT_THROW(RewardEngine(e, 3), UsageError);
}

TEST(RewardEngine, VariantNames) {
  RewardConfig c;
  EXPECT_EQ(variant_name(c), "pearl-nds-crowding");
  c.constrained = true;
  EXPECT_EQ(variant_name(c), "c-pearl-nds-crowding-cl");
  c.constraint.mode = ConstraintMode::rank2;
  c.ranker = DensityKind::niching;
  EXPECT_EQ(variant_name(c), "pearl-nds-niching2");
}
