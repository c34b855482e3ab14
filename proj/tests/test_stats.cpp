#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pearl/stats.hpp"

using namespace pearl;

TEST(Ranks, AverageOnTies) {
  RankMatrix m{{{3, 1, 3, 2}, {1, 2, 3, 4}}, true};
  const auto r = m.ranks();
  EXPECT_EQ(r[0], (std::vector<double>{1.5, 4, 1.5, 3}));
  EXPECT_EQ(r[1], (std::vector<double>{4, 3, 2, 1}));
  m.higher_is_better = false;
  EXPECT_EQ(m.ranks()[1], (std::vector<double>{1, 2, 3, 4}));
}

TEST(Friedman, ConsistentOrderingTwentyBlocks) {
  RankMatrix m;
  for (int i = 0; i < 20; ++i) m.values.push_back({3.0 + i, 2.0 + i, 1.0 + i});
  const auto f = friedman(m);
  EXPECT_NEAR(f.statistic, 40.0, 1e-12);
  EXPECT_LT(f.p_value, 1e-3);
  EXPECT_EQ(f.mean_ranks, (std::vector<double>{1, 2, 3}));
}

TEST(Friedman, IdenticalTreatments) {
  RankMatrix m;
  for (int i = 0; i < 5; ++i) m.values.push_back({0.1 * i, 0.1 * i, 0.1 * i});
  const auto f = friedman(m);
  EXPECT_EQ(f.statistic, 0.0);
  EXPECT_EQ(f.p_value, 1.0);
}

TEST(Friedman, HandExample) {
  // Ranks per block: (1,2,3) (1,3,2) (2,1,3) (1,2,3). Mean ranks 1.25, 2, 2.75,
  // statistic 12*4/(3*4) * 1.125 = 4.5; with 2 degrees of freedom the
  // upper tail is exp(-x/2).
  RankMatrix m{{{9, 5, 1}, {9, 1, 5}, {5, 9, 1}, {8, 7, 6}}, true};
  const auto f = friedman(m);
  EXPECT_NEAR(f.statistic, 4.5, 1e-12);
  EXPECT_NEAR(f.p_value, std::exp(-2.25), 1e-12);
}

TEST(Friedman, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    RankMatrix m;
    for (int i = 0; i < 6; ++i) m.values.push_back({z(rng), z(rng) + 0.5, z(rng) + 1.0, z(rng)});
    RankMatrix e = m;
    for (auto& row : e.values)
      for (auto& v : row) v = std::exp(3.0 * v) + 7.0;
    EXPECT_DOUBLE_EQ(friedman(m).statistic, friedman(e).statistic);
  }
}

TEST(Friedman, TooFewBlocksOrTreatments) {
  EXPECT_THROW(friedman(RankMatrix{{{1, 2, 3}}, true}), UsageError);
  EXPECT_THROW(friedman(RankMatrix{{{1}, {2}}, true}), UsageError);
}

TEST(Nemenyi, CriticalValueTable) {
  EXPECT_DOUBLE_EQ(nemenyi_q(3, 0.05), 2.343);
  EXPECT_DOUBLE_EQ(nemenyi_q(3, 0.1), 2.052);
  EXPECT_THROW(nemenyi_q(11, 0.05), UsageError);
  EXPECT_THROW(nemenyi_q(3, 0.01), UsageError);
}

TEST(Nemenyi, RangeDistributionReproducesTable) {
  // Tabulated q times sqrt(2) is the studentized range quantile at 1 - alpha.
  for (std::size_t k = 2; k <= 10; ++k) {
    EXPECT_NEAR(studentized_range_cdf(nemenyi_q05[k - 2] * std::sqrt(2.0), k), 0.95, 2e-3) << k;
    EXPECT_NEAR(studentized_range_cdf(nemenyi_q10[k - 2] * std::sqrt(2.0), k), 0.90, 2e-3) << k;
  }
}

TEST(Nemenyi, IdenticalDataNothingSignificant) {
  RankMatrix m;
  for (int i = 0; i < 10; ++i) m.values.push_back({1.0, 1.0, 1.0});
  const auto n = nemenyi(m, 0.05);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_FALSE(n.significant[i][j]);
      EXPECT_DOUBLE_EQ(n.p_values[i][j], 1.0);
    }
}

TEST(Nemenyi, SeparatedTreatments) {
  RankMatrix m;
  for (int i = 0; i < 20; ++i) m.values.push_back({3.0, 2.0, 1.0});
  const auto n = nemenyi(m, 0.1);
  // se = sqrt(3*4/(6*20)); CD = 2.052 * se
  EXPECT_NEAR(n.critical_difference, 2.052 * std::sqrt(0.1), 1e-12);
  EXPECT_TRUE(n.significant[0][2]);
  EXPECT_TRUE(n.significant[0][1]);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(n.p_values[i][i], 1.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(n.p_values[i][j], n.p_values[j][i]);
  }
  EXPECT_LT(n.p_values[0][2], n.p_values[0][1]);
  EXPECT_LT(n.p_values[0][2], 1e-6);
}

TEST(Nemenyi, PValueMatchesSignificanceAtTheBoundary) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    RankMatrix m;
    for (int i = 0; i < 8; ++i) m.values.push_back({z(rng) + 1.0, z(rng), z(rng) - 1.0, z(rng)});
    const auto n = nemenyi(m, 0.05);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) {
        const double p = n.p_values[i][j];
        if (p < 0.045) EXPECT_TRUE(n.significant[i][j]);
        if (p > 0.055) EXPECT_FALSE(n.significant[i][j]);
      }
  }
}
