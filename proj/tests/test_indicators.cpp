#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pearl/indicators.hpp"

using namespace pearl;

namespace {

std::vector<ObjectiveVector> random_front(std::mt19937_64& rng, std::size_t n, int nobj) {
  // Points on the positive unit sphere are mutually non-dominated.
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<ObjectiveVector> f;
  for (std::size_t i = 0; i < n; ++i) {
    ObjectiveVector p(nobj);
    double s = 0.0;
    for (auto& v : p) s += (v = std::abs(z(rng))) * v;
    for (auto& v : p) v /= std::sqrt(s);
    f.push_back(p);
  }
  return f;
}

// Fraction of uniform samples in [0, ref] dominated by the front.
double monte_carlo_hv(const std::vector<ObjectiveVector>& front, const ObjectiveVector& ref, std::size_t samples,
                      std::mt19937_64& rng, double* se) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double box = 1.0;
  for (double r : ref) box *= r;
  std::size_t hits = 0;
  ObjectiveVector s(ref.size());
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t m = 0; m < ref.size(); ++m) s[m] = u(rng) * ref[m];
    for (const auto& p : front) {
      bool dom = true;
      for (std::size_t m = 0; m < ref.size() && dom; ++m) dom = p[m] <= s[m];
      if (dom) {
        ++hits;
        break;
      }
    }
  }
  const double q = static_cast<double>(hits) / samples;
  *se = box * std::sqrt(q * (1 - q) / samples);
  return box * q;
}

}  // namespace

TEST(Hypervolume, TwoPointsIn2D) {
  EXPECT_DOUBLE_EQ(hypervolume({{1, 2}, {2, 1}}, {3, 3}), 3.0);
}

TEST(Hypervolume, OriginFillsTheBox) {
  EXPECT_DOUBLE_EQ(hypervolume({{0, 0, 0}}, {3, 3, 3}), 27.0);
  EXPECT_DOUBLE_EQ(hypervolume({{0, 0}}, {2, 5}), 10.0);
}

TEST(Hypervolume, EmptyAndOutsidePoints) {
  EXPECT_EQ(hypervolume({}, {1, 1}), 0.0);
  EXPECT_EQ(hypervolume({{1, 0.5}}, {1, 1}), 0.0);
  EXPECT_THROW(hypervolume({{0, 0, 0, 0}}, {1, 1, 1, 1}), UsageError);
}

TEST(Hypervolume, ThreeDimensionalHandExample) {
  // Boxes [0,2]x[1,2]x[1,2] and [1,2]x[0,2]x[1,2] overlap in a unit cube.
  EXPECT_DOUBLE_EQ(hypervolume({{0, 1, 1}, {1, 0, 1}}, {2, 2, 2}), 3.0);
}

TEST(Hypervolume, DominatedAndDuplicatePointsAddNothing) {
  const std::vector<ObjectiveVector> base{{0.2, 0.8, 0.5}, {0.8, 0.2, 0.5}, {0.5, 0.5, 0.1}};
  const ObjectiveVector ref{1, 1, 1};
  auto more = base;
  more.push_back({0.9, 0.9, 0.9});
  more.push_back(base[1]);
  EXPECT_DOUBLE_EQ(hypervolume(base, ref), hypervolume(more, ref));
}

TEST(Hypervolume, AgreesWithMonteCarlo) {
  std::mt19937_64 rng(1);
  const ObjectiveVector ref{1.2, 1.2, 1.2};
  for (int t = 0; t < 10; ++t) {
    const auto front = random_front(rng, 5 + t * 3, 3);
    double se = 0.0;
    const double mc = monte_carlo_hv(front, ref, 200000, rng, &se);
    EXPECT_LE(std::abs(hypervolume(front, ref) - mc), 4 * se) << t;
  }
}

TEST(Hypervolume, AddingAPointNeverDecreases) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  const ObjectiveVector ref{1.1, 1.1, 1.1};
  for (int t = 0; t < 100; ++t) {
    auto front = random_front(rng, 8, 3);
    const double before = hypervolume(front, ref);
    front.push_back({u(rng), u(rng), u(rng)});
    EXPECT_GE(hypervolume(front, ref), before - 1e-12);
  }
}

TEST(Distances, GdIgdExamples) {
  const std::vector<ObjectiveVector> ref{{0, 1}, {1, 0}};
  const std::vector<ObjectiveVector> a{{0, 2}};
  EXPECT_DOUBLE_EQ(gd(a, ref), 1.0);
  // From (0,1): 1; from (1,0): sqrt(1+4).
  EXPECT_DOUBLE_EQ(igd(a, ref), (1.0 + std::sqrt(5.0)) / 2.0);
  EXPECT_DOUBLE_EQ(gd(ref, ref), 0.0);
  EXPECT_DOUBLE_EQ(igd(ref, ref), 0.0);
  EXPECT_THROW(gd({}, ref), UsageError);
  EXPECT_THROW(igd(a, {}), UsageError);
}

TEST(Epsilon, Examples) {
  const std::vector<ObjectiveVector> ref{{0, 1}, {1, 0}};
  EXPECT_DOUBLE_EQ(additive_epsilon(ref, ref), 0.0);
  EXPECT_DOUBLE_EQ(additive_epsilon({{0.5, 0.5}}, ref), 0.5);
  EXPECT_DOUBLE_EQ(additive_epsilon({{-1, -1}}, ref), -1.0);
}

TEST(Epsilon, NonPositiveMeansWeakDominance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    std::vector<ObjectiveVector> a, r;
    for (int i = 0; i < 4; ++i) a.push_back({u(rng), u(rng)});
    for (int i = 0; i < 4; ++i) r.push_back({u(rng), u(rng)});
    bool covers = true;
    for (const auto& q : r) {
      bool some = false;
      for (const auto& p : a) some = some || (p[0] <= q[0] && p[1] <= q[1]);
      covers = covers && some;
    }
    EXPECT_EQ(additive_epsilon(a, r) <= 0.0, covers);
  }
}

TEST(Cardinality, TwoAlgorithms) {
  std::map<std::string, std::vector<ObjectiveVector>> fronts;
  fronts["a"] = {{0, 3}, {1, 2}, {3, 1}};
  fronts["b"] = {{2, 1}, {3, 0}, {1, 2}};
  const auto c = cardinality_metrics(fronts);
  // Union front: (0,3) (1,2) (2,1) (3,0); (3,1) is dominated by (2,1).
  EXPECT_EQ(c.at("a").i_c, 2u);
  EXPECT_DOUBLE_EQ(c.at("a").c_metric, 2.0 / 3.0);
  EXPECT_EQ(c.at("b").i_c, 3u);
  EXPECT_DOUBLE_EQ(c.at("b").c_metric, 1.0);
}

TEST(Cardinality, CountsDistinctNonDominatedPoints) {
  // 17 distinct non-dominated points of which 16 reach the union front.
  std::map<std::string, std::vector<ObjectiveVector>> fronts;
  for (int i = 0; i < 16; ++i) fronts["a"].push_back({static_cast<double>(i), 20.0 - i});
  fronts["a"].push_back({16.0, 4.5});  // beaten by b's (16,3.5)
  fronts["a"].push_back(fronts["a"][0]);
  for (int i = 0; i < 8; ++i) fronts["b"].push_back({16.0 + i, 3.5 - 0.1 * i * i});
  const auto c = cardinality_metrics(fronts);
  EXPECT_EQ(c.at("a").i_c, 16u);
  EXPECT_DOUBLE_EQ(c.at("a").c_metric, 16.0 / 17.0);
  EXPECT_EQ(c.at("b").i_c, 8u);
  EXPECT_DOUBLE_EQ(c.at("b").c_metric, 1.0);
}

TEST(Cardinality, SingleAlgorithmOwnsEverything) {
  std::map<std::string, std::vector<ObjectiveVector>> fronts{{"solo", {{0, 1}, {1, 0}}}};
  EXPECT_DOUBLE_EQ(cardinality_metrics(fronts).at("solo").c_metric, 1.0);
}

TEST(Entropy, HandComputedWeights) {
  // Column 0 constant: entropy 1, weight 0. Column 1 proportions 1/6, 2/6, 3/6.
  const std::vector<ObjectiveVector> f{{1, 1}, {1, 2}, {1, 3}};
  const auto s = entropy_select(f, 2);
  const double h = -(std::log(1.0 / 6) / 6 + std::log(2.0 / 6) * 2 / 6 + std::log(3.0 / 6) * 3 / 6) / std::log(3.0);
  EXPECT_NEAR(s.entropies[0], 1.0, 1e-12);
  EXPECT_NEAR(s.entropies[1], h, 1e-12);
  EXPECT_NEAR(s.weights[0], 0.0, 1e-12);
  EXPECT_NEAR(s.weights[1], 1.0, 1e-12);
  EXPECT_EQ(s.indices, (std::vector<std::size_t>{0, 1}));
}

TEST(Entropy, ThreeByTwoMatrix) {
  const std::vector<ObjectiveVector> f{{0.2, 0.9}, {0.5, 0.5}, {0.9, 0.1}};
  auto ent = [](std::vector<double> col) {
    double s = col[0] + col[1] + col[2], h = 0.0;
    for (double v : col) h -= v / s * std::log(v / s);
    return h / std::log(3.0);
  };
  const double e0 = ent({0.2, 0.5, 0.9}), e1 = ent({0.9, 0.5, 0.1});
  const double w0 = (1 - e0) / (2 - e0 - e1), w1 = (1 - e1) / (2 - e0 - e1);
  const auto s = entropy_select(f, 3);
  EXPECT_NEAR(s.weights[0], w0, 1e-12);
  EXPECT_NEAR(s.weights[1], w1, 1e-12);
  // Scores: w0 * norm0 + w1 * norm1 with norms (0,1), (3/7, 1/2), (1, 0).
  std::vector<std::pair<double, std::size_t>> sc{{w1, 0}, {w0 * 3.0 / 7.0 + w1 * 0.5, 1}, {w0, 2}};
  std::sort(sc.begin(), sc.end());
  EXPECT_EQ(s.indices, (std::vector<std::size_t>{sc[0].second, sc[1].second, sc[2].second}));
}

TEST(Entropy, DuplicatesDoNotChangeTheResult) {
  const std::vector<ObjectiveVector> f{{0.2, 0.9}, {0.5, 0.5}, {0.9, 0.1}};
  auto g = f;
  g.push_back(f[1]);
  g.push_back(f[1]);
  const auto a = entropy_select(f, 2);
  const auto b = entropy_select(g, 2);
  EXPECT_EQ(a.indices, b.indices);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(entropy_select(g, 5).indices.size(), 3u);
}

TEST(Entropy, InvalidK) {
  EXPECT_THROW(entropy_select({{1, 2}}, 0), UsageError);
  EXPECT_THROW(entropy_select({{1, 2}}, 2), UsageError);
}

TEST(MetricRow, FormatsFullPrecision) {
  std::ostringstream os;
  write_metric_row(os, MetricReport{"dtlz2/nsga3/seed_0", "nsga3", "dtlz2", 1.0 / 3.0, 0.5, 0.25, -0.125, 7, 0.7});
  EXPECT_EQ(os.str(), "dtlz2/nsga3/seed_0,nsga3,dtlz2,0.33333333333333331,0.5,0.25,-0.125,7,0.69999999999999996\n");
}
