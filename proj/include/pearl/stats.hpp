#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "pearl/types.hpp"

namespace pearl {

// n blocks (seeds) by k treatments (algorithms). Rank 1 is the best value in
// a block; ties share the average rank.
struct RankMatrix {
  std::vector<std::vector<double>> values;
  bool higher_is_better = true;

  std::size_t blocks() const { return values.size(); }
  std::size_t treatments() const { return values.empty() ? 0 : values[0].size(); }

  void validate() const {
    if (blocks() < 2 || treatments() < 2) throw UsageError("rank matrix: need at least 2 blocks and 2 treatments");
    for (const auto& row : values)
      if (row.size() != treatments()) throw UsageError("rank matrix: ragged rows");
  }

  std::vector<std::vector<double>> ranks() const {
    std::vector<std::vector<double>> out;
    for (const auto& row : values) {
      const std::size_t k = row.size();
      std::vector<std::size_t> idx(k);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return higher_is_better ? row[a] > row[b] : row[a] < row[b];
      });
      std::vector<double> r(k);
      for (std::size_t s = 0; s < k;) {
        std::size_t e = s;
        while (e + 1 < k && row[idx[e + 1]] == row[idx[s]]) ++e;
        const double avg = (static_cast<double>(s + e) / 2.0) + 1.0;
        for (std::size_t t = s; t <= e; ++t) r[idx[t]] = avg;
        s = e + 1;
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  std::vector<double> mean_ranks() const {
    const auto r = ranks();
    std::vector<double> mean(treatments(), 0.0);
    for (const auto& row : r)
      for (std::size_t j = 0; j < row.size(); ++j) mean[j] += row[j];
    for (double& m : mean) m /= static_cast<double>(blocks());
    return mean;
  }
};

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> mean_ranks;
};

// chi2_F = 12n / (k(k+1)) * sum_j (Rbar_j - (k+1)/2)^2, referred to a
// chi-square with k-1 degrees of freedom. No tie correction.
inline FriedmanResult friedman(const RankMatrix& m) {
  m.validate();
  const double n = static_cast<double>(m.blocks());
  const double k = static_cast<double>(m.treatments());
  FriedmanResult res;
  res.mean_ranks = m.mean_ranks();
  double ss = 0.0;
  for (double r : res.mean_ranks) ss += (r - (k + 1.0) / 2.0) * (r - (k + 1.0) / 2.0);
  res.statistic = 12.0 * n / (k * (k + 1.0)) * ss;
  if (res.statistic <= 1e-12) {
    res.statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  boost::math::chi_squared dist(k - 1.0);
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  return res;
}

// Two-tailed Nemenyi critical values q_alpha (studentized range over sqrt 2)
// for k = 2..10.
inline constexpr std::array<double, 9> nemenyi_q05{1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
inline constexpr std::array<double, 9> nemenyi_q10{1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};

// alpha in [0.05, 0.1], linear between the two tabulated levels.
inline double nemenyi_q(std::size_t k, double alpha) {
  if (k < 2 || k > 10) throw UsageError("nemenyi: tabulated critical values cover 2 to 10 treatments");
  if (alpha < 0.05 - 1e-12 || alpha > 0.1 + 1e-12) throw UsageError("nemenyi: alpha must lie in [0.05, 0.1]");
  const double t = std::clamp((alpha - 0.05) / 0.05, 0.0, 1.0);
  return (1.0 - t) * nemenyi_q05[k - 2] + t * nemenyi_q10[k - 2];
}

// P(range of k iid standard normals <= q), by Simpson quadrature of
// k * int phi(z) [Phi(z) - Phi(z - q)]^(k-1) dz.
inline double studentized_range_cdf(double q, std::size_t k) {
  if (q <= 0.0) return 0.0;
  const boost::math::normal nd;
  constexpr int steps = 4000;
  const double lo = -9.0, hi = 9.0, h = (hi - lo) / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double z = lo + i * h;
    const double inner = boost::math::cdf(nd, z) - boost::math::cdf(nd, z - q);
    const double f = boost::math::pdf(nd, z) * std::pow(std::max(inner, 0.0), static_cast<double>(k - 1));
    sum += f * (i == 0 || i == steps ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return std::clamp(static_cast<double>(k) * sum * h / 3.0, 0.0, 1.0);
}

struct NemenyiResult {
  std::vector<double> mean_ranks;
  double critical_difference = 0.0;
  std::vector<std::vector<double>> p_values;     // symmetric, unit diagonal
  std::vector<std::vector<bool>> significant;  // |Rbar_i - Rbar_j| > CD
};

inline NemenyiResult nemenyi(const RankMatrix& m, double alpha) {
  m.validate();
  const std::size_t k = m.treatments();
  const double n = static_cast<double>(m.blocks());
  const double se = std::sqrt(static_cast<double>(k) * (k + 1.0) / (6.0 * n));
  NemenyiResult res;
  res.mean_ranks = m.mean_ranks();
  res.critical_difference = nemenyi_q(k, alpha) * se;
  res.p_values.assign(k, std::vector<double>(k, 1.0));
  res.significant.assign(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double diff = std::abs(res.mean_ranks[i] - res.mean_ranks[j]);
      const double p = 1.0 - studentized_range_cdf(diff / se * std::numbers::sqrt2, k);
      res.p_values[i][j] = res.p_values[j][i] = std::clamp(p, 0.0, 1.0);
      res.significant[i][j] = res.significant[j][i] = diff > res.critical_difference;
    }
  return res;
}

}  // namespace pearl
