#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pearl {

// Objective values are stored in maximization sense. Minimization problems are
// negated when a Solution is built from an evaluation and negated back for
// metric reporting.
using ObjectiveVector = std::vector<double>;
using DecisionVector = std::vector<double>;

// Raised when a caller violates an operation's precondition.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Raised for invalid or incomplete configuration (missing files, bad keys).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double feasibility_tolerance = 1e-12;

struct Solution {
  DecisionVector x;
  ObjectiveVector obj;
  std::vector<double> g;  // raw constraint values, positive means violated
  double cv = 0.0;

  bool feasible() const noexcept { return cv <= 0.0; }
};

// Sentinel for archives without a size limit.
inline constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();

inline ObjectiveVector negated(ObjectiveVector v) {
  for (auto& e : v) e = -e;
  return v;
}

inline bool all_finite(const std::vector<double>& v) {
  for (double e : v)
    if (!std::isfinite(e)) return false;
  return true;
}

}  // namespace pearl
