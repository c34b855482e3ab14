#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pearl/density.hpp"
#include "pearl/pareto.hpp"
#include "pearl/types.hpp"

#ifndef PEARL_DATA_DIR
#define PEARL_DATA_DIR "data"
#endif

namespace pearl {

// Writes minimization-sense objectives into f and violation-positive
// constraint values into g.
using EvalFn = std::function<void(std::span<const double> x, std::span<double> f, std::span<double> g)>;

enum class FrontSource { sphere, curve, c2_sphere, c3_ellipsoid, file };

struct ProblemSpec {
  std::string name;
  int n_x = 0;
  int nobj = 0;
  int n_constraints = 0;
  std::vector<double> lower, upper;
  std::vector<double> nadir;  // HV reference point, minimization sense
  FrontSource front = FrontSource::file;
  EvalFn eval;
};

struct EvaluationRecord {
  std::vector<double> x;
  std::vector<double> f;  // minimization sense, raw
  std::vector<double> g;
  std::size_t index = 0;
};

inline EvaluationRecord evaluate(const ProblemSpec& problem, std::span<const double> x, std::size_t index = 0) {
  if (static_cast<int>(x.size()) != problem.n_x)
    throw UsageError("evaluate: " + problem.name + " expects " + std::to_string(problem.n_x) + " variables");
  for (int i = 0; i < problem.n_x; ++i)
    if (!(x[i] >= problem.lower[i] && x[i] <= problem.upper[i]))
      throw UsageError("evaluate: decision variable " + std::to_string(i) + " outside the box");
  EvaluationRecord rec;
  rec.x.assign(x.begin(), x.end());
  rec.f.assign(problem.nobj, 0.0);
  rec.g.assign(problem.n_constraints, 0.0);
  rec.index = index;
  problem.eval(x, rec.f, rec.g);
  return rec;
}

inline EvaluationRecord evaluate(const ProblemSpec& problem, const std::vector<double>& x, std::size_t index = 0) {
  return evaluate(problem, std::span<const double>(x), index);
}

namespace detail {

constexpr double half_pi = std::numbers::pi / 2.0;

// DTLZ spherical mapping: f_i = (1+g) prod_{j<M-i} cos(theta_j) [sin(theta_{M-i})].
inline void spherical(std::span<const double> theta, double scale, std::span<double> f) {
  const std::size_t m = f.size();
  for (std::size_t i = 0; i < m; ++i) {
    double v = scale;
    for (std::size_t j = 0; j + 1 < m - i; ++j) v *= std::cos(theta[j]);
    if (i > 0) v *= std::sin(theta[m - 1 - i]);
    f[i] = v;
  }
}

inline double g_sphere(std::span<const double> tail) {
  double g = 0.0;
  for (double v : tail) g += (v - 0.5) * (v - 0.5);
  return g;
}

inline void dtlz2(std::span<const double> x, std::span<double> f, double alpha) {
  const std::size_t m = f.size();
  const double g = g_sphere(x.subspan(m - 1));
  std::vector<double> theta(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) theta[j] = std::pow(x[j], alpha) * half_pi;
  spherical(theta, 1.0 + g, f);
}

inline void dtlz5_like(std::span<const double> x, std::span<double> f, double g) {
  const std::size_t m = f.size();
  std::vector<double> theta(m - 1);
  theta[0] = x[0] * half_pi;
  for (std::size_t j = 1; j + 1 < m; ++j) theta[j] = std::numbers::pi / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * x[j]);
  spherical(theta, 1.0 + g, f);
}

inline void dtlz7(std::span<const double> x, std::span<double> f) {
  const std::size_t m = f.size();
  const auto tail = x.subspan(m - 1);
  double g = 0.0;
  for (double v : tail) g += v;
  g = 1.0 + 9.0 / static_cast<double>(tail.size()) * g;
  double h = static_cast<double>(m);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    f[i] = x[i];
    h -= f[i] / (1.0 + g) * (1.0 + std::sin(3.0 * std::numbers::pi * f[i]));
  }
  f[m - 1] = (1.0 + g) * h;
}

// Type-2 constraint of C2-DTLZ2 (Jain & Deb 2014): feasible inside the
// corner spheres of radius r or the central one.
inline double c2_constraint(std::span<const double> f) {
  const std::size_t m = f.size();
  const double r = m == 3 ? 0.4 : 0.5;
  double sumsq = 0.0;
  for (double v : f) sumsq += v * v;
  double v1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) v1 = std::min(v1, (f[i] - 1.0) * (f[i] - 1.0) + (sumsq - f[i] * f[i]) - r * r);
  const double a = 1.0 / std::sqrt(static_cast<double>(m));
  double v2 = 0.0;
  for (double v : f) v2 += (v - a) * (v - a);
  v2 -= r * r;
  return std::min(v1, v2);
}

// Type-3 constraints of C3-DTLZ4: f_j^2/4 + sum_{i!=j} f_i^2 >= 1.
inline void c3_constraints(std::span<const double> f, std::span<double> g) {
  double sumsq = 0.0;
  for (double v : f) sumsq += v * v;
  for (std::size_t j = 0; j < f.size(); ++j) g[j] = -(f[j] * f[j] / 4.0 + (sumsq - f[j] * f[j]) - 1.0);
}

// CTP1 with two constraints; a_j, b_j from Deb, Pratap & Meyarivan (2001):
// a = (0.858, 0.728), b = (0.541, 0.295), computed by the usual recursion.
struct Ctp1Constants {
  double a[2], b[2];
};

inline Ctp1Constants ctp1_constants() {
  Ctp1Constants c{};
  double a = 1.0, b = 1.0;
  const double delta = 1.0 / 3.0;
  double alpha = delta;
  for (int j = 0; j < 2; ++j) {
    const double beta = a * std::exp(-b * alpha);
    const double a_next = (a + beta) / 2.0;
    const double b_next = -1.0 / alpha * std::log(beta / a_next);
    c.a[j] = a_next;
    c.b[j] = b_next;
    a = a_next;
    b = b_next;
    alpha += delta;
  }
  return c;
}

// CTP2-CTP7 family (Deb 2001):
// cos(t)(f2-e) - sin(t) f1 >= a |sin(b pi (sin(t)(f2-e) + cos(t) f1)^c)|^d
struct CtpShape {
  double theta, a, b, c, d, e;
};

inline double ctp_constraint(double f1, double f2, const CtpShape& s) {
  const double lhs = std::cos(s.theta) * (f2 - s.e) - std::sin(s.theta) * f1;
  const double inner = std::sin(s.theta) * (f2 - s.e) + std::cos(s.theta) * f1;
  const double rhs = s.a * std::pow(std::abs(std::sin(s.b * std::numbers::pi * std::pow(inner, s.c))), s.d);
  return -(lhs - rhs);
}

}  // namespace detail

// Registered problems:
//   dtlz2, dtlz4, dtlz5, dtlz6, dtlz7 (n_x = 12, F = 3),
//   c2-dtlz2, c3-dtlz4 (n_x = 7, F = 3), ctp1..ctp4 (n_x = 2, F = 2).
// All live on the unit box. CTP uses the linear distance function
// g(x) = 1 + x_2 and the per-problem constants of the original CTP suite.
inline std::vector<std::string> problem_names() {
  return {"dtlz2", "dtlz4", "dtlz5", "dtlz6", "dtlz7", "c2-dtlz2", "c3-dtlz4", "ctp1", "ctp2", "ctp3", "ctp4"};
}

inline ProblemSpec make_problem(const std::string& name, int n_x = 0) {
  ProblemSpec p;
  p.name = name;
  const bool dtlz = name.rfind("dtlz", 0) == 0;
  const bool cdtlz = name == "c2-dtlz2" || name == "c3-dtlz4";
  const bool ctp = name.rfind("ctp", 0) == 0;
  if (!dtlz && !cdtlz && !ctp) throw ConfigError("unknown problem '" + name + "'");

  p.nobj = ctp ? 2 : 3;
  p.n_x = n_x > 0 ? n_x : (dtlz ? 12 : cdtlz ? 7 : 2);
  if (p.n_x < p.nobj) throw ConfigError("problem '" + name + "' needs at least F variables");
  p.lower.assign(p.n_x, 0.0);
  p.upper.assign(p.n_x, 1.0);
  p.nadir = ctp ? std::vector<double>{3.0, 3.0} : std::vector<double>{3.0, 3.0, 3.0};

  if (name == "dtlz2") {
    p.front = FrontSource::sphere;
    p.eval = [](auto x, auto f, auto) { detail::dtlz2(x, f, 1.0); };
  } else if (name == "dtlz4") {
    p.front = FrontSource::sphere;
    p.eval = [](auto x, auto f, auto) { detail::dtlz2(x, f, 100.0); };
  } else if (name == "dtlz5") {
    p.front = FrontSource::curve;
    p.eval = [](auto x, auto f, auto) { detail::dtlz5_like(x, f, detail::g_sphere(x.subspan(f.size() - 1))); };
  } else if (name == "dtlz6") {
    p.front = FrontSource::curve;
    p.eval = [](auto x, auto f, auto) {
      double g = 0.0;
      for (double v : x.subspan(f.size() - 1)) g += std::pow(v, 0.1);
      detail::dtlz5_like(x, f, g);
    };
  } else if (name == "dtlz7") {
    p.front = FrontSource::file;
    p.nadir = {3.0, 3.0, 7.0};
    p.eval = [](auto x, auto f, auto) { detail::dtlz7(x, f); };
  } else if (name == "c2-dtlz2") {
    p.front = FrontSource::c2_sphere;
    p.n_constraints = 1;
    p.eval = [](auto x, auto f, auto g) {
      detail::dtlz2(x, f, 1.0);
      g[0] = detail::c2_constraint(f);
    };
  } else if (name == "c3-dtlz4") {
    p.front = FrontSource::c3_ellipsoid;
    p.n_constraints = 3;
    p.eval = [](auto x, auto f, auto g) {
      detail::dtlz2(x, f, 100.0);
      detail::c3_constraints(f, g);
    };
  } else if (name == "ctp1") {
    p.front = FrontSource::file;
    p.n_constraints = 2;
    p.eval = [c = detail::ctp1_constants()](auto x, auto f, auto g) {
      const double gx = 1.0 + x[1];
      f[0] = x[0];
      f[1] = gx * std::exp(-f[0] / gx);
      for (int j = 0; j < 2; ++j) g[j] = -(f[1] - c.a[j] * std::exp(-c.b[j] * f[0]));
    };
  } else if (name == "ctp2" || name == "ctp3" || name == "ctp4") {
    p.front = FrontSource::file;
    p.n_constraints = 1;
    const double theta = -0.2 * std::numbers::pi;
    detail::CtpShape shape = name == "ctp2"   ? detail::CtpShape{theta, 0.2, 10.0, 1.0, 6.0, 1.0}
                             : name == "ctp3" ? detail::CtpShape{theta, 0.1, 10.0, 1.0, 0.5, 1.0}
                                              : detail::CtpShape{theta, 0.75, 10.0, 1.0, 0.5, 1.0};
    p.eval = [shape](auto x, auto f, auto g) {
      const double gx = 1.0 + x[1];
      f[0] = x[0];
      f[1] = gx * (1.0 - f[0] / gx);
      g[0] = detail::ctp_constraint(f[0], f[1], shape);
    };
  } else {
    throw ConfigError("unknown problem '" + name + "'");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Reference fronts

inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("PEARL_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return PEARL_DATA_DIR;
}

inline std::filesystem::path front_file(const std::string& problem) {
  return data_dir() / "fronts" / (problem + ".csv");
}

// Header `f1,...,fF`, one minimization-sense vector per row.
inline void write_front_csv(std::ostream& os, const std::vector<ObjectiveVector>& front, int nobj) {
  for (int i = 0; i < nobj; ++i) os << (i ? "," : "") << 'f' << (i + 1);
  os << '\n';
  char buf[64];
  for (const auto& p : front) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
}

inline std::vector<ObjectiveVector> read_front_csv(std::istream& is) {
  std::vector<ObjectiveVector> out;
  std::string line;
  if (!std::getline(is, line)) return out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ObjectiveVector row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<ObjectiveVector> load_front_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("reference front file not found: " + path.string());
  return read_front_csv(in);
}

// Evenly spaced subsample (by position) of at most n points.
inline std::vector<ObjectiveVector> subsample(const std::vector<ObjectiveVector>& pts, std::size_t n) {
  if (n >= pts.size()) return pts;
  std::vector<ObjectiveVector> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(pts.front());
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = (i * (pts.size() - 1) + (n - 1) / 2) / (n - 1);
    out.push_back(pts[idx]);
  }
  return out;
}

namespace detail {

// Unit-sphere points of the positive orthant from a simplex lattice, in
// lattice order.
inline std::vector<ObjectiveVector> sphere_lattice(int nobj, std::size_t at_least) {
  const int p = std::max(1, default_divisions(nobj, at_least));
  auto dirs = das_dennis(nobj, p).directions;
  for (auto& d : dirs) {
    double n = 0.0;
    for (double v : d) n += v * v;
    n = std::sqrt(n);
    for (double& v : d) v /= n;
  }
  return dirs;
}

}  // namespace detail

// n_points mutually non-dominated points of the true front, minimization
// sense. Sphere and curve fronts are generated analytically; the rest are read
// from data/fronts/<problem>.csv (see tools/gen_fronts.cpp).
inline std::vector<ObjectiveVector> reference_front(const ProblemSpec& problem, std::size_t n_points) {
  if (n_points == 0) throw UsageError("reference_front: n_points must be positive");
  const int m = problem.nobj;
  switch (problem.front) {
    case FrontSource::sphere:
      return subsample(detail::sphere_lattice(m, n_points), n_points);
    case FrontSource::curve: {
      std::vector<ObjectiveVector> out;
      for (std::size_t i = 0; i < n_points; ++i) {
        const double t = n_points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n_points - 1);
        std::vector<double> theta(m - 1, std::numbers::pi / 4.0);
        theta[0] = t * detail::half_pi;
        ObjectiveVector f(m);
        detail::spherical(theta, 1.0, f);
        out.push_back(std::move(f));
      }
      return out;
    }
    case FrontSource::c2_sphere: {
      std::vector<ObjectiveVector> kept;
      std::size_t want = n_points * 4;
      while (true) {
        kept.clear();
        for (auto& p : detail::sphere_lattice(m, want))
          if (detail::c2_constraint(p) <= 0.0) kept.push_back(std::move(p));
        if (kept.size() >= n_points) break;
        want *= 2;
      }
      return subsample(kept, n_points);
    }
    case FrontSource::c3_ellipsoid: {
      // Scale each direction onto the boundary of the feasible region: the
      // smallest t with t^2 (d_j^2/4 + sum_{i!=j} d_i^2) >= 1 for every j.
      std::vector<ObjectiveVector> pts;
      std::size_t want = n_points * 2;
      while (true) {
        pts.clear();
        for (auto d : detail::sphere_lattice(m, want)) {
          double sumsq = 0.0;
          for (double v : d) sumsq += v * v;
          double t = 0.0;
          for (int j = 0; j < m; ++j) t = std::max(t, 1.0 / std::sqrt(d[j] * d[j] / 4.0 + sumsq - d[j] * d[j]));
          for (double& v : d) v *= t;
          pts.push_back(std::move(d));
        }
        pts = nondominated_min(std::move(pts));
        if (pts.size() >= n_points) break;
        want *= 2;
      }
      return subsample(pts, n_points);
    }
    case FrontSource::file:
      return subsample(load_front_file(front_file(problem.name)), n_points);
  }
  return {};
}

}  // namespace pearl
