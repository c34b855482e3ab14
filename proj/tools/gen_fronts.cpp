// Writes data/fronts/<problem>.csv for the problems whose true front has no
// convenient closed form. Two-objective problems are sampled on a dense
// decision grid (feasible points only) and filtered; dtlz7 uses the g = 1
// slice, where a grid point is non-dominated iff its f3 is below every f3 at
// a grid point with smaller-or-equal f1 and f2.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pearl/pareto.hpp"
#include "pearl/problems.hpp"
#include "pearl/rewards.hpp"

namespace {

std::vector<pearl::ObjectiveVector> dtlz7_front(int grid) {
  const auto p = pearl::make_problem("dtlz7");
  std::vector<double> x(p.n_x, 0.0);
  std::vector<std::vector<double>> f3(grid, std::vector<double>(grid));
  std::vector<std::vector<pearl::ObjectiveVector>> pts(grid, std::vector<pearl::ObjectiveVector>(grid));
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      x[0] = static_cast<double>(i) / (grid - 1);
      x[1] = static_cast<double>(j) / (grid - 1);
      pts[i][j] = pearl::evaluate(p, x).f;
      f3[i][j] = pts[i][j][2];
    }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> prefix(grid, std::vector<double>(grid, inf));
  std::vector<pearl::ObjectiveVector> front;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double up = i > 0 ? prefix[i - 1][j] : inf;
      const double left = j > 0 ? prefix[i][j - 1] : inf;
      const double others = std::min(up, left);
      if (f3[i][j] < others) front.push_back(pts[i][j]);
      prefix[i][j] = std::min(others, f3[i][j]);
    }
  return front;
}

std::vector<pearl::ObjectiveVector> grid_front_2d(const std::string& name, int grid) {
  const auto p = pearl::make_problem(name);
  std::vector<pearl::ObjectiveVector> feasible;
  std::vector<double> x(2);
  for (int i = 0; i < grid; ++i) {
    x[0] = static_cast<double>(i) / (grid - 1);
    // Per column keep only the best feasible f2; the full filter runs below.
    pearl::ObjectiveVector best;
    for (int j = 0; j < grid; ++j) {
      x[1] = static_cast<double>(j) / (grid - 1);
      const auto rec = pearl::evaluate(p, x);
      if (pearl::constraint_violation(rec.g) <= 0.0 && (best.empty() || rec.f[1] < best[1])) best = rec.f;
    }
    if (!best.empty()) feasible.push_back(best);
  }
  return pearl::nondominated_min(std::move(feasible));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate sampled reference fronts"};
  std::string out = (pearl::data_dir() / "fronts").string();
  int grid2 = 4001, grid3 = 301;
  std::vector<std::string> which{"dtlz7", "ctp1", "ctp2", "ctp3", "ctp4"};
  app.add_option("--out", out, "output directory");
  app.add_option("--grid-2d", grid2, "grid points per axis for two-objective problems");
  app.add_option("--grid-3d", grid3, "grid points per axis for dtlz7");
  app.add_option("problems", which, "problems to generate");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out);
  for (const auto& name : which) {
    const auto front = name == "dtlz7" ? dtlz7_front(grid3) : grid_front_2d(name, grid2);
    const auto path = std::filesystem::path(out) / (name + ".csv");
    std::ofstream f(path);
    pearl::write_front_csv(f, front, name == "dtlz7" ? 3 : 2);
    std::cout << path.string() << ": " << front.size() << " points\n";
  }
}
