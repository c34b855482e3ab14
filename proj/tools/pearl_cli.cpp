#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pearl/experiment.hpp"

namespace {

int run_command(const std::string& config, bool force, int parallel) {
  const auto cfg = pearl::load_config(config);
  pearl::RunOptions opt;
  opt.force = force;
  opt.parallel_cells = parallel;
  const auto report = pearl::run_experiment(cfg, opt);
  std::cerr << "metrics: " << (pearl::resolve_output(cfg.output) / "metrics.csv").string() << '\n';
  return report.exit_code;
}

int compare_command(const std::vector<std::string>& dirs, double alpha, const std::string& out) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const auto report = pearl::compare_runs(paths, alpha);
  pearl::print_comparison(std::cout, report);
  if (!out.empty()) pearl::write_comparison(out, report);
  return 0;
}

int front_command(const std::string& dir) {
  const auto front = pearl::merged_front(dir);
  if (front.empty()) return 0;
  pearl::write_front_csv(std::cout, front, static_cast<int>(front[0].size()));
  return 0;
}

int ref_front_command(const std::string& problem, std::size_t n) {
  const auto p = pearl::make_problem(problem);
  pearl::write_front_csv(std::cout, pearl::reference_front(p, n), p.nobj);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective policy optimization experiments"};
  app.require_subcommand(1);

  std::string config;
  bool force = false;
  int parallel = 1;
  auto* run = app.add_subcommand("run", "run every cell of an experiment config");
  run->add_option("config", config, "experiment config (JSON)")->required();
  run->add_flag("--force", force, "overwrite an existing output directory");
  run->add_option("--parallel-cells", parallel, "cells to run concurrently")->check(CLI::PositiveNumber);

  std::vector<std::string> dirs;
  double alpha = 0.05;
  std::string out;
  auto* compare = app.add_subcommand("compare", "compare algorithms across run directories");
  compare->add_option("dirs", dirs, "run output directories")->required();
  compare->add_option("--alpha", alpha, "Nemenyi significance level (0.05 to 0.1)");
  compare->add_option("--out", out, "directory for comparison CSVs");

  std::string run_dir;
  auto* front = app.add_subcommand("front", "print the merged non-dominated front of a run directory");
  front->add_option("run-dir", run_dir)->required();

  std::string problem;
  std::size_t n = 1000;
  auto* ref = app.add_subcommand("ref-front", "print points of a problem's true front");
  ref->add_option("problem", problem)->required();
  ref->add_option("-n", n, "number of points")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config, force, parallel);
    if (*compare) return compare_command(dirs, alpha, out);
    if (*front) return front_command(run_dir);
    if (*ref) return ref_front_command(problem, n);
  } catch (const pearl::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pearl::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
