#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "pearl/indicators.hpp"
#include "pearl/nsga.hpp"
#include "pearl/problems.hpp"
#include "pearl/stats.hpp"
#include "pearl/trainer.hpp"

namespace pearl {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int config_version = 1;

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

// Reads keys from one JSON object and remembers which were used so that
// leftovers can be reported by their full path.
class KeyReader {
public:
  KeyReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!obj_.contains(key)) return fallback;
    return required<T>(key);
  }

  template <class T>
  T required(const std::string& key) {
    if (!obj_.contains(key)) throw ConfigError("missing key '" + where(key) + "'");
    seen_.insert(key);
    try {
      const json& v = obj_.at(key);
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>)
          if (v.get<double>() < 0) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("invalid value for key '" + where(key) + "'");
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + where(it.key()) + "'");
  }

private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("invalid value for key '" + key + "': " + what);
}

}  // namespace detail

struct AlgorithmSpec {
  std::string label;  // output directory name and metric-CSV algorithm column
  std::string name;
  bool genetic = false;
  GAKind ga_kind = GAKind::nsga2;
  GAConfig ga;
  RewardConfig reward;
  TrainerConfig trainer;
};

struct ExperimentConfig {
  json source;  // the parsed input, echoed verbatim into every summary
  std::vector<std::string> problems;
  int n_x = 0;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t budget = 10000;
  int n_steps = 32;
  int ncores = 8;
  std::uint64_t base_seed = 0;
  std::size_t n_seeds = 1;
  fs::path output;
  std::optional<std::vector<double>> ref_point;
  std::size_t reference_points = 1000;

  std::uint64_t seed(std::size_t index) const { return base_seed + index; }
};

namespace detail {

inline void parse_trainer(const json& j, const std::string& path, TrainerConfig& t) {
  KeyReader r(j, path);
  t.learning_rate = r.get("lr", t.learning_rate);
  t.clip = r.get("clip", t.clip);
  t.entropy_coef = r.get("ent_coef", t.entropy_coef);
  t.value_coef = r.get("vf_coef", t.value_coef);
  t.epochs = r.get("epochs", t.epochs);
  t.minibatches = r.get("minibatches", t.minibatches);
  t.hidden = r.get("hidden", t.hidden);
  t.log_std_init = r.get("log_std_init", t.log_std_init);
  t.max_grad_norm = r.get("max_grad_norm", t.max_grad_norm);
  t.normalize_advantage = r.get("normalize_advantage", t.normalize_advantage);
  t.resample_period = r.get("resample_period", t.resample_period);
  t.threads = r.get("threads", t.threads);
  r.finish();
  require(t.learning_rate > 0.0, r.where("lr"), "must be positive");
  require(t.clip >= 0.0, r.where("clip"), "must be nonnegative");
  require(t.epochs >= 1, r.where("epochs"), "must be at least 1");
  require(t.minibatches >= 1, r.where("minibatches"), "must be at least 1");
  require(t.hidden >= 1, r.where("hidden"), "must be at least 1");
  require(t.resample_period >= 0, r.where("resample_period"), "must be nonnegative");
}

// Keys shared by every learned variant; `r` must already be positioned on
// the algorithm object.
inline void parse_reward_keys(KeyReader& r, const std::string& name, RewardConfig& rc, TrainerConfig& tc) {
  rc.kappa = r.get<std::size_t>("kappa", rc.kappa);
  require(rc.kappa >= 1, r.where("kappa"), "must be at least 1");
  if (name == "pearl-e") {
    rc.variant = Variant::envelope;
    rc.alpha = r.get("alpha", rc.alpha);
    for (double a : rc.alpha) require(a > 0.0, r.where("alpha"), "components must be positive");
    rc.uniformity.lambda = r.get("lambda", rc.uniformity.lambda);
    const auto u = r.get<std::string>("uniformity", "cosine");
    require(u == "cosine" || u == "kl", r.where("uniformity"), "expected 'cosine' or 'kl'");
    rc.uniformity.kind = u == "kl" ? UniformityKind::kl : UniformityKind::cosine;
    rc.uniformity.normalized_obj = r.get("normalized_obj", rc.uniformity.normalized_obj);
    rc.n_rays = r.get<std::size_t>("n_rays", rc.n_rays);
    require(rc.n_rays >= 1, r.where("n_rays"), "must be at least 1");
  } else if (name == "pearl-eps") {
    rc.variant = Variant::epsilon;
    rc.nu = r.get("nu", rc.nu);
    require(rc.nu > 0.0, r.where("nu"), "must be positive");
  } else if (name == "pearl-nds") {
    rc.variant = Variant::nds;
    const auto k = r.get<std::string>("ranker", "crowding");
    require(k == "crowding" || k == "niching", r.where("ranker"), "expected 'crowding' or 'niching'");
    rc.ranker = k == "niching" ? DensityKind::niching : DensityKind::crowding;
    rc.divisions = r.get("divisions", rc.divisions);
  } else {
    throw ConfigError("invalid value for key '" + r.where("name") + "': unknown algorithm '" + name + "'");
  }
  if (r.has("trainer")) parse_trainer(r.raw("trainer"), r.where("trainer"), tc);
}

inline AlgorithmSpec parse_algorithm(const json& j, const std::string& path, const ExperimentConfig& cfg) {
  KeyReader r(j, path);
  AlgorithmSpec a;
  a.name = r.required<std::string>("name");
  a.label = r.get<std::string>("label", a.name);
  require(!a.label.empty() && a.label.find('/') == std::string::npos, r.where("label"), "must be a plain name");
  a.trainer.budget = cfg.budget;
  a.trainer.n_steps = cfg.n_steps;
  a.trainer.ncores = cfg.ncores;

  if (a.name == "nsga2" || a.name == "nsga3") {
    a.genetic = true;
    a.ga_kind = a.name == "nsga2" ? GAKind::nsga2 : GAKind::nsga3;
    a.ga.budget = cfg.budget;
    a.ga.mu = r.get<std::size_t>("pop", a.ga.mu);
    a.ga.lambda_ = r.get<std::size_t>("lambda", a.ga.mu);
    a.ga.mutpb = r.get("mutpb", a.ga.mutpb);
    a.ga.cxpb = r.get("cxpb", a.ga.cxpb);
    a.ga.blend_alpha = r.get("blend_alpha", a.ga.blend_alpha);
    a.ga.mutation_sigma = r.get("sigma", a.ga.mutation_sigma);
    a.ga.indpb = r.get("indpb", a.ga.indpb);
    if (a.ga_kind == GAKind::nsga3) {
      a.ga.constrained = r.get("constrained", false);
      a.ga.divisions = r.get("divisions", 0);
    }
    a.ga.constraint_weights = r.get("gammas", std::vector<double>{});
    r.finish();
    try {
      a.ga.validate();
    } catch (const UsageError& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return a;
  }

  if (a.name == "c-pearl") {
    const json& inner = r.raw("inner");
    KeyReader ir(inner, r.where("inner"));
    const auto inner_name = ir.required<std::string>("name");
    parse_reward_keys(ir, inner_name, a.reward, a.trainer);
    ir.finish();
    a.reward.constrained = true;
    const auto mode = r.get<std::string>("mode", "distance-cl");
    require(mode == "distance-cl" || mode == "rank2", r.where("mode"), "expected 'distance-cl' or 'rank2'");
    a.reward.constraint.mode = mode == "rank2" ? ConstraintMode::rank2 : ConstraintMode::distance_cl;
    a.reward.constraint.weights = r.get("gammas", std::vector<double>{});
    a.reward.constraint.bonus = r.get("M", -1.0);
    if (r.has("trainer")) parse_trainer(r.raw("trainer"), r.where("trainer"), a.trainer);
    r.finish();
    if (a.reward.constraint.mode == ConstraintMode::rank2 && a.reward.variant != Variant::nds)
      throw ConfigError("invalid value for key '" + r.where("mode") + "': rank2 needs a pearl-nds inner reward");
    return a;
  }

  parse_reward_keys(r, a.name, a.reward, a.trainer);
  r.finish();
  return a;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  detail::KeyReader r(j, "");
  ExperimentConfig cfg;
  cfg.source = j;
  const int version = r.required<int>("version");
  if (version != config_version)
    throw ConfigError("invalid value for key 'version': expected " + std::to_string(config_version));

  if (r.has("problem") == r.has("problems")) throw ConfigError("exactly one of keys 'problem' or 'problems' is required");
  if (r.has("problem"))
    cfg.problems = {r.required<std::string>("problem")};
  else
    cfg.problems = r.required<std::vector<std::string>>("problems");
  detail::require(!cfg.problems.empty(), "problems", "must not be empty");
  cfg.n_x = r.get("n_x", 0);
  for (std::size_t i = 0; i < cfg.problems.size(); ++i) {
    try {
      make_problem(cfg.problems[i], cfg.n_x);
    } catch (const ConfigError& e) {
      throw ConfigError("invalid value for key '" + std::string(r.has("problem") ? "problem" : "problems") + "': " +
                        e.what());
    }
  }

  cfg.budget = r.get<std::size_t>("budget", cfg.budget);
  cfg.n_steps = r.get("n_steps", cfg.n_steps);
  cfg.ncores = r.get("ncores", cfg.ncores);
  detail::require(cfg.n_steps >= 1, "n_steps", "must be at least 1");
  detail::require(cfg.ncores >= 1, "ncores", "must be at least 1");
  cfg.base_seed = r.get<std::uint64_t>("base_seed", cfg.base_seed);
  cfg.n_seeds = r.get<std::size_t>("n_seeds", cfg.n_seeds);
  detail::require(cfg.n_seeds >= 1, "n_seeds", "must be at least 1");
  cfg.output = r.required<std::string>("output");
  if (r.has("ref_point")) cfg.ref_point = r.required<std::vector<double>>("ref_point");
  cfg.reference_points = r.get<std::size_t>("reference_points", cfg.reference_points);
  detail::require(cfg.reference_points >= 1, "reference_points", "must be at least 1");

  const json& algos = r.raw("algorithms");
  if (!algos.is_array() || algos.empty()) throw ConfigError("invalid value for key 'algorithms': expected a non-empty list");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < algos.size(); ++i) {
    auto a = detail::parse_algorithm(algos[i], "algorithms[" + std::to_string(i) + "]", cfg);
    if (!labels.insert(a.label).second)
      throw ConfigError("invalid value for key 'algorithms[" + std::to_string(i) + "].label': duplicate label '" +
                        a.label + "'");
    if (!a.genetic && cfg.budget < a.trainer.batch_size())
      throw ConfigError("invalid value for key 'budget': smaller than n_steps x ncores");
    cfg.algorithms.push_back(std::move(a));
  }
  r.finish();

  for (const auto& name : cfg.problems) {
    const auto p = make_problem(name, cfg.n_x);
    if (cfg.ref_point && static_cast<int>(cfg.ref_point->size()) != p.nobj)
      throw ConfigError("invalid value for key 'ref_point': problem '" + name + "' has " + std::to_string(p.nobj) +
                        " objectives");
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
      const auto& a = cfg.algorithms[i];
      const std::string at = "algorithms[" + std::to_string(i) + "]";
      if (!a.genetic && a.reward.variant == Variant::envelope && !a.reward.alpha.empty() &&
          static_cast<int>(a.reward.alpha.size()) != p.nobj)
        throw ConfigError("invalid value for key '" + at + ".alpha': expected one entry per objective of '" + name +
                          "'");
      const auto& gammas = a.genetic ? a.ga.constraint_weights : a.reward.constraint.weights;
      if (!gammas.empty() && static_cast<int>(gammas.size()) != p.n_constraints)
        throw ConfigError("invalid value for key '" + at + ".gammas': expected one entry per constraint of '" + name +
                          "'");
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Output

inline fs::path output_root() {
  if (const char* env = std::getenv("PEARL_OUTPUT_ROOT"); env != nullptr && *env != '\0') return env;
  return fs::current_path();
}

inline fs::path resolve_output(const fs::path& p) { return p.is_absolute() ? p : output_root() / p; }

// Header: step,worker,x1..,f1..,g1..,cv,reward
inline void write_evaluation_log(std::ostream& os, const std::vector<EvaluationRow>& rows, int n_x, int nobj,
                                 int ncons) {
  os << "step,worker";
  for (int i = 1; i <= n_x; ++i) os << ",x" << i;
  for (int i = 1; i <= nobj; ++i) os << ",f" << i;
  for (int i = 1; i <= ncons; ++i) os << ",g" << i;
  os << ",cv,reward\n";
  for (const auto& r : rows) {
    os << r.step << ',' << r.worker;
    for (double v : r.x) os << ',' << format_double(v);
    for (double v : r.f) os << ',' << format_double(v);
    for (double v : r.g) os << ',' << format_double(v);
    os << ',' << format_double(r.cv) << ',' << format_double(r.reward) << '\n';
  }
}

struct CellResult {
  std::string problem, algorithm;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  fs::path dir;
  bool ok = false;
  std::string error;
  std::vector<ObjectiveVector> front;
  std::size_t evaluations = 0;
  double seconds = 0.0;
};

inline std::string run_id(const std::string& problem, const std::string& algorithm, std::uint64_t seed) {
  return problem + "/" + algorithm + "/seed_" + std::to_string(seed);
}

// Runs one (problem, algorithm, seed) cell and writes its log and front.
inline RunResult run_cell(const ExperimentConfig& cfg, const AlgorithmSpec& algo, const ProblemSpec& problem,
                          std::uint64_t seed) {
  if (algo.genetic) {
    GAConfig ga = algo.ga;
    ga.seed = seed;
    return run_ga(problem, ga, algo.ga_kind);
  }
  TrainerConfig tc = algo.trainer;
  tc.seed = seed;
  tc.budget = cfg.budget;
  return train(problem, algo.reward, tc);
}

struct RunOptions {
  bool force = false;
  int parallel_cells = 1;
  std::ostream* log = &std::cerr;
};

struct RunReport {
  std::vector<CellResult> cells;
  std::vector<MetricReport> metrics;
  int exit_code = 0;
};

// Executes every problem x algorithm x seed cell. Layout:
//   <output>/<problem>/<algorithm>/seed_<s>/{evaluations.csv,front.csv,summary.json}
//   <output>/metrics.csv
// A cell that throws leaves a FAILED file with the message next to whatever
// it already wrote; the other cells still run.
inline RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  const fs::path out = resolve_output(cfg.output);
  if (fs::exists(out) && !fs::is_empty(out)) {
    if (!opt.force) throw ConfigError("output directory " + out.string() + " already exists; use --force to overwrite");
    fs::remove_all(out);
  }
  fs::create_directories(out);

  RunReport report;
  for (const auto& p : cfg.problems)
    for (const auto& a : cfg.algorithms)
      for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
        CellResult c;
        c.problem = p;
        c.algorithm = a.label;
        c.seed_index = s;
        c.seed = cfg.seed(s);
        c.dir = out / p / a.label / ("seed_" + std::to_string(c.seed));
        report.cells.push_back(std::move(c));
      }

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < report.cells.size(); i = next++) {
      auto& c = report.cells[i];
      const auto* algo = &*std::find_if(cfg.algorithms.begin(), cfg.algorithms.end(),
                                        [&](const AlgorithmSpec& a) { return a.label == c.algorithm; });
      const auto t0 = std::chrono::steady_clock::now();
      try {
        fs::create_directories(c.dir);
        const auto problem = make_problem(c.problem, cfg.n_x);
        const auto res = run_cell(cfg, *algo, problem, c.seed);
        {
          std::ofstream f(c.dir / "evaluations.csv");
          write_evaluation_log(f, res.log, problem.n_x, problem.nobj, problem.n_constraints);
        }
        {
          std::ofstream f(c.dir / "front.csv");
          write_front_csv(f, res.front, problem.nobj);
        }
        c.front = res.front;
        c.evaluations = res.evaluations;
        c.ok = true;
      } catch (const std::exception& e) {
        c.error = e.what();
        std::ofstream(c.dir / "FAILED") << c.error << '\n';
      }
      c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard lock(log_mutex);
      if (opt.log) {
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.1f", c.seconds);
        *opt.log << (c.ok ? "done   " : "FAILED ") << run_id(c.problem, c.algorithm, c.seed) << " (" << secs << " s)"
                 << (c.ok ? "" : ": " + c.error) << '\n';
      }
    }
  };
  const int nthreads = std::max(1, opt.parallel_cells);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  // Metrics need every algorithm's front for the same (problem, seed).
  std::map<std::string, std::vector<ObjectiveVector>> ref_fronts;
  for (const auto& p : cfg.problems) ref_fronts[p] = reference_front(make_problem(p, cfg.n_x), cfg.reference_points);
  std::ofstream metrics_csv(out / "metrics.csv");
  metrics_csv << metric_csv_header() << '\n';
  for (const auto& p : cfg.problems) {
    const auto problem = make_problem(p, cfg.n_x);
    const auto ref = cfg.ref_point.value_or(problem.nadir);
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
      std::map<std::string, std::vector<ObjectiveVector>> fronts;
      for (const auto& c : report.cells)
        if (c.ok && c.problem == p && c.seed_index == s) fronts[c.algorithm] = c.front;
      if (fronts.empty()) continue;
      const auto card = cardinality_metrics(fronts);
      for (auto& c : report.cells) {
        if (!c.ok || c.problem != p || c.seed_index != s) continue;
        MetricReport m;
        m.run_id = run_id(c.problem, c.algorithm, c.seed);
        m.algorithm = c.algorithm;
        m.problem = c.problem;
        m.hv = hypervolume(c.front, ref);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        m.gd = c.front.empty() ? nan : gd(c.front, ref_fronts[p]);
        m.igd = c.front.empty() ? nan : igd(c.front, ref_fronts[p]);
        m.eps_plus = c.front.empty() ? nan : additive_epsilon(c.front, ref_fronts[p]);
        m.i_c = card.at(c.algorithm).i_c;
        m.c_metric = card.at(c.algorithm).c_metric;
        write_metric_row(metrics_csv, m);

        json summary;
        summary["config"] = cfg.source;
        summary["cell"] = {{"problem", c.problem}, {"algorithm", c.algorithm}, {"seed", c.seed},
                           {"seed_index", c.seed_index}};
        summary["evaluations"] = c.evaluations;
        summary["front_size"] = c.front.size();
        summary["wall_seconds"] = c.seconds;
        summary["metrics"] = {{"hv", m.hv},       {"gd", m.gd},   {"igd", m.igd},
                              {"eps", m.eps_plus}, {"i_c", m.i_c}, {"c_metric", m.c_metric}};
        std::ofstream(c.dir / "summary.json") << summary.dump(2) << '\n';
        report.metrics.push_back(std::move(m));
      }
    }
  }
  const bool any_failed = std::any_of(report.cells.begin(), report.cells.end(), [](const CellResult& c) { return !c.ok; });
  report.exit_code = any_failed ? 1 : 0;
  return report;
}

// ---------------------------------------------------------------------------
// Reading results back

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<MetricReport> read_metric_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metric file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != metric_csv_header()) throw ConfigError("unexpected header in " + path.string());
  std::vector<MetricReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 9) throw ConfigError("malformed row in " + path.string() + ": " + line);
    MetricReport m;
    m.run_id = c[0];
    m.algorithm = c[1];
    m.problem = c[2];
    m.hv = std::stod(c[3]);
    m.gd = std::stod(c[4]);
    m.igd = std::stod(c[5]);
    m.eps_plus = std::stod(c[6]);
    m.i_c = std::stoul(c[7]);
    m.c_metric = std::stod(c[8]);
    rows.push_back(std::move(m));
  }
  return rows;
}

// Merged non-dominated front of every front.csv at or below `dir`.
inline std::vector<ObjectiveVector> merged_front(const fs::path& dir) {
  std::vector<ObjectiveVector> pts;
  if (fs::is_regular_file(dir / "front.csv")) {
    pts = load_front_file(dir / "front.csv");
  } else {
    if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file() && e.path().filename() == "front.csv") files.push_back(e.path());
    if (files.empty()) throw ConfigError("no front.csv under " + dir.string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto part = load_front_file(f);
      pts.insert(pts.end(), part.begin(), part.end());
    }
  }
  return nondominated_min(std::move(pts));
}

// ---------------------------------------------------------------------------
// Comparison

struct CompareRow {
  std::string problem, algorithm;
  std::uint64_t seed = 0;
  MetricReport metrics;
};

struct ProblemComparison {
  std::string problem;
  std::vector<std::string> algorithms;
  std::vector<std::uint64_t> seeds;
  std::vector<CompareRow> rows;  // recomputed against the combined fronts
  std::optional<FriedmanResult> friedman;
  std::optional<NemenyiResult> nemenyi;
  std::vector<std::string> warnings;
};

struct CompareReport {
  std::vector<ProblemComparison> problems;
};

inline std::uint64_t seed_from_run_id(const std::string& id) {
  const auto pos = id.rfind("/seed_");
  if (pos == std::string::npos) throw ConfigError("run id without a seed component: " + id);
  return std::stoull(id.substr(pos + 6));
}

// Pools metric CSVs from run directories, rebuilds per-(problem, seed)
// combined reference fronts from the stored front.csv files, recomputes
// i_c, c_metric, eps, gd and igd against them, and tests HV differences with
// Friedman + Nemenyi.
inline CompareReport compare_runs(const std::vector<fs::path>& dirs, double alpha, std::ostream* warn = &std::cerr) {
  struct Entry {
    MetricReport m;
    std::uint64_t seed;
    fs::path front;
  };
  std::map<std::string, std::map<std::string, std::map<std::uint64_t, Entry>>> by_problem;
  for (const auto& d : dirs) {
    for (auto& m : read_metric_csv(d / "metrics.csv")) {
      const auto seed = seed_from_run_id(m.run_id);
      auto& slot = by_problem[m.problem][m.algorithm];
      if (slot.count(seed)) throw ConfigError("duplicate cell " + m.run_id + " across run directories");
      const auto front = d / m.run_id / "front.csv";
      slot[seed] = Entry{m, seed, front};
    }
  }

  CompareReport report;
  for (auto& [problem, algos] : by_problem) {
    ProblemComparison pc;
    pc.problem = problem;
    std::set<std::uint64_t> all_seeds;
    for (const auto& [a, seeds] : algos) {
      pc.algorithms.push_back(a);
      for (const auto& [s, e] : seeds) all_seeds.insert(s);
    }
    std::vector<std::string> missing;
    for (const auto& [a, seeds] : algos)
      for (auto s : all_seeds)
        if (!seeds.count(s)) missing.push_back(run_id(problem, a, s));
    if (!missing.empty()) {
      std::string msg = "mismatched seed sets; missing cells:";
      for (const auto& m : missing) msg += " " + m;
      throw ConfigError(msg);
    }
    if (pc.algorithms.size() < 2) throw ConfigError("compare: problem '" + problem + "' has fewer than 2 algorithms");
    pc.seeds.assign(all_seeds.begin(), all_seeds.end());

    for (auto s : pc.seeds) {
      std::map<std::string, std::vector<ObjectiveVector>> fronts;
      for (const auto& [a, seeds] : algos) fronts[a] = load_front_file(seeds.at(s).front);
      std::vector<ObjectiveVector> all;
      for (const auto& [a, f] : fronts) all.insert(all.end(), f.begin(), f.end());
      const auto z = nondominated_min(std::move(all));
      const auto card = cardinality_metrics(fronts);
      for (const auto& [a, seeds] : algos) {
        CompareRow row{problem, a, s, seeds.at(s).m};
        const auto& f = fronts[a];
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.metrics.gd = f.empty() || z.empty() ? nan : gd(f, z);
        row.metrics.igd = f.empty() || z.empty() ? nan : igd(f, z);
        row.metrics.eps_plus = f.empty() || z.empty() ? nan : additive_epsilon(f, z);
        row.metrics.i_c = card.at(a).i_c;
        row.metrics.c_metric = card.at(a).c_metric;
        pc.rows.push_back(std::move(row));
      }
    }

    if (pc.seeds.size() < 2) {
      pc.warnings.push_back("problem '" + problem + "': only one seed, statistics skipped");
    } else {
      RankMatrix rm;
      for (auto s : pc.seeds) {
        std::vector<double> block;
        for (const auto& a : pc.algorithms) block.push_back(algos.at(a).at(s).m.hv);
        rm.values.push_back(std::move(block));
      }
      pc.friedman = friedman(rm);
      if (pc.algorithms.size() <= 10)
        pc.nemenyi = nemenyi(rm, alpha);
      else
        pc.warnings.push_back("problem '" + problem + "': more than 10 algorithms, Nemenyi test skipped");
    }
    if (warn)
      for (const auto& w : pc.warnings) *warn << "warning: " << w << '\n';
    report.problems.push_back(std::move(pc));
  }
  return report;
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

// One table per problem: metrics as rows, algorithms as columns, cells
// "mean/std" over seeds; followed by the Friedman result and the Nemenyi
// p-value matrix.
inline void print_comparison(std::ostream& os, const CompareReport& report) {
  const std::vector<std::pair<std::string, double MetricReport::*>> real_metrics{
      {"hv", &MetricReport::hv}, {"gd", &MetricReport::gd}, {"igd", &MetricReport::igd},
      {"eps", &MetricReport::eps_plus}, {"c_metric", &MetricReport::c_metric}};
  char buf[128];
  for (const auto& pc : report.problems) {
    os << "problem " << pc.problem << " (" << pc.seeds.size() << " seeds)\n";
    os << "metric";
    for (const auto& a : pc.algorithms) os << " | " << a;
    os << '\n';
    auto column = [&](const std::string& a, auto getter) {
      std::vector<double> v;
      for (const auto& r : pc.rows)
        if (r.algorithm == a) v.push_back(getter(r.metrics));
      return mean_std(v);
    };
    for (const auto& [name, member] : real_metrics) {
      os << name;
      for (const auto& a : pc.algorithms) {
        const auto [mu, sd] = column(a, [&](const MetricReport& m) { return m.*member; });
        std::snprintf(buf, sizeof buf, " | %.4g/%.2g", mu, sd);
        os << buf;
      }
      os << '\n';
    }
    os << "i_c";
    for (const auto& a : pc.algorithms) {
      const auto [mu, sd] = column(a, [](const MetricReport& m) { return static_cast<double>(m.i_c); });
      std::snprintf(buf, sizeof buf, " | %.4g/%.2g", mu, sd);
      os << buf;
    }
    os << '\n';
    if (pc.friedman) {
      std::snprintf(buf, sizeof buf, "friedman chi2 = %.4g, p = %.3g\n", pc.friedman->statistic, pc.friedman->p_value);
      os << buf;
    }
    if (pc.nemenyi) {
      std::snprintf(buf, sizeof buf, "nemenyi CD = %.4g\n", pc.nemenyi->critical_difference);
      os << buf;
      for (std::size_t i = 0; i < pc.algorithms.size(); ++i) {
        os << pc.algorithms[i];
        for (std::size_t j = 0; j < pc.algorithms.size(); ++j) {
          std::snprintf(buf, sizeof buf, " %.3g%s", pc.nemenyi->p_values[i][j], pc.nemenyi->significant[i][j] ? "*" : "");
          os << buf;
        }
        os << '\n';
      }
    }
    os << '\n';
  }
}

// comparison_metrics.csv, and significance_<problem>.csv per tested problem.
inline void write_comparison(const fs::path& dir, const CompareReport& report) {
  fs::create_directories(dir);
  std::ofstream m(dir / "comparison_metrics.csv");
  m << metric_csv_header() << '\n';
  for (const auto& pc : report.problems)
    for (const auto& r : pc.rows) write_metric_row(m, r.metrics);
  for (const auto& pc : report.problems) {
    if (!pc.nemenyi) continue;
    std::ofstream s(dir / ("significance_" + pc.problem + ".csv"));
    s << "algorithm";
    for (const auto& a : pc.algorithms) s << ',' << a;
    s << '\n';
    for (std::size_t i = 0; i < pc.algorithms.size(); ++i) {
      s << pc.algorithms[i];
      for (std::size_t j = 0; j < pc.algorithms.size(); ++j) s << ',' << format_double(pc.nemenyi->p_values[i][j]);
      s << '\n';
    }
  }
}

}  // namespace pearl
