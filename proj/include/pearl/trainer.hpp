#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "pearl/pareto.hpp"
#include "pearl/policy.hpp"
#include "pearl/problems.hpp"
#include "pearl/reward_engine.hpp"
#include "pearl/rewards.hpp"

namespace pearl {

struct TrainerConfig {
  int n_steps = 32;
  int ncores = 8;
  std::size_t budget = 10000;
  double learning_rate = 3e-4;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int epochs = 4;
  int minibatches = 4;
  int hidden = 64;
  double log_std_init = 0.0;
  double max_grad_norm = 0.5;
  bool normalize_advantage = true;
  int resample_period = 0;  // preference resampling period; 0 means n_steps
  int threads = 0;          // rollout threads; 0 means min(ncores, hardware)
  std::uint64_t seed = 0;

  std::size_t batch_size() const { return static_cast<std::size_t>(n_steps) * static_cast<std::size_t>(ncores); }
};

// One evaluation as it appears in the run log.
struct EvaluationRow {
  std::size_t step = 0;
  int worker = 0;
  std::vector<double> x;
  std::vector<double> f;  // minimization sense
  std::vector<double> g;
  double cv = 0.0;
  double reward = 0.0;  // raw, before scaling
  bool failed = false;
};

struct RolloutBatch {
  std::vector<std::vector<double>> obs;
  std::vector<std::vector<double>> actions;  // pre-squash
  std::vector<double> rewards;               // scaled for the update
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<EvaluationRow> rows;

  std::size_t size() const { return rewards.size(); }
};

// Everything a rollout worker owns: its reward engine (archive included),
// its RNG stream and the preference rays it was handed for this batch.
struct RolloutWorker {
  RewardEngine engine;
  std::mt19937_64 rng;
  // rays[t] is the preference set active at local step t of the batch.
  std::vector<std::vector<std::vector<double>>> rays;
};

inline std::vector<double> observation(const RewardConfig& cfg, const std::vector<std::vector<double>>& rays) {
  if (cfg.variant != Variant::envelope) return {1.0};
  std::vector<double> obs;
  for (const auto& r : rays) obs.insert(obs.end(), r.begin(), r.end());
  return obs;
}

inline int observation_dim(const RewardConfig& cfg, int nobj) {
  return cfg.variant == Variant::envelope ? nobj * static_cast<int>(std::max<std::size_t>(cfg.n_rays, 1)) : 1;
}

inline Solution make_solution(const EvaluationRecord& rec, std::span<const double> weights) {
  Solution s;
  s.x = rec.x;
  s.obj = negated(rec.f);
  s.g = rec.g;
  s.cv = constraint_violation(rec.g, weights);
  return s;
}

namespace detail {

struct WorkerOutput {
  std::vector<std::vector<double>> obs, actions;
  std::vector<double> rewards, log_probs, values;
  std::vector<EvaluationRow> rows;
};

inline void run_worker(const PolicyState& policy, const ProblemSpec& problem, const TrainerConfig& cfg,
                       RolloutWorker& worker, int worker_id, std::size_t step_base, WorkerOutput& out) {
  const auto& rcfg = worker.engine.config();
  const std::span<const double> weights(rcfg.constraint.weights);
  const auto log_std = policy.log_std();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> cached_obs;
  std::vector<double> mean;
  double value = 0.0;
  for (int t = 0; t < cfg.n_steps; ++t) {
    const auto& rays = worker.rays[t];
    auto obs = observation(rcfg, rays);
    if (obs != cached_obs || mean.empty()) {
      mean = policy.mean(obs);
      value = policy.value(obs);
      cached_obs = obs;
    }
    std::vector<double> u(mean.size()), x(mean.size());
    for (std::size_t d = 0; d < u.size(); ++d) {
      u[d] = mean[d] + std::exp(log_std[d]) * normal(worker.rng);
      x[d] = std::clamp(logistic(u[d]), problem.lower[d], problem.upper[d]);
    }
    const double lp = gaussian_log_prob(u, mean, log_std);

    EvaluationRow row;
    row.step = step_base + static_cast<std::size_t>(worker_id) * cfg.n_steps + t;
    row.worker = worker_id;
    row.x = x;
    double reward_raw = 0.0;
    try {
      const auto rec = evaluate(problem, x, row.step);
      if (!all_finite(rec.f) || !all_finite(rec.g)) throw std::runtime_error("non-finite evaluation");
      const Solution s = make_solution(rec, weights);
      reward_raw = worker.engine(s, rays).reward;
      row.f = rec.f;
      row.g = rec.g;
      row.cv = s.cv;
    } catch (const std::exception&) {
      reward_raw = worker.engine.failure_reward();
      row.f.assign(problem.nobj, std::numeric_limits<double>::quiet_NaN());
      row.g.assign(problem.n_constraints, std::numeric_limits<double>::quiet_NaN());
      row.cv = std::numeric_limits<double>::quiet_NaN();
      row.failed = true;
    }
    row.reward = reward_raw;

    out.obs.push_back(std::move(obs));
    out.actions.push_back(std::move(u));
    out.rewards.push_back(reward_raw * worker.engine.reward_scale());
    out.log_probs.push_back(lp);
    out.values.push_back(value);
    out.rows.push_back(std::move(row));
  }
}

}  // namespace detail

// Every worker draws n_steps actions from the (frozen) policy, evaluates them
// and scores them with its own reward engine. Workers run concurrently; the
// batch is assembled in worker order so the result does not depend on
// scheduling.
inline RolloutBatch rollout(const PolicyState& policy, std::vector<RolloutWorker>& workers, const ProblemSpec& problem,
                            const TrainerConfig& cfg, std::size_t step_base) {
  std::vector<detail::WorkerOutput> outs(workers.size());
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int nthreads = std::min<int>(cfg.threads > 0 ? cfg.threads : hw, static_cast<int>(workers.size()));
  auto work = [&](int first, int stride) {
    for (int w = first; w < static_cast<int>(workers.size()); w += stride)
      detail::run_worker(policy, problem, cfg, workers[w], w, step_base, outs[w]);
  };
  if (nthreads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t, nthreads);
  }

  RolloutBatch batch;
  for (auto& o : outs) {
    std::move(o.obs.begin(), o.obs.end(), std::back_inserter(batch.obs));
    std::move(o.actions.begin(), o.actions.end(), std::back_inserter(batch.actions));
    batch.rewards.insert(batch.rewards.end(), o.rewards.begin(), o.rewards.end());
    batch.log_probs.insert(batch.log_probs.end(), o.log_probs.begin(), o.log_probs.end());
    batch.values.insert(batch.values.end(), o.values.begin(), o.values.end());
    std::move(o.rows.begin(), o.rows.end(), std::back_inserter(batch.rows));
  }
  return batch;
}

struct UpdateStats {
  LossTerms last;
  bool skipped = false;
};

// Several epochs of minibatch Adam steps on the clipped-surrogate loss.
// Horizon is one step, so the return is the reward and the advantage is
// reward - V(s). A non-finite loss or parameter skips the rest of the update,
// restores the parameters and halves the learning rate.
template <class Rng>
UpdateStats update(PolicyState& policy, const RolloutBatch& batch, const TrainerConfig& cfg, Rng& rng) {
  const std::size_t n = batch.size();
  if (n == 0) throw UsageError("update: empty batch");
  LossBatch full;
  full.obs = batch.obs;
  full.actions = batch.actions;
  full.old_log_prob = batch.log_probs;
  full.returns = batch.rewards;
  full.advantages.resize(n);
  for (std::size_t i = 0; i < n; ++i) full.advantages[i] = batch.rewards[i] - batch.values[i];
  if (cfg.normalize_advantage && n > 1) {
    const double mu = std::accumulate(full.advantages.begin(), full.advantages.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double a : full.advantages) var += (a - mu) * (a - mu);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (double& a : full.advantages) a = (a - mu) / (sd + 1e-8);
  }

  const LossWeights weights{cfg.clip, cfg.entropy_coef, cfg.value_coef};
  const std::vector<double> backup = policy.params;
  const auto backup_m = policy.m, backup_v = policy.v;
  const long backup_step = policy.step;
  UpdateStats stats;
  const std::size_t nmb = static_cast<std::size_t>(std::max(1, cfg.minibatches));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t mb = 0; mb < nmb; ++mb) {
      const std::size_t lo = mb * n / nmb, hi = (mb + 1) * n / nmb;
      if (lo == hi) continue;
      LossBatch part;
      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t i = idx[k];
        part.obs.push_back(full.obs[i]);
        part.actions.push_back(full.actions[i]);
        part.old_log_prob.push_back(full.old_log_prob[i]);
        part.advantages.push_back(full.advantages[i]);
        part.returns.push_back(full.returns[i]);
      }
      stats.last = ppo_loss(policy, policy.params, part, weights, &grad);
      const bool finite_grad = all_finite(grad);
      if (!std::isfinite(stats.last.total) || !finite_grad) {
        stats.skipped = true;
        break;
      }
      adam_step(policy, grad, cfg.max_grad_norm);
      if (!all_finite(policy.params)) {
        stats.skipped = true;
        break;
      }
    }
    if (stats.skipped) break;
  }
  if (stats.skipped) {
    policy.params = backup;
    policy.m = backup_m;
    policy.v = backup_v;
    policy.step = backup_step;
    policy.learning_rate *= 0.5;
    std::cerr << "warning: non-finite loss, update skipped; learning rate halved to " << policy.learning_rate
              << '\n';
  }
  return stats;
}

struct RunResult {
  std::vector<EvaluationRow> log;
  // Merged non-dominated front across worker archives (feasible members
  // only), minimization sense.
  std::vector<ObjectiveVector> front;
  std::size_t rounds = 0;
  std::size_t evaluations = 0;
};

inline std::vector<ObjectiveVector> merge_archives(const std::vector<const ParetoArchive*>& archives) {
  std::vector<ObjectiveVector> pts;
  for (const auto* a : archives)
    for (const auto& m : a->members())
      if (m.feasible()) pts.push_back(negated(m.obj));
  return nondominated_min(std::move(pts));
}

// Non-dominated front of every feasible evaluation in a log.
inline std::vector<ObjectiveVector> front_of_log(const std::vector<EvaluationRow>& log, double cv_tol = 0.0) {
  std::vector<ObjectiveVector> pts;
  for (const auto& r : log)
    if (!r.failed && r.cv <= cv_tol) pts.push_back(r.f);
  return nondominated_min(std::move(pts));
}

// Rays for one worker's next batch. `active` carries the current set across
// batches; a fresh set is drawn at every multiple of `period` local steps.
template <class Rng>
std::vector<std::vector<std::vector<double>>> schedule_rays(std::vector<std::vector<double>>& active,
                                                            const std::vector<double>& alpha, std::size_t n_rays,
                                                            int period, int n_steps, std::size_t round, Rng& rng) {
  std::vector<std::vector<std::vector<double>>> rays(n_steps);
  for (int t = 0; t < n_steps; ++t) {
    const std::size_t local = round * n_steps + t;
    if (active.empty() || local % period == 0) active = sample_preferences(alpha, n_rays, rng);
    rays[t] = active;
  }
  return rays;
}

using RoundCallback = std::function<void(std::size_t round, const UpdateStats&)>;

// Alternates rollout and update until the evaluation budget is spent.
inline RunResult train(const ProblemSpec& problem, const RewardConfig& rcfg, const TrainerConfig& cfg,
                       const RoundCallback& on_round = {}) {
  const std::size_t batch = cfg.batch_size();
  if (cfg.n_steps < 1 || cfg.ncores < 1) throw UsageError("train: n_steps and ncores must be positive");
  if (cfg.budget < batch) throw UsageError("train: budget is smaller than one batch (n_steps x ncores)");
  const std::size_t rounds = cfg.budget / batch;

  std::mt19937_64 trainer_rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 17);
  std::mt19937_64 init_rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 29);
  std::vector<double> alpha = rcfg.alpha.empty() ? std::vector<double>(problem.nobj, 1.0) : rcfg.alpha;
  if (rcfg.variant == Variant::envelope && static_cast<int>(alpha.size()) != problem.nobj)
    throw UsageError("train: alpha must have one entry per objective");

  PolicyState policy =
      make_policy(observation_dim(rcfg, problem.nobj), problem.n_x, cfg.hidden, cfg.log_std_init, init_rng);
  policy.learning_rate = cfg.learning_rate;

  std::vector<RolloutWorker> workers;
  for (int w = 0; w < cfg.ncores; ++w)
    workers.push_back(RolloutWorker{RewardEngine(rcfg, problem.nobj),
                                    std::mt19937_64(cfg.seed * 0x9E3779B97F4A7C15ULL + 1000003ULL * (w + 1)),
                                    {}});

  const int period = cfg.resample_period > 0 ? cfg.resample_period : cfg.n_steps;
  const std::size_t n_rays = std::max<std::size_t>(rcfg.n_rays, 1);
  std::vector<std::vector<std::vector<double>>> active(cfg.ncores);

  RunResult result;
  result.rounds = rounds;
  for (std::size_t round = 0; round < rounds; ++round) {
    // Preference rays are drawn here, on the trainer thread, and handed to
    // the workers before the batch starts.
    if (rcfg.variant == Variant::envelope)
      for (int w = 0; w < cfg.ncores; ++w)
        workers[w].rays = schedule_rays(active[w], alpha, n_rays, period, cfg.n_steps, round, trainer_rng);
    else
      for (auto& wk : workers) wk.rays.assign(cfg.n_steps, {});
    auto b = rollout(policy, workers, problem, cfg, round * batch);
    const auto stats = update(policy, b, cfg, trainer_rng);
    if (on_round) on_round(round, stats);
    std::move(b.rows.begin(), b.rows.end(), std::back_inserter(result.log));
  }
  result.evaluations = result.log.size();
  std::vector<const ParetoArchive*> archives;
  for (const auto& w : workers) archives.push_back(&w.engine.archive());
  result.front = merge_archives(archives);
  return result;
}

}  // namespace pearl
