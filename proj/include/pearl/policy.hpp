#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "pearl/types.hpp"

namespace pearl {

// Fully connected tanh network over a slice of a flat parameter vector.
// Layout per layer: weights (out x in, row-major) then biases.
class Mlp {
public:
  Mlp() = default;
  Mlp(std::vector<int> sizes, std::size_t offset) : sizes_(std::move(sizes)), offset_(offset) {}

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) n += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
    return n;
  }
  std::size_t offset() const noexcept { return offset_; }
  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  std::size_t layers() const { return sizes_.size() - 1; }

  // Activations of every layer (input first); the last layer is linear.
  std::vector<std::vector<double>> forward(std::span<const double> params, std::span<const double> in) const {
    std::vector<std::vector<double>> acts;
    acts.emplace_back(in.begin(), in.end());
    std::size_t off = offset_;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const int nin = sizes_[l], nout = sizes_[l + 1];
      const double* w = params.data() + off;
      const double* b = w + static_cast<std::size_t>(nout) * nin;
      std::vector<double> out(nout);
      const auto& prev = acts.back();
      for (int o = 0; o < nout; ++o) {
        double s = b[o];
        const double* row = w + static_cast<std::size_t>(o) * nin;
        for (int i = 0; i < nin; ++i) s += row[i] * prev[i];
        out[o] = (l + 2 < sizes_.size()) ? std::tanh(s) : s;
      }
      off += static_cast<std::size_t>(nout) * (nin + 1);
      acts.push_back(std::move(out));
    }
    return acts;
  }

  // Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
  void backward(std::span<const double> params, const std::vector<std::vector<double>>& acts,
                std::span<const double> dout, std::span<double> grad) const {
    std::vector<std::size_t> offs;
    std::size_t off = offset_;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      offs.push_back(off);
      off += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
    }
    std::vector<double> delta(dout.begin(), dout.end());
    for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
      const int nin = sizes_[l], nout = sizes_[l + 1];
      const double* w = params.data() + offs[l];
      double* gw = grad.data() + offs[l];
      double* gb = gw + static_cast<std::size_t>(nout) * nin;
      const auto& prev = acts[l];
      std::vector<double> dprev(nin, 0.0);
      for (int o = 0; o < nout; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        gb[o] += d;
        double* grow = gw + static_cast<std::size_t>(o) * nin;
        const double* row = w + static_cast<std::size_t>(o) * nin;
        for (int i = 0; i < nin; ++i) {
          grow[i] += d * prev[i];
          dprev[i] += d * row[i];
        }
      }
      if (l == 0) break;
      // prev is a tanh output: d tanh = 1 - tanh^2
      for (int i = 0; i < nin; ++i) dprev[i] *= 1.0 - prev[i] * prev[i];
      delta = std::move(dprev);
    }
  }

  template <class Rng>
  void initialize(std::span<double> params, Rng& rng, double output_gain) const {
    std::size_t off = offset_;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const int nin = sizes_[l], nout = sizes_[l + 1];
      const bool last = l + 2 == sizes_.size();
      const double gain = last ? output_gain : std::sqrt(2.0);
      std::normal_distribution<double> normal(0.0, gain / std::sqrt(static_cast<double>(nin)));
      for (std::size_t k = 0; k < static_cast<std::size_t>(nout) * nin; ++k) params[off + k] = normal(rng);
      for (int o = 0; o < nout; ++o) params[off + static_cast<std::size_t>(nout) * nin + o] = 0.0;
      off += static_cast<std::size_t>(nout) * (nin + 1);
    }
  }

private:
  std::vector<int> sizes_;
  std::size_t offset_ = 0;
};

inline constexpr double log_std_min = -5.0;
inline constexpr double log_std_max = 2.0;

inline double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Gaussian policy over pre-squash actions u (x = logistic(u) lies in the unit
// box), with a state-independent per-dimension log-std and a separate value
// network. All parameters share one flat vector so the optimizer and the
// gradient check see a single array.
struct PolicyState {
  Mlp actor;
  Mlp critic;
  std::size_t log_std_offset = 0;
  std::vector<double> params;
  // Adam moments and step count
  std::vector<double> m, v;
  long step = 0;
  double learning_rate = 3e-4;

  int obs_dim() const { return actor.inputs(); }
  int act_dim() const { return actor.outputs(); }

  std::span<const double> log_std() const {
    return std::span<const double>(params).subspan(log_std_offset, static_cast<std::size_t>(act_dim()));
  }

  std::vector<double> mean(std::span<const double> obs) const { return actor.forward(params, obs).back(); }
  double value(std::span<const double> obs) const { return critic.forward(params, obs).back()[0]; }

  void clamp_log_std() {
    for (int d = 0; d < act_dim(); ++d) {
      double& ls = params[log_std_offset + d];
      ls = std::clamp(ls, log_std_min, log_std_max);
    }
  }
};

template <class Rng>
PolicyState make_policy(int obs_dim, int act_dim, int hidden, double log_std_init, Rng& rng) {
  if (obs_dim < 1 || act_dim < 1 || hidden < 1) throw UsageError("make_policy: dimensions must be positive");
  PolicyState p;
  p.actor = Mlp({obs_dim, hidden, hidden, act_dim}, 0);
  p.critic = Mlp({obs_dim, hidden, hidden, 1}, p.actor.parameter_count());
  p.log_std_offset = p.actor.parameter_count() + p.critic.parameter_count();
  p.params.assign(p.log_std_offset + act_dim, 0.0);
  p.actor.initialize(p.params, rng, 0.01);
  p.critic.initialize(p.params, rng, 1.0);
  for (int d = 0; d < act_dim; ++d) p.params[p.log_std_offset + d] = log_std_init;
  p.clamp_log_std();
  p.m.assign(p.params.size(), 0.0);
  p.v.assign(p.params.size(), 0.0);
  return p;
}

inline double gaussian_log_prob(std::span<const double> u, std::span<const double> mean, std::span<const double> log_std) {
  constexpr double half_log_2pi = 0.91893853320467274178;
  double lp = 0.0;
  for (std::size_t d = 0; d < u.size(); ++d) {
    const double z = (u[d] - mean[d]) * std::exp(-log_std[d]);
    lp += -0.5 * z * z - log_std[d] - half_log_2pi;
  }
  return lp;
}

inline double gaussian_entropy(std::span<const double> log_std) {
  constexpr double half_log_2pi_e = 1.41893853320467274178;
  double h = 0.0;
  for (double ls : log_std) h += ls + half_log_2pi_e;
  return h;
}

struct LossWeights {
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
};

// Inputs of one clipped-surrogate loss evaluation.
struct LossBatch {
  std::vector<std::vector<double>> obs;
  std::vector<std::vector<double>> actions;  // pre-squash u
  std::vector<double> old_log_prob;
  std::vector<double> advantages;
  std::vector<double> returns;
};

struct LossTerms {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

// Clipped surrogate + value MSE - entropy bonus, averaged over the batch.
// Fills `grad` (resized to the parameter count) with the exact gradient.
// The surrogate passes gradient when the ratio is strictly inside the clip
// interval or the unclipped term is strictly smaller; at a tie on the
// boundary it is treated as clipped.
inline LossTerms ppo_loss(const PolicyState& policy, std::span<const double> params, const LossBatch& batch,
                          const LossWeights& w, std::vector<double>* grad) {
  const std::size_t n = batch.obs.size();
  if (n == 0) throw UsageError("ppo_loss: empty batch");
  const int act = policy.act_dim();
  const std::span<const double> log_std = params.subspan(policy.log_std_offset, static_cast<std::size_t>(act));
  if (grad) grad->assign(params.size(), 0.0);

  LossTerms terms;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> dmean(act), dlogstd_acc(act, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto acts = policy.actor.forward(params, batch.obs[i]);
    const auto& mean = acts.back();
    const double lp = gaussian_log_prob(batch.actions[i], mean, log_std);
    const double ratio = std::exp(lp - batch.old_log_prob[i]);
    const double adv = batch.advantages[i];
    const double clipped = std::clamp(ratio, 1.0 - w.clip, 1.0 + w.clip);
    const double unclipped_term = ratio * adv;
    const double clipped_term = clipped * adv;
    terms.policy -= std::min(unclipped_term, clipped_term) * inv_n;

    const bool inside = ratio > 1.0 - w.clip && ratio < 1.0 + w.clip;
    const bool active = inside || unclipped_term < clipped_term;
    // d(-surr/n)/d(log_prob)
    const double dlp = active ? -adv * ratio * inv_n : 0.0;

    const auto vacts = policy.critic.forward(params, batch.obs[i]);
    const double vpred = vacts.back()[0];
    const double verr = vpred - batch.returns[i];
    terms.value += verr * verr * inv_n;

    if (grad) {
      if (dlp != 0.0) {
        for (int d = 0; d < act; ++d) {
          const double inv_var = std::exp(-2.0 * log_std[d]);
          const double diff = batch.actions[i][d] - mean[d];
          dmean[d] = dlp * diff * inv_var;
          dlogstd_acc[d] += dlp * (diff * diff * inv_var - 1.0);
        }
        policy.actor.backward(params, acts, dmean, *grad);
      }
      const double dv = w.value_coef * 2.0 * verr * inv_n;
      const double dvout[1] = {dv};
      policy.critic.backward(params, vacts, dvout, *grad);
    }
  }
  terms.entropy = gaussian_entropy(log_std);
  terms.total = terms.policy + w.value_coef * terms.value - w.entropy_coef * terms.entropy;
  if (grad)
    for (int d = 0; d < act; ++d) (*grad)[policy.log_std_offset + d] += dlogstd_acc[d] - w.entropy_coef;
  return terms;
}

// One Adam step (eps = 1e-5) with optional global-norm gradient clipping.
inline void adam_step(PolicyState& policy, std::vector<double> grad, double max_grad_norm) {
  if (max_grad_norm > 0.0) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_grad_norm)
      for (double& g : grad) g *= max_grad_norm / norm;
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-5;
  ++policy.step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(policy.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(policy.step));
  for (std::size_t k = 0; k < policy.params.size(); ++k) {
    policy.m[k] = beta1 * policy.m[k] + (1.0 - beta1) * grad[k];
    policy.v[k] = beta2 * policy.v[k] + (1.0 - beta2) * grad[k] * grad[k];
    const double mhat = policy.m[k] / c1;
    const double vhat = policy.v[k] / c2;
    policy.params[k] -= policy.learning_rate * mhat / (std::sqrt(vhat) + eps);
  }
  policy.clamp_log_std();
}

}  // namespace pearl
