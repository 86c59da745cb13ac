#include "skillmpc/embed/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "skillmpc/errors.hpp"

namespace skillmpc {

AugmentedRewards augmented_reward(const RolloutBatch& batch,
                                  const SkillModel& model) {
  const EmbedConfig& cfg = model.config;
  const Eigen::Index window_size =
      static_cast<Eigen::Index>(model.obs_dim) * cfg.window_len;

  AugmentedRewards out;
  for (int t = 0; t < cfg.n_tasks; ++t) {
    out.mean_embedding_entropy += gaussian_entropy(model.embedding_dist(t));
  }
  out.mean_embedding_entropy /= cfg.n_tasks;

  int steps = 0;
  out.per_step.reserve(batch.episodes.size());
  for (const EpisodeRecord& ep : batch.episodes) {
    std::vector<double> r(static_cast<std::size_t>(ep.length()));
    for (int i = 0; i < ep.length(); ++i) {
      const auto si = static_cast<std::size_t>(i);
      if (ep.windows.size() != ep.rewards.size() ||
          ep.windows[si].size() != window_size) {
        throw ContractViolation("augmented_reward: window length mismatch");
      }
      double value = ep.rewards[si];
      if (cfg.alpha1 != 0.0) value += cfg.alpha1 * out.mean_embedding_entropy;
      if (cfg.alpha2 != 0.0 || cfg.alpha3 != 0.0) {
        const double log_q =
            gaussian_log_prob(model.inference_dist(ep.windows[si]), ep.z);
        const double h_pi =
            gaussian_entropy(model.policy_dist(ep.states[si], ep.z));
        value += cfg.alpha2 * log_q + cfg.alpha3 * h_pi;
        out.mean_inference_log_prob += log_q;
        out.mean_policy_entropy += h_pi;
      }
      r[si] = value;
      ++steps;
    }
    out.per_step.push_back(std::move(r));
  }
  if (steps > 0) {
    out.mean_inference_log_prob /= steps;
    out.mean_policy_entropy /= steps;
  }
  return out;
}

std::vector<std::vector<double>> compute_advantages(
    const RolloutBatch& batch, const std::vector<std::vector<double>>& rewards,
    double gamma) {
  const std::size_t n = batch.episodes.size();
  if (rewards.size() != n) {
    throw ContractViolation("compute_advantages: reward/episode count mismatch");
  }
  std::vector<std::vector<double>> returns(n);
  int max_task = 0;
  std::size_t max_len = 0;
  for (std::size_t e = 0; e < n; ++e) {
    const auto& r = rewards[e];
    if (static_cast<int>(r.size()) != batch.episodes[e].length()) {
      throw ContractViolation("compute_advantages: reward length mismatch");
    }
    returns[e].resize(r.size());
    double g = 0.0;
    for (std::size_t i = r.size(); i-- > 0;) {
      g = r[i] + gamma * g;
      returns[e][i] = g;
    }
    max_task = std::max(max_task, batch.episodes[e].task);
    max_len = std::max(max_len, r.size());
  }

  // baseline: per task, per step index
  const auto tasks = static_cast<std::size_t>(max_task + 1);
  std::vector<std::vector<double>> sum(tasks, std::vector<double>(max_len, 0.0));
  std::vector<std::vector<int>> count(tasks, std::vector<int>(max_len, 0));
  for (std::size_t e = 0; e < n; ++e) {
    const auto t = static_cast<std::size_t>(batch.episodes[e].task);
    for (std::size_t i = 0; i < returns[e].size(); ++i) {
      sum[t][i] += returns[e][i];
      count[t][i] += 1;
    }
  }
  double sq = 0.0;
  int m = 0;
  for (std::size_t e = 0; e < n; ++e) {
    const auto t = static_cast<std::size_t>(batch.episodes[e].task);
    for (std::size_t i = 0; i < returns[e].size(); ++i) {
      returns[e][i] -= sum[t][i] / count[t][i];
      sq += returns[e][i] * returns[e][i];
      ++m;
    }
  }
  const double rms = m > 0 ? std::sqrt(sq / m) : 0.0;
  if (rms > 1e-12) {
    for (auto& adv : returns) {
      for (double& a : adv) a /= rms;
    }
  }
  return returns;
}

PpoStats ppo_update(SkillModel& model, OptimizerState& policy_opt,
                    OptimizerState& embedding_opt, const RolloutBatch& batch,
                    const AugmentedRewards& rewards, const EmbedConfig& config,
                    Rng& rng) {
  const auto advantages = compute_advantages(batch, rewards.per_step, config.gamma);

  struct StepRef {
    int episode;
    int step;
  };
  std::vector<StepRef> steps;
  steps.reserve(static_cast<std::size_t>(batch.total_steps()));
  for (int e = 0; e < static_cast<int>(batch.episodes.size()); ++e) {
    for (int i = 0; i < batch.episodes[static_cast<std::size_t>(e)].length(); ++i) {
      steps.push_back({e, i});
    }
  }

  const double lo = 1.0 - config.clip_ratio;
  const double hi = 1.0 + config.clip_ratio;
  // d(-clipped surrogate)/d(log ratio), zero on the clipped branch
  auto surrogate_coeff = [&](double ratio, double adv, bool& active) {
    active = !((adv >= 0.0 && ratio > hi) || (adv < 0.0 && ratio < lo));
    return active ? -ratio * adv : 0.0;
  };

  PpoStats stats;
  MlpParams policy_grad = model.policy.zeros_like();
  MlpParams embed_grad = model.embedding.zeros_like();

  for (int epoch = 0; epoch < config.ppo_epochs; ++epoch) {
    std::shuffle(steps.begin(), steps.end(), rng.engine());
    double epoch_surrogate = 0.0;
    int clipped = 0;
    double kl = 0.0;

    // policy: one term per step
    for (std::size_t start = 0; start < steps.size();
         start += static_cast<std::size_t>(config.minibatch_size)) {
      const std::size_t stop =
          std::min(steps.size(), start + static_cast<std::size_t>(config.minibatch_size));
      const double inv_m = 1.0 / static_cast<double>(stop - start);
      policy_grad.set_zero();
      double surrogate = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const EpisodeRecord& ep = batch.episodes[static_cast<std::size_t>(steps[k].episode)];
        const auto i = static_cast<std::size_t>(steps[k].step);
        const double adv = advantages[static_cast<std::size_t>(steps[k].episode)][i];
        const Vec input = model.policy_input(ep.states[i], ep.z);
        const DiagGaussian pi = mlp_forward(model.policy, input);

        const double log_ratio = gaussian_log_prob(pi, ep.actions[i]) - ep.log_probs[i];
        const double ratio = std::exp(log_ratio);
        surrogate += std::min(ratio * adv, std::clamp(ratio, lo, hi) * adv);
        kl -= log_ratio;
        bool active = true;
        const double coeff = surrogate_coeff(ratio, adv, active) * inv_m;
        if (!active) ++clipped;

        GaussianGrad up = log_prob_grad(pi, ep.actions[i]) * coeff;
        if (config.alpha3 != 0.0) up += entropy_grad(pi) * (-config.alpha3 * inv_m);
        if (coeff != 0.0 || config.alpha3 != 0.0) {
          backprop_accumulate(model.policy, input, up, policy_grad);
        }
      }
      if (!std::isfinite(surrogate)) {
        throw NumericalError("ppo_update: non-finite policy surrogate at epoch " +
                             std::to_string(epoch));
      }
      epoch_surrogate += surrogate;
      clip_grad_norm(policy_grad, config.max_grad_norm);
      adam_step(policy_opt, model.policy, policy_grad);
      ++stats.updates;
    }

    // embedding: one term per episode, the latent being chosen once at step 0
    {
      const int n_tasks = config.n_tasks;
      std::vector<DiagGaussian> embed;
      std::vector<GaussianGrad> up;
      for (int t = 0; t < n_tasks; ++t) {
        embed.push_back(model.embedding_dist(t));
        up.push_back(GaussianGrad::zeros(config.latent_dim));
      }
      const double inv_e = 1.0 / static_cast<double>(std::max<std::size_t>(batch.episodes.size(), 1));
      double surrogate = 0.0;
      for (std::size_t e = 0; e < batch.episodes.size(); ++e) {
        const EpisodeRecord& ep = batch.episodes[e];
        if (ep.length() == 0) continue;
        const auto t = static_cast<std::size_t>(ep.task);
        const double adv = advantages[e][0];
        const double ratio = std::exp(gaussian_log_prob(embed[t], ep.z) - ep.z_log_prob);
        surrogate += std::min(ratio * adv, std::clamp(ratio, lo, hi) * adv);
        bool active = true;
        const double coeff = surrogate_coeff(ratio, adv, active) * inv_e;
        if (coeff != 0.0) up[t] += log_prob_grad(embed[t], ep.z) * coeff;
      }
      if (!std::isfinite(surrogate)) {
        throw NumericalError("ppo_update: non-finite embedding surrogate at epoch " +
                             std::to_string(epoch));
      }
      embed_grad.set_zero();
      for (int t = 0; t < n_tasks; ++t) {
        auto& u = up[static_cast<std::size_t>(t)];
        if (config.alpha1 != 0.0) {
          u += entropy_grad(embed[static_cast<std::size_t>(t)]) * (-config.alpha1 / n_tasks);
        }
        if (u.d_mean.isZero(0.0) && u.d_log_std.isZero(0.0)) continue;
        backprop_accumulate(model.embedding, model.one_hot(t), u, embed_grad);
      }
      clip_grad_norm(embed_grad, config.max_grad_norm);
      adam_step(embedding_opt, model.embedding, embed_grad);
    }

    const double n = static_cast<double>(std::max<std::size_t>(steps.size(), 1));
    stats.surrogate = epoch_surrogate / n;
    stats.clip_fraction = clipped / n;
    stats.approx_kl = kl / n;
  }
  return stats;
}

std::vector<LatentExample> inference_dataset(const RolloutBatch& batch) {
  std::vector<LatentExample> data;
  data.reserve(static_cast<std::size_t>(batch.total_steps()));
  for (const EpisodeRecord& ep : batch.episodes) {
    for (const Vec& w : ep.windows) data.push_back({w, ep.z});
  }
  return data;
}

double inference_loss(const MlpParams& inference,
                      const std::vector<LatentExample>& data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : data) {
    total -= gaussian_log_prob(mlp_forward(inference, ex.window), ex.z);
  }
  return total / static_cast<double>(data.size());
}

double inference_update(MlpParams& inference, OptimizerState& opt,
                        const std::vector<LatentExample>& data, int epochs,
                        int minibatch_size, double max_grad_norm, Rng& rng) {
  const double before = inference_loss(inference, data);
  if (data.empty()) return before;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  MlpParams grad = inference.zeros_like();
  const auto mb = static_cast<std::size_t>(std::max(minibatch_size, 1));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t stop = std::min(order.size(), start + mb);
      const double inv_m = 1.0 / static_cast<double>(stop - start);
      grad.set_zero();
      for (std::size_t k = start; k < stop; ++k) {
        const LatentExample& ex = data[order[k]];
        const DiagGaussian q = mlp_forward(inference, ex.window);
        backprop_accumulate(inference, ex.window, log_prob_grad(q, ex.z) * (-inv_m), grad);
      }
      clip_grad_norm(grad, max_grad_norm);
      adam_step(opt, inference, grad);
    }
  }
  return before;
}

}  // namespace skillmpc
