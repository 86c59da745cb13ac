#pragma once

#include <vector>

#include "skillmpc/embed/rollout.hpp"
#include "skillmpc/numerics/adam.hpp"

namespace skillmpc {

// Per-step augmented reward
//   r_hat_i = a1 * mean_t H(p(z|t)) + a2 * log q(z | s_i^H)
//           + a3 * H(pi(.|s_i, z)) + r^t(s_i, a_i)
// evaluated with the networks frozen as passed in.
struct AugmentedRewards {
  std::vector<std::vector<double>> per_step;  // [episode][step]
  double mean_embedding_entropy = 0.0;
  double mean_inference_log_prob = 0.0;
  double mean_policy_entropy = 0.0;
};

AugmentedRewards augmented_reward(const RolloutBatch& batch,
                                  const SkillModel& model);

// Discounted reward-to-go minus the per-task, per-step-index batch mean,
// scaled to unit RMS over the batch. All-zero input stays all-zero.
std::vector<std::vector<double>> compute_advantages(
    const RolloutBatch& batch, const std::vector<std::vector<double>>& rewards,
    double gamma);

struct PpoStats {
  double surrogate = 0.0;  // mean clipped surrogate over the last epoch
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int updates = 0;
};

// Clipped-surrogate ascent. The policy gets one term per step with ratio
// pi(a|s,z) / pi_old(a|s,z) (minibatched). The embedding gets one term per
// episode with ratio p(z|t) / p_old(z|t) and the episode's step-0 advantage,
// one Adam step per epoch, since the latent is chosen once per episode.
// Entropy bonuses (a1 on the embedding, a3 on the policy) enter the loss
// directly. Throws NumericalError on a non-finite loss.
PpoStats ppo_update(SkillModel& model, OptimizerState& policy_opt,
                    OptimizerState& embedding_opt, const RolloutBatch& batch,
                    const AugmentedRewards& rewards, const EmbedConfig& config,
                    Rng& rng);

// Supervised sample for the inference network.
struct LatentExample {
  Vec window;
  Vec z;
};

std::vector<LatentExample> inference_dataset(const RolloutBatch& batch);

// Mean Gaussian cross-entropy -log q(z | window) over the data.
double inference_loss(const MlpParams& inference,
                      const std::vector<LatentExample>& data);

// Minibatch descent on inference_loss; touches only `inference`. Returns the
// loss measured before the update.
double inference_update(MlpParams& inference, OptimizerState& opt,
                        const std::vector<LatentExample>& data, int epochs,
                        int minibatch_size, double max_grad_norm, Rng& rng);

}  // namespace skillmpc
