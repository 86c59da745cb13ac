#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skillmpc/embed/objective.hpp"
#include "skillmpc/embed/rollout.hpp"

namespace skillmpc {

// Trained networks plus what is needed to rebuild and reproduce them.
struct SkillCheckpoint {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::string env_family;
  SkillModel model;
  int iteration = 0;
  std::uint64_t seed = 0;
};

struct IterationMetrics {
  int iteration = 0;
  std::vector<int> task_episodes;
  std::vector<double> task_return;        // mean undiscounted env return
  std::vector<double> task_final_distance;  // mean goal distance at episode end
  std::vector<double> embedding_entropy;  // H(p(z|t)) per task
  double policy_entropy = 0.0;
  double inference_log_prob = 0.0;
  double inference_loss = 0.0;
  PpoStats ppo;
};

struct TrainHooks {
  std::function<void(const IterationMetrics&)> on_iteration;
  // called with every batch and its augmented rewards before the update
  std::function<void(const RolloutBatch&, const AugmentedRewards&)> on_batch;
};

// collect -> augmented_reward -> ppo_update -> inference_update, repeated for
// config.iterations. Deterministic in (config, family, seed).
SkillCheckpoint train(const EmbedConfig& config, const TaskFamily& family,
                      std::uint64_t seed, const TrainHooks& hooks = {});

// Untrained networks laid out for `family`.
SkillCheckpoint initial_checkpoint(const EmbedConfig& config,
                                   const TaskFamily& family, std::uint64_t seed);

struct TaskEvaluation {
  std::vector<double> mean_return;
  std::vector<double> mean_final_distance;
  std::vector<double> embedding_entropy;
};

// Fresh rollouts (z ~ p(z|t), sampled actions) for every task.
TaskEvaluation evaluate_tasks(const SkillModel& model, const TaskFamily& family,
                              int episodes_per_task, int horizon,
                              std::uint64_t seed);

struct IdentifiabilityReport {
  // log q(z_true|w) > log q(z_other|w) with z_other from one other task
  double pairwise_rate = 0.0;
  // log q(z_true|w) beats a latent from every other task; chance is 1/N
  double all_tasks_rate = 0.0;
  int windows = 0;
};

// Windows come from held-out rollouts: `windows_per_task` episodes per task,
// one uniformly chosen window from each.
IdentifiabilityReport measure_identifiability(const SkillModel& model,
                                              const TaskFamily& family,
                                              int windows_per_task, int horizon,
                                              std::uint64_t seed);

}  // namespace skillmpc
