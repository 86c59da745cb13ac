#pragma once

#include <vector>

#include "skillmpc/embed/skill_model.hpp"
#include "skillmpc/embed/task_family.hpp"

namespace skillmpc {

// One rollout under a single task id and a single latent.
struct EpisodeRecord {
  int task = 0;
  Vec z;
  double z_log_prob = 0.0;  // log p(z | task) under the behavior embedding

  std::vector<Vec> states;     // s_i, observed before action i
  std::vector<Vec> actions;    // policy-space actions
  std::vector<double> rewards;  // r^t(s_i, a_i)
  std::vector<double> log_probs;  // behavior log pi(a_i | s_i, z)
  std::vector<Vec> windows;    // s_i^H, see make_window
  Vec final_obs;

  int length() const { return static_cast<int>(actions.size()); }
};

struct RolloutBatch {
  std::vector<EpisodeRecord> episodes;

  int total_steps() const;
};

// Uniform task id in [0, n_tasks).
int sample_task(Rng& rng, int n_tasks);

struct RolloutOptions {
  int horizon = 100;
  bool mean_actions = false;
};

// Resets `env`, samples z ~ p(z|task) once and runs the policy for the
// horizon with that latent held fixed.
EpisodeRecord collect_rollout(const SkillModel& model, Environment& env,
                              const TaskFamily& family, int task, Rng& rng,
                              const RolloutOptions& options);

// Same, with a caller-chosen latent (z_log_prob is evaluated under the task
// embedding all the same).
EpisodeRecord collect_rollout_with_latent(const SkillModel& model,
                                          Environment& env,
                                          const TaskFamily& family, int task,
                                          const Vec& z, Rng& rng,
                                          const RolloutOptions& options);

// Batch of independent episodes; episode e uses rng stream `rng.child(e)`.
RolloutBatch collect_batch(const SkillModel& model, const TaskFamily& family,
                           int episodes, const Rng& rng,
                           const RolloutOptions& options, int threads = 1);

}  // namespace skillmpc
