#include "skillmpc/embed/rollout.hpp"

#include "skillmpc/errors.hpp"
#include "skillmpc/parallel.hpp"

namespace skillmpc {

int RolloutBatch::total_steps() const {
  int n = 0;
  for (const auto& e : episodes) n += e.length();
  return n;
}

int sample_task(Rng& rng, int n_tasks) { return rng.uniform_int(n_tasks); }

EpisodeRecord collect_rollout_with_latent(const SkillModel& model,
                                          Environment& env,
                                          const TaskFamily& family, int task,
                                          const Vec& z, Rng& rng,
                                          const RolloutOptions& options) {
  if (z.size() != model.config.latent_dim) {
    throw ContractViolation("collect_rollout: latent has wrong dimension");
  }
  EpisodeRecord ep;
  ep.task = task;
  ep.z = z;
  ep.z_log_prob = gaussian_log_prob(model.embedding_dist(task), z);

  const auto n = static_cast<std::size_t>(options.horizon);
  ep.states.reserve(n);
  ep.actions.reserve(n);
  ep.rewards.reserve(n);
  ep.log_probs.reserve(n);

  Vec obs = family.reset(env, rng);
  for (int i = 0; i < options.horizon; ++i) {
    const DiagGaussian pi = model.policy_dist(obs, z);
    Vec a = options.mean_actions ? pi.mean : gaussian_sample(pi, rng);
    const Vec env_action = model.to_env_action(a);
    Vec next = env.step(env_action);
    ep.states.push_back(obs);
    ep.rewards.push_back(family.reward(task, next, env_action));
    ep.log_probs.push_back(gaussian_log_prob(pi, a));
    ep.actions.push_back(std::move(a));
    obs = std::move(next);
  }
  ep.final_obs = obs;
  ep.windows.reserve(n);
  for (int i = 0; i < ep.length(); ++i) {
    ep.windows.push_back(make_window(ep.states, i, model.config.window_len,
                                     model.config.obs_scale));
  }
  return ep;
}

EpisodeRecord collect_rollout(const SkillModel& model, Environment& env,
                              const TaskFamily& family, int task, Rng& rng,
                              const RolloutOptions& options) {
  const Vec z = gaussian_sample(model.embedding_dist(task), rng);
  return collect_rollout_with_latent(model, env, family, task, z, rng, options);
}

RolloutBatch collect_batch(const SkillModel& model, const TaskFamily& family,
                           int episodes, const Rng& rng,
                           const RolloutOptions& options, int threads) {
  RolloutBatch batch;
  batch.episodes.resize(static_cast<std::size_t>(episodes));
  parallel_for(episodes, threads, [&](int e) {
    Rng ep_rng = rng.child(static_cast<std::uint64_t>(e));
    const int task = sample_task(ep_rng, family.n_tasks());
    auto env = family.make_env();
    batch.episodes[static_cast<std::size_t>(e)] =
        collect_rollout(model, *env, family, task, ep_rng, options);
  });
  return batch;
}

}  // namespace skillmpc
