#include "skillmpc/embed/trainer.hpp"

#include "skillmpc/errors.hpp"

namespace skillmpc {
namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kUpdateStream = 0x9e11;

}  // namespace

SkillCheckpoint initial_checkpoint(const EmbedConfig& config,
                                   const TaskFamily& family, std::uint64_t seed) {
  config.validate();
  if (config.n_tasks != family.n_tasks()) {
    throw ConfigError("n_tasks", "n_tasks does not match the number of goals");
  }
  const auto env = family.make_env();
  Rng init_rng = Rng(seed).child(kInitStream);
  SkillCheckpoint ckpt;
  ckpt.env_family = family.name();
  ckpt.model = SkillModel::init(config, env->obs_dim(), env->action_dim(),
                                env->action_cap(), init_rng);
  ckpt.seed = seed;
  return ckpt;
}

SkillCheckpoint train(const EmbedConfig& config, const TaskFamily& family,
                      std::uint64_t seed, const TrainHooks& hooks) {
  SkillCheckpoint ckpt = initial_checkpoint(config, family, seed);
  SkillModel& model = ckpt.model;

  AdamOptions policy_opts, embed_opts, infer_opts;
  policy_opts.learning_rate = config.lr_policy;
  embed_opts.learning_rate = config.lr_embedding;
  infer_opts.learning_rate = config.lr_inference;
  OptimizerState policy_opt = OptimizerState::fresh(model.policy, policy_opts);
  OptimizerState embed_opt = OptimizerState::fresh(model.embedding, embed_opts);
  OptimizerState infer_opt = OptimizerState::fresh(model.inference, infer_opts);

  RolloutOptions rollout;
  rollout.horizon = config.episode_horizon;
  const Rng root(seed);

  for (int it = 0; it < config.iterations; ++it) {
    const Rng iter_rng = root.child(static_cast<std::uint64_t>(it));
    const RolloutBatch batch = collect_batch(model, family, config.episodes_per_iteration,
                                             iter_rng, rollout, config.threads);
    const AugmentedRewards rewards = augmented_reward(batch, model);
    if (hooks.on_batch) hooks.on_batch(batch, rewards);

    if (config.lr_anneal) {
      const double frac = 1.0 - static_cast<double>(it) / config.iterations;
      policy_opt.options.learning_rate = config.lr_policy * frac;
      embed_opt.options.learning_rate = config.lr_embedding * frac;
    }
    Rng update_rng = iter_rng.child(kUpdateStream);
    const PpoStats ppo =
        ppo_update(model, policy_opt, embed_opt, batch, rewards, config, update_rng);
    const auto data = inference_dataset(batch);
    const double inf_loss =
        inference_update(model.inference, infer_opt, data, config.inference_epochs,
                         config.minibatch_size, config.max_grad_norm, update_rng);
    ckpt.iteration = it + 1;

    if (hooks.on_iteration) {
      IterationMetrics m;
      m.iteration = it + 1;
      const auto n = static_cast<std::size_t>(config.n_tasks);
      m.task_episodes.assign(n, 0);
      m.task_return.assign(n, 0.0);
      m.task_final_distance.assign(n, 0.0);
      for (const auto& ep : batch.episodes) {
        const auto t = static_cast<std::size_t>(ep.task);
        m.task_episodes[t] += 1;
        for (double r : ep.rewards) m.task_return[t] += r;
        m.task_final_distance[t] += family.goal_distance(ep.task, ep.final_obs);
      }
      for (std::size_t t = 0; t < n; ++t) {
        if (m.task_episodes[t] > 0) {
          m.task_return[t] /= m.task_episodes[t];
          m.task_final_distance[t] /= m.task_episodes[t];
        }
        m.embedding_entropy.push_back(
            gaussian_entropy(model.embedding_dist(static_cast<int>(t))));
      }
      m.policy_entropy = rewards.mean_policy_entropy;
      m.inference_log_prob = rewards.mean_inference_log_prob;
      m.inference_loss = inf_loss;
      m.ppo = ppo;
      hooks.on_iteration(m);
    }
  }
  return ckpt;
}

TaskEvaluation evaluate_tasks(const SkillModel& model, const TaskFamily& family,
                              int episodes_per_task, int horizon,
                              std::uint64_t seed) {
  TaskEvaluation out;
  RolloutOptions opts;
  opts.horizon = horizon;
  const Rng root(seed);
  for (int t = 0; t < family.n_tasks(); ++t) {
    double ret = 0.0, fin = 0.0;
    for (int e = 0; e < episodes_per_task; ++e) {
      Rng rng = root.child(static_cast<std::uint64_t>(t) * 100003u + static_cast<std::uint64_t>(e));
      auto env = family.make_env();
      const EpisodeRecord ep = collect_rollout(model, *env, family, t, rng, opts);
      for (double r : ep.rewards) ret += r;
      fin += family.goal_distance(t, ep.final_obs);
    }
    out.mean_return.push_back(ret / episodes_per_task);
    out.mean_final_distance.push_back(fin / episodes_per_task);
    out.embedding_entropy.push_back(gaussian_entropy(model.embedding_dist(t)));
  }
  return out;
}

IdentifiabilityReport measure_identifiability(const SkillModel& model,
                                              const TaskFamily& family,
                                              int windows_per_task, int horizon,
                                              std::uint64_t seed) {
  const int n = family.n_tasks();
  if (n < 2) throw ContractViolation("identifiability needs at least two tasks");
  IdentifiabilityReport rep;
  RolloutOptions opts;
  opts.horizon = horizon;
  int pair_wins = 0, all_wins = 0;
  const Rng root(seed);
  for (int t = 0; t < n; ++t) {
    for (int e = 0; e < windows_per_task; ++e) {
      Rng rng = root.child(static_cast<std::uint64_t>(t) * 100003u + static_cast<std::uint64_t>(e));
      auto env = family.make_env();
      const EpisodeRecord ep = collect_rollout(model, *env, family, t, rng, opts);
      const auto i = static_cast<std::size_t>(rng.uniform_int(ep.length()));
      const DiagGaussian q = model.inference_dist(ep.windows[i]);
      const double true_lp = gaussian_log_prob(q, ep.z);

      int other = rng.uniform_int(n - 1);
      if (other >= t) ++other;
      const Vec z_other = gaussian_sample(model.embedding_dist(other), rng);
      if (true_lp > gaussian_log_prob(q, z_other)) ++pair_wins;

      bool beats_all = true;
      for (int u = 0; u < n; ++u) {
        if (u == t) continue;
        const Vec z_u = gaussian_sample(model.embedding_dist(u), rng);
        beats_all = beats_all && true_lp > gaussian_log_prob(q, z_u);
      }
      if (beats_all) ++all_wins;
      ++rep.windows;
    }
  }
  rep.pairwise_rate = static_cast<double>(pair_wins) / rep.windows;
  rep.all_tasks_rate = static_cast<double>(all_wins) / rep.windows;
  return rep;
}

}  // namespace skillmpc
