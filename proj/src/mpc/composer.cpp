#include "skillmpc/mpc/composer.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "skillmpc/errors.hpp"
#include "skillmpc/parallel.hpp"

namespace skillmpc {
namespace {

constexpr std::uint64_t kCandidateStream = 1;
constexpr std::uint64_t kExecStream = 2;
constexpr std::uint64_t kRolloutStreamBase = 1000;

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

void MpcConfig::validate() const {
  require(candidates >= 1, "candidates", "candidates (k) must be >= 1");
  require(exec_steps >= 1, "exec_steps", "exec_steps (N) must be >= 1");
  require(exec_steps < horizon, "horizon",
          "horizon (T) must exceed exec_steps (N)");
  require(!enforce_horizon_ratio || horizon <= 2 * exec_steps, "horizon",
          "horizon (T) must not exceed twice exec_steps (N)");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma", "gamma must be in [0, 1]");
  require(max_latent_choices >= 1, "max_latent_choices",
          "max_latent_choices must be >= 1");
  require(threads >= 1, "threads", "threads must be >= 1");
}

void SequenceTaskSpec::validate() const {
  require(!waypoints.empty(), "waypoints", "need at least one waypoint");
  require(tolerance > 0.0 && std::isfinite(tolerance), "tolerance",
          "tolerance must be > 0");
  for (const Vec2& w : waypoints) {
    require(w.allFinite() && w.cwiseAbs().maxCoeff() <= kWorkspaceHalfExtent,
            "waypoints", "waypoints must lie inside the workspace");
  }
}

std::vector<Vec> sample_candidates(const SkillModel& model, int k, Rng& rng) {
  if (k < 1) throw ContractViolation("sample_candidates: k must be >= 1");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int t = rng.uniform_int(model.config.n_tasks);
    out.push_back(gaussian_sample(model.embedding_dist(t), rng));
  }
  return out;
}

double current_reward(const SequenceTaskSpec& spec, int progress, EnvKind kind,
                      const Vec& obs, const Vec& /*action*/) {
  if (progress < 0 || progress >= spec.size()) {
    throw ContractViolation("current_reward: every waypoint already visited");
  }
  return -(achieved_point(kind, spec.target, obs) -
           spec.waypoints[static_cast<std::size_t>(progress)])
              .norm();
}

int advance_progress(const SequenceTaskSpec& spec, int progress, EnvKind kind,
                     const Vec& obs) {
  const Vec2 p = achieved_point(kind, spec.target, obs);
  while (progress < spec.size() &&
         (p - spec.waypoints[static_cast<std::size_t>(progress)]).norm() <=
             spec.tolerance) {
    ++progress;
  }
  return progress;
}

LatentEvaluation evaluate_latent(PlanarEnv& sim, const SkillModel& model,
                                 const Vec& z, const EnvSnapshot& snapshot,
                                 const SequenceTaskSpec& spec, int progress,
                                 const MpcConfig& config, Rng& rng) {
  if (snapshot.kind != sim.kind()) {
    throw ContractViolation("evaluate_latent: snapshot does not match the simulator");
  }
  sim.set_state(snapshot);
  LatentEvaluation ev;
  ev.z = z;
  ev.start = sim.get_state();
  ev.trajectory.reserve(static_cast<std::size_t>(config.horizon));

  Vec obs = sim.observe();
  double discount = 1.0;
  for (int j = 0; j < config.horizon; ++j) {
    if (progress >= spec.size()) break;
    const DiagGaussian pi = model.policy_dist(obs, z);
    const Vec a = config.mean_actions ? pi.mean : gaussian_sample(pi, rng);
    const Vec env_action = model.to_env_action(a);
    obs = sim.step(env_action);
    ev.trajectory.push_back(sim.get_state());
    ev.discounted_return +=
        discount * current_reward(spec, progress, sim.kind(), obs, env_action);
    discount *= config.gamma;
    if (config.advance_in_rollout) {
      progress = advance_progress(spec, progress, sim.kind(), obs);
    }
  }
  return ev;
}

int select_latent(const std::vector<LatentEvaluation>& evals) {
  if (evals.empty()) throw ContractViolation("select_latent: no candidates");
  int best = 0;
  for (int i = 1; i < static_cast<int>(evals.size()); ++i) {
    if (evals[static_cast<std::size_t>(i)].discounted_return >
        evals[static_cast<std::size_t>(best)].discounted_return) {
      best = i;
    }
  }
  return best;
}

namespace {

std::vector<LatentEvaluation> evaluate_all(const PlanarEnv& sim,
                                           const SkillModel& model,
                                           const std::vector<Vec>& candidates,
                                           const EnvSnapshot& snapshot,
                                           const SequenceTaskSpec& spec,
                                           int progress, const MpcConfig& config,
                                           const Rng& round_rng) {
  std::vector<LatentEvaluation> evals(candidates.size());
  parallel_for(static_cast<int>(candidates.size()), config.threads, [&](int i) {
    // private simulator per candidate
    auto private_sim = sim.clone_planar();
    Rng rng = round_rng.child(kRolloutStreamBase + static_cast<std::uint64_t>(i));
    evals[static_cast<std::size_t>(i)] =
        evaluate_latent(*private_sim, model, candidates[static_cast<std::size_t>(i)],
                        snapshot, spec, progress, config, rng);
  });
  return evals;
}

// Runs `steps` real steps with latent z, appending to the log. Returns the
// updated progress.
int execute_latent(PlanarEnv& real, const SkillModel& model, const Vec& z,
                   int steps, int round, int latent_index,
                   const SequenceTaskSpec& spec, int progress, Rng& rng,
                   CompositionLog& log) {
  for (int l = 0; l < steps && progress < spec.size(); ++l) {
    const DiagGaussian pi = model.policy_dist(real.observe(), z);
    const Vec env_action = model.to_env_action(gaussian_sample(pi, rng));
    const Vec obs = real.step(env_action);
    CompositionStep s;
    s.round = round;
    s.step = static_cast<int>(log.steps.size()) + 1;
    s.state = real.get_state();
    s.reward = current_reward(spec, progress, real.kind(), obs, env_action);
    progress = advance_progress(spec, progress, real.kind(), obs);
    s.progress = progress;
    s.latent_index = latent_index;
    s.z = z;
    log.steps.push_back(std::move(s));
  }
  return progress;
}

}  // namespace

CompositionLog compose(PlanarEnv& real, const PlanarEnv& sim,
                       const SkillModel& model, const SequenceTaskSpec& spec,
                       const MpcConfig& config, const Rng& rng) {
  config.validate();
  spec.validate();
  model.validate();
  if (real.kind() != sim.kind()) {
    throw ContractViolation("compose: real and simulated env differ in kind");
  }
  if (model.obs_dim != real.obs_dim() || model.action_dim != real.action_dim()) {
    throw ContractViolation("compose: model does not fit this environment");
  }
  const auto t0 = std::chrono::steady_clock::now();

  CompositionLog log;
  log.kind = real.kind();
  log.spec = spec;
  log.initial = real.get_state();
  int progress = advance_progress(spec, 0, real.kind(), real.observe());

  for (int round = 0; progress < spec.size() && round < config.max_latent_choices;
       ++round) {
    const Rng round_rng = rng.child(static_cast<std::uint64_t>(round));
    const EnvSnapshot snapshot = real.get_state();
    Rng cand_rng = round_rng.child(kCandidateStream);
    const std::vector<Vec> candidates =
        sample_candidates(model, config.candidates, cand_rng);
    const auto evals = evaluate_all(sim, model, candidates, snapshot, spec,
                                    progress, config, round_rng);
    const int best = select_latent(evals);

    CompositionRound r;
    r.round = round;
    r.start = snapshot;
    for (const auto& e : evals) {
      r.candidate_returns.push_back(e.discounted_return);
      r.candidate_starts.push_back(e.start);
    }
    r.chosen = best;
    r.z = candidates[static_cast<std::size_t>(best)];
    log.rounds.push_back(r);

    Rng exec_rng = round_rng.child(kExecStream);
    progress = execute_latent(real, model, r.z, config.exec_steps, round, best,
                              spec, progress, exec_rng, log);
    log.latent_choices = round + 1;
  }
  log.final_progress = progress;
  log.completed = progress >= spec.size();
  log.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return log;
}

CompositionLog open_loop_baseline(PlanarEnv& real, const PlanarEnv& sim,
                                  const SkillModel& model,
                                  const SequenceTaskSpec& spec,
                                  const MpcConfig& config, int total_steps,
                                  const Rng& rng) {
  spec.validate();
  if (real.kind() != sim.kind()) {
    throw ContractViolation("open_loop_baseline: real and simulated env differ in kind");
  }
  const auto t0 = std::chrono::steady_clock::now();
  CompositionLog log;
  log.kind = real.kind();
  log.spec = spec;
  log.initial = real.get_state();
  int progress = advance_progress(spec, 0, real.kind(), real.observe());

  if (progress < spec.size() && total_steps > 0) {
    MpcConfig scoring = config;
    scoring.horizon = total_steps;
    scoring.advance_in_rollout = true;
    const Rng round_rng = rng.child(0);
    Rng cand_rng = round_rng.child(kCandidateStream);
    const auto candidates = sample_candidates(model, config.candidates, cand_rng);
    const auto evals = evaluate_all(sim, model, candidates, log.initial, spec,
                                    progress, scoring, round_rng);
    const int best = select_latent(evals);
    CompositionRound r;
    r.start = log.initial;
    for (const auto& e : evals) {
      r.candidate_returns.push_back(e.discounted_return);
      r.candidate_starts.push_back(e.start);
    }
    r.chosen = best;
    r.z = candidates[static_cast<std::size_t>(best)];
    log.rounds.push_back(r);
    Rng exec_rng = round_rng.child(kExecStream);
    progress = execute_latent(real, model, r.z, total_steps, 0, best, spec,
                              progress, exec_rng, log);
    log.latent_choices = 1;
  }
  log.final_progress = progress;
  log.completed = progress >= spec.size();
  log.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return log;
}

}  // namespace skillmpc
