#pragma once

#include <vector>

#include "skillmpc/embed/skill_model.hpp"
#include "skillmpc/env/environment.hpp"
#include "skillmpc/env/planar.hpp"

namespace skillmpc {

struct MpcConfig {
  int candidates = 15;          // k
  int horizon = 4;              // T, simulated steps per candidate
  int exec_steps = 2;           // N, real steps per chosen latent
  double gamma = 0.99;
  int max_latent_choices = 100;
  // roll candidates out with the policy mean instead of sampled actions
  bool mean_actions = false;
  // let the simulated rollout move on to later waypoints; off scores every
  // candidate against the current waypoint only
  bool advance_in_rollout = false;
  int threads = 1;
  // T <= 2N guideline; the push preset (T=30, N=10) switches it off
  bool enforce_horizon_ratio = true;

  // Requires k >= 1, N < T, T <= 2N (unless enforce_horizon_ratio is off),
  // gamma in [0, 1], budget >= 1.
  void validate() const;
};

// Unseen sequencing task: visit the waypoints in order with the target entity.
struct SequenceTaskSpec {
  std::vector<Vec2> waypoints;
  double tolerance = 0.02;  // meters, closed ball
  Entity target = Entity::kGripper;

  void validate() const;
  int size() const { return static_cast<int>(waypoints.size()); }
};

struct LatentEvaluation {
  Vec z;
  double discounted_return = 0.0;
  EnvSnapshot start;                   // sim state the rollout began from
  std::vector<EnvSnapshot> trajectory;  // sim states after each step
};

// k draws from the task-marginal p(z) = E_t p(z|t): t uniform, then z ~ p(z|t).
std::vector<Vec> sample_candidates(const SkillModel& model, int k, Rng& rng);

// -||achieved - waypoints[progress]||. Throws ContractViolation once every
// waypoint has been visited.
double current_reward(const SequenceTaskSpec& spec, int progress, EnvKind kind,
                      const Vec& obs, const Vec& action);

// Skips past every consecutive waypoint the entity is within tolerance of.
int advance_progress(const SequenceTaskSpec& spec, int progress, EnvKind kind,
                     const Vec& obs);

// Restores `snapshot` into `sim`, runs the policy with latent z for T steps
// and returns sum_j gamma^j r(s_j, a_j), the reward being measured on the
// state each action leads to.
LatentEvaluation evaluate_latent(PlanarEnv& sim, const SkillModel& model,
                                 const Vec& z, const EnvSnapshot& snapshot,
                                 const SequenceTaskSpec& spec, int progress,
                                 const MpcConfig& config, Rng& rng);

// Index of the largest return; ties go to the lowest index.
int select_latent(const std::vector<LatentEvaluation>& evals);

struct CompositionStep {
  int round = 0;
  int step = 0;  // global real step counter, 1-based after the action
  EnvSnapshot state;
  int progress = 0;
  int latent_index = 0;
  Vec z;
  double reward = 0.0;  // reward w.r.t. the waypoint active before the step
};

struct CompositionRound {
  int round = 0;
  EnvSnapshot start;
  std::vector<double> candidate_returns;
  std::vector<EnvSnapshot> candidate_starts;  // sim state each rollout began from
  int chosen = 0;
  Vec z;
};

struct CompositionLog {
  EnvKind kind = EnvKind::kReach;
  SequenceTaskSpec spec;
  EnvSnapshot initial;
  std::vector<CompositionRound> rounds;
  std::vector<CompositionStep> steps;
  bool completed = false;
  int latent_choices = 0;
  int final_progress = 0;
  double wall_time_s = 0.0;
};

// Latent-space MPC: each round snapshots the real env, scores k candidate
// latents by simulated rollouts from that snapshot, and runs the best one on
// the real env for N steps. Stops when every waypoint has been reached or the
// latent budget is spent. The model is only read.
CompositionLog compose(PlanarEnv& real, const PlanarEnv& sim,
                       const SkillModel& model, const SequenceTaskSpec& spec,
                       const MpcConfig& config, const Rng& rng);

// Picks one latent from the initial state (scored over the whole sequence
// for `total_steps`) and executes it open loop for that many real steps.
CompositionLog open_loop_baseline(PlanarEnv& real, const PlanarEnv& sim,
                                  const SkillModel& model,
                                  const SequenceTaskSpec& spec,
                                  const MpcConfig& config, int total_steps,
                                  const Rng& rng);

}  // namespace skillmpc
