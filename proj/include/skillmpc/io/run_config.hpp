#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "skillmpc/embed/config.hpp"
#include "skillmpc/embed/task_family.hpp"
#include "skillmpc/env/perturbed.hpp"
#include "skillmpc/env/task_set.hpp"
#include "skillmpc/mpc/composer.hpp"

namespace skillmpc {

struct EvalConfig {
  int episodes_per_task = 20;
  int identifiability_windows = 100;  // per task
};

// Everything a command needs. Parsed from an INI file:
//
//   env = reach            ; or push
//   seed = 7
//   output_dir = out
//   [tasks]       goals = x,y; x,y; ...    (absolute goal positions)
//                 approach_weight = 0.5    (push training reward shaping)
//                 start_ring = 0.065, 0.12 (push training start positions)
//   [embed]       any EmbedConfig field, hidden = 64,64
//   [mpc]         candidates, horizon, exec_steps, gamma, max_latent_choices,
//                 mean_actions, advance_in_rollout, threads,
//                 enforce_horizon_ratio
//   [perturbation] action_gain, action_rotation_deg, action_bias = x,y,
//                 friction_scale
//   [eval]        episodes_per_task, identifiability_windows
//
// Unknown keys are rejected so typos do not silently fall back to defaults.
struct RunConfig {
  EnvKind env = EnvKind::kReach;
  TaskSet tasks;
  PlanarTaskOptions task_options;
  EmbedConfig embed;
  MpcConfig mpc;
  PerturbationSpec perturbation;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";
  EvalConfig eval;

  // Defaults for one env family: reach uses d_z = 2 and k=15, T=4, N=2;
  // push uses d_z = 3 and k=50, T=30, N=10 (which needs the T <= 2N check
  // switched off).
  static RunConfig defaults(EnvKind env);

  // Throws ConfigError naming the first invalid field; a missing seed is an
  // error.
  void validate() const;
  std::uint64_t require_seed() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// [task] waypoints = x,y; x,y; ...   tolerance = 0.02   target = gripper|box
SequenceTaskSpec parse_task_spec(const std::string& text);
SequenceTaskSpec load_task_spec(const std::filesystem::path& path);

// "x,y; x,y" -> points. Throws ConfigError(field) on malformed input.
std::vector<Vec2> parse_points(const std::string& text, const std::string& field);

}  // namespace skillmpc
