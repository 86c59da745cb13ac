#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skillmpc/embed/trainer.hpp"
#include "skillmpc/mpc/composer.hpp"

namespace skillmpc {

// One JSON object per line: iteration, task_return, task_final_distance,
// embedding_entropy, policy_entropy, inference_log_prob, inference_loss,
// surrogate, approx_kl, clip_fraction.
std::string metrics_record(const IterationMetrics& m);

// Composition trajectory. Header comments carry the env and the waypoints,
// then one row per real step:
//   round,step,gripper_x,gripper_y[,box_x,box_y,box_yaw],progress,latent_index,z_0..z_{d-1},reward
// latent_index is the chosen candidate's index within its round.
std::string composition_csv(const CompositionLog& log);
// round,candidate,return,chosen
std::string candidates_csv(const CompositionLog& log);
// key=value lines; wall time is left out so reruns are byte-identical.
std::string composition_summary(const CompositionLog& log);

// Parsed composition CSV, enough to plot it.
struct TrajectoryLog {
  EnvKind kind = EnvKind::kReach;
  std::vector<Vec2> waypoints;
  Vec2 start = Vec2::Zero();      // gripper start
  Vec2 box_start = Vec2::Zero();  // push only
  std::vector<int> rounds;
  std::vector<Vec2> gripper;
  std::vector<Vec2> box;  // empty for reach
  std::vector<int> progress;
};

// Throws FormatError on malformed or empty logs.
TrajectoryLog parse_composition_csv(const std::string& text);

// Standalone SVG: gripper polyline, box polyline when present, numbered
// waypoint markers, and a marker wherever a new latent starts.
std::string render_trajectory_svg(const TrajectoryLog& log);

}  // namespace skillmpc
