#pragma once

#include <Eigen/Core>

#include <memory>
#include <string>

#include "skillmpc/numerics/rng.hpp"

namespace skillmpc {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

enum class EnvKind { kReach, kPush };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

inline constexpr double kWorkspaceHalfExtent = 1.0;

// Complete simulator state. Restoring a snapshot and replaying the same
// actions reproduces the original trajectory bit for bit.
struct EnvSnapshot {
  EnvKind kind = EnvKind::kReach;
  Vec2 gripper_pos = Vec2::Zero();
  Vec2 box_pos = Vec2::Zero();  // push only
  double box_yaw = 0.0;         // push only
  int step_index = 0;

  bool operator==(const EnvSnapshot&) const = default;
};

// Single-owner simulator. Instances are cheap to clone; clones share nothing.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  // Largest per-component displacement applied in one step.
  virtual double action_cap() const = 0;

  virtual Vec reset(Rng& rng) = 0;
  virtual Vec observe() const = 0;
  // Throws NumericalError on a non-finite action.
  virtual Vec step(const Vec& action) = 0;

  virtual EnvSnapshot get_state() const;
  virtual void set_state(const EnvSnapshot& snapshot);

  virtual std::unique_ptr<Environment> clone() const = 0;
};

// Point of interest extracted from an observation of a planar env.
enum class Entity { kGripper, kBox };

Vec2 achieved_point(EnvKind kind, Entity entity, const Vec& obs);

// -||achieved - goal||; the achieved point is the gripper for reach and the
// box center for push. The action does not enter the reward.
double task_reward(EnvKind kind, const Vec2& goal, const Vec& obs,
                   const Vec& action);

}  // namespace skillmpc
