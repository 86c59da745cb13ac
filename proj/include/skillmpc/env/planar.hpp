#pragma once

#include "skillmpc/env/environment.hpp"

namespace skillmpc {

// Shared base of the reach and push tables.
class PlanarEnv : public Environment {
 public:
  virtual EnvKind kind() const = 0;
  int action_dim() const override { return 2; }

  // Ratio of box inertia to push; 1 means the box absorbs the full overlap.
  virtual void set_friction_scale(double scale) = 0;
  virtual double friction_scale() const = 0;

  std::unique_ptr<PlanarEnv> clone_planar() const;
};

// Point reaching: the observation is the gripper position.
class ReachEnv final : public PlanarEnv {
 public:
  static constexpr double kActionCap = 0.04;

  EnvKind kind() const override { return EnvKind::kReach; }
  int obs_dim() const override { return 2; }
  double action_cap() const override { return kActionCap; }

  Vec reset(Rng& rng) override;
  Vec observe() const override;
  Vec step(const Vec& action) override;
  EnvSnapshot get_state() const override;
  void set_state(const EnvSnapshot& snapshot) override;
  std::unique_ptr<Environment> clone() const override;

  void set_friction_scale(double) override {}
  double friction_scale() const override { return 1.0; }

 private:
  Vec2 gripper_ = Vec2::Zero();
  int step_index_ = 0;
};

// Quasi-static pushing of a square box with a disc gripper. Observation is
// (box - gripper, box).
class PushEnv final : public PlanarEnv {
 public:
  static constexpr double kActionCap = 0.03;
  static constexpr double kGripperRadius = 0.02;
  static constexpr double kBoxHalfSide = 0.03;
  // yaw change per meter of tangential lever arm on a contact step
  static constexpr double kYawPerLever = 0.5;
  static Vec2 box_start() { return {0.1, 0.0}; }

  EnvKind kind() const override { return EnvKind::kPush; }
  int obs_dim() const override { return 4; }
  double action_cap() const override { return kActionCap; }

  Vec reset(Rng& rng) override;
  Vec observe() const override;
  Vec step(const Vec& action) override;
  EnvSnapshot get_state() const override;
  void set_state(const EnvSnapshot& snapshot) override;
  std::unique_ptr<Environment> clone() const override;

  void set_friction_scale(double scale) override;
  double friction_scale() const override { return friction_scale_; }

  // True if the gripper disc currently overlaps the box.
  bool in_contact() const;

 private:
  Vec2 gripper_ = Vec2::Zero();
  Vec2 box_ = box_start();
  double yaw_ = 0.0;
  int step_index_ = 0;
  double friction_scale_ = 1.0;
};

std::unique_ptr<PlanarEnv> make_planar_env(EnvKind kind);

}  // namespace skillmpc
