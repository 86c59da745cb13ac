#include "skillmpc/embed/task_family.hpp"

#include <cmath>
#include <numbers>

#include "skillmpc/env/planar.hpp"
#include "skillmpc/errors.hpp"

namespace skillmpc {

void PlanarTaskOptions::validate() const {
  if (!(approach_weight >= 0.0) || !std::isfinite(approach_weight)) {
    throw ConfigError("approach_weight", "approach_weight must be ≥ 0");
  }
  if (start_ring_outer != 0.0 &&
      !(start_ring_inner >= PushEnv::kGripperRadius + PushEnv::kBoxHalfSide * std::numbers::sqrt2 &&
        start_ring_outer >= start_ring_inner && start_ring_outer <= 0.5)) {
    throw ConfigError("start_ring",
                      "start ring must clear the box corners and satisfy inner ≤ outer ≤ 0.5");
  }
}

PlanarTaskFamily::PlanarTaskFamily(EnvKind kind, TaskSet tasks, PlanarTaskOptions options)
    : kind_(kind), tasks_(std::move(tasks)), options_(options) {
  tasks_.validate(kind_);
  options_.validate();
}

std::unique_ptr<Environment> PlanarTaskFamily::make_env() const {
  return make_planar_env(kind_);
}

Vec PlanarTaskFamily::reset(Environment& env, Rng& rng) const {
  Vec obs = env.reset(rng);
  if (kind_ != EnvKind::kPush || options_.start_ring_outer == 0.0) return obs;
  EnvSnapshot s = env.get_state();
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double r = options_.start_ring_inner +
                   (options_.start_ring_outer - options_.start_ring_inner) * rng.uniform();
  s.gripper_pos = s.box_pos + r * Vec2(std::cos(angle), std::sin(angle));
  env.set_state(s);
  return env.observe();
}

double PlanarTaskFamily::reward(int task, const Vec& next_obs,
                                const Vec& action) const {
  const Vec2 goal = tasks_.goal(kind_, task);
  double r = task_reward(kind_, goal, next_obs, action);
  if (kind_ == EnvKind::kPush && options_.approach_weight != 0.0) {
    // the contact point on the far side of the box from the goal
    const Vec2 box = achieved_point(kind_, Entity::kBox, next_obs);
    const Vec2 to_goal = goal - box;
    const double dist = to_goal.norm();
    Vec2 push_point = box;
    if (dist > 1e-9) {
      push_point -= (PushEnv::kBoxHalfSide + PushEnv::kGripperRadius) / dist * to_goal;
    }
    r -= options_.approach_weight *
         (achieved_point(kind_, Entity::kGripper, next_obs) - push_point).norm();
  }
  return r;
}

double PlanarTaskFamily::goal_distance(int task, const Vec& obs) const {
  return -task_reward(kind_, tasks_.goal(kind_, task), obs, Vec());
}

}  // namespace skillmpc
