#include "skillmpc/env/environment.hpp"

#include "skillmpc/errors.hpp"

namespace skillmpc {

std::string to_string(EnvKind kind) {
  return kind == EnvKind::kReach ? "reach" : "push";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "reach") return EnvKind::kReach;
  if (name == "push") return EnvKind::kPush;
  throw ConfigError("env", "env must be 'reach' or 'push', got '" + name + "'");
}

EnvSnapshot Environment::get_state() const {
  throw ContractViolation("this environment does not support snapshots");
}

void Environment::set_state(const EnvSnapshot&) {
  throw ContractViolation("this environment does not support snapshots");
}

Vec2 achieved_point(EnvKind kind, Entity entity, const Vec& obs) {
  if (kind == EnvKind::kReach) {
    if (obs.size() != 2) throw ContractViolation("reach observation must be 2-D");
    if (entity == Entity::kBox) {
      throw ContractViolation("reach environment has no box");
    }
    return obs.head<2>();
  }
  if (obs.size() != 4) throw ContractViolation("push observation must be 4-D");
  const Vec2 box = obs.segment<2>(2);
  if (entity == Entity::kBox) return box;
  return box - obs.head<2>();
}

double task_reward(EnvKind kind, const Vec2& goal, const Vec& obs,
                   const Vec& /*action*/) {
  const Entity entity = kind == EnvKind::kReach ? Entity::kGripper : Entity::kBox;
  return -(achieved_point(kind, entity, obs) - goal).norm();
}

}  // namespace skillmpc
