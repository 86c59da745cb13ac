#include "skillmpc/env/task_set.hpp"

#include "skillmpc/env/planar.hpp"
#include "skillmpc/errors.hpp"

namespace skillmpc {

Vec2 start_point(EnvKind kind) {
  return kind == EnvKind::kReach ? Vec2::Zero() : PushEnv::box_start();
}

Vec2 TaskSet::goal(EnvKind kind, int task) const {
  if (task < 0 || task >= size()) {
    throw ContractViolation("task id " + std::to_string(task) + " out of range");
  }
  return start_point(kind) + offsets[static_cast<std::size_t>(task)];
}

void TaskSet::validate(EnvKind kind) const {
  if (size() < 2) throw ConfigError("goals", "need at least 2 goals");
  for (int i = 0; i < size(); ++i) {
    const Vec2 g = goal(kind, i);
    if (!g.allFinite() || g.cwiseAbs().maxCoeff() > kWorkspaceHalfExtent) {
      throw ConfigError("goals", "goal " + std::to_string(i) +
                                     " lies outside the workspace");
    }
    for (int j = 0; j < i; ++j) {
      if (offsets[static_cast<std::size_t>(i)] ==
          offsets[static_cast<std::size_t>(j)]) {
        throw ConfigError("goals", "goals must be distinct");
      }
    }
  }
}

TaskSet TaskSet::defaults(EnvKind kind) {
  if (kind == EnvKind::kReach) {
    return {{{0.2, 0.2}, {-0.2, 0.2}, {-0.2, -0.2}, {0.2, -0.2}}};
  }
  return {{{0.0, 0.2}, {0.0, -0.2}, {-0.2, 0.0}, {0.2, 0.0}}};
}

}  // namespace skillmpc
