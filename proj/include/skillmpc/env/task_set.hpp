#pragma once

#include <vector>

#include "skillmpc/env/environment.hpp"

namespace skillmpc {

// Training goals. Offsets are relative to the start position of the
// achieved entity (gripper for reach, box for push).
struct TaskSet {
  std::vector<Vec2> offsets;

  int size() const { return static_cast<int>(offsets.size()); }
  Vec2 goal(EnvKind kind, int task) const;

  // Throws ConfigError unless there are >= 2 distinct goals in the workspace.
  void validate(EnvKind kind) const;

  // Reach: corners of a 0.4 m square around the start. Push: 0.2 m up, down,
  // left and right of the box start.
  static TaskSet defaults(EnvKind kind);
};

Vec2 start_point(EnvKind kind);

}  // namespace skillmpc
