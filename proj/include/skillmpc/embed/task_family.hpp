#pragma once

#include <memory>
#include <string>

#include "skillmpc/env/environment.hpp"
#include "skillmpc/env/task_set.hpp"

namespace skillmpc {

// A family of pre-training tasks sharing one simulator: builds environments
// and scores transitions for each task id.
class TaskFamily {
 public:
  virtual ~TaskFamily() = default;
  virtual std::string name() const = 0;
  virtual int n_tasks() const = 0;
  virtual std::unique_ptr<Environment> make_env() const = 0;
  // Start state of a training episode; plain env.reset by default.
  virtual Vec reset(Environment& env, Rng& rng) const { return env.reset(rng); }
  // r^t evaluated on the observation reached by the transition.
  virtual double reward(int task, const Vec& next_obs, const Vec& action) const = 0;
  // How far the observation is from solving the task; reported, not trained on.
  virtual double goal_distance(int task, const Vec& obs) const = 0;
};

// Reach: r^t = -|gripper - goal|. Push: r^t = -|box - goal| - w |gripper - p|
// where p is the contact point on the side of the box facing away from the
// goal; the approach term gives the policy a signal before its first contact.
struct PlanarTaskOptions {
  double approach_weight = 0.5;
  // Push only: after reset, move the gripper to a uniformly random point on a
  // ring of these radii around the box so every side of it gets explored.
  // 0 for the outer radius keeps the fixed reset position.
  double start_ring_inner = 0.065;
  double start_ring_outer = 0.12;

  void validate() const;
};

class PlanarTaskFamily final : public TaskFamily {
 public:
  PlanarTaskFamily(EnvKind kind, TaskSet tasks, PlanarTaskOptions options = {});

  std::string name() const override { return to_string(kind_); }
  int n_tasks() const override { return tasks_.size(); }
  std::unique_ptr<Environment> make_env() const override;
  Vec reset(Environment& env, Rng& rng) const override;
  double reward(int task, const Vec& next_obs, const Vec& action) const override;
  double goal_distance(int task, const Vec& obs) const override;

  EnvKind kind() const { return kind_; }
  const PlanarTaskOptions& options() const { return options_; }
  const TaskSet& tasks() const { return tasks_; }

 private:
  EnvKind kind_;
  TaskSet tasks_;
  PlanarTaskOptions options_;
};

}  // namespace skillmpc
