#include "skillmpc/env/planar.hpp"

#include <algorithm>
#include <cmath>

#include "skillmpc/errors.hpp"

namespace skillmpc {
namespace {

Vec2 clamp_workspace(const Vec2& p) {
  return p.cwiseMax(-kWorkspaceHalfExtent).cwiseMin(kWorkspaceHalfExtent);
}

Vec2 clip_action(const Vec& action, double cap) {
  if (action.size() != 2) throw ContractViolation("planar action must be 2-D");
  if (!action.allFinite()) throw NumericalError("step: non-finite action");
  return Vec2(std::clamp(action[0], -cap, cap), std::clamp(action[1], -cap, cap));
}

bool inside_workspace(const Vec2& p) {
  return p.allFinite() && p.cwiseAbs().maxCoeff() <= kWorkspaceHalfExtent;
}

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Contact {
  bool touching = false;
  Vec2 normal = Vec2::Zero();  // world frame, from box toward gripper
  double depth = 0.0;
  Vec2 point = Vec2::Zero();  // world frame, on the box boundary
};

Contact find_contact(const Vec2& gripper, const Vec2& box, double yaw) {
  constexpr double h = PushEnv::kBoxHalfSide;
  constexpr double r = PushEnv::kGripperRadius;
  const Vec2 p = rotate(gripper - box, -yaw);
  Contact c;
  Vec2 normal_local;
  Vec2 point_local;
  if (std::abs(p.x()) <= h && std::abs(p.y()) <= h) {
    // center inside the box: leave through the nearest face
    const double gap_x = h - std::abs(p.x());
    const double gap_y = h - std::abs(p.y());
    if (gap_x <= gap_y) {
      const double sx = p.x() >= 0.0 ? 1.0 : -1.0;
      normal_local = {sx, 0.0};
      point_local = {sx * h, p.y()};
      c.depth = r + gap_x;
    } else {
      const double sy = p.y() >= 0.0 ? 1.0 : -1.0;
      normal_local = {0.0, sy};
      point_local = {p.x(), sy * h};
      c.depth = r + gap_y;
    }
  } else {
    point_local = p.cwiseMax(-h).cwiseMin(h);
    const Vec2 diff = p - point_local;
    const double dist = diff.norm();
    if (dist >= r) return c;
    normal_local = diff / dist;
    c.depth = r - dist;
  }
  c.touching = true;
  c.normal = rotate(normal_local, yaw);
  c.point = box + rotate(point_local, yaw);
  return c;
}

}  // namespace

std::unique_ptr<PlanarEnv> PlanarEnv::clone_planar() const {
  auto base = clone();
  return std::unique_ptr<PlanarEnv>(static_cast<PlanarEnv*>(base.release()));
}

// ----- reach ----- //

Vec ReachEnv::reset(Rng& /*rng*/) {
  gripper_.setZero();
  step_index_ = 0;
  return observe();
}

Vec ReachEnv::observe() const { return gripper_; }

Vec ReachEnv::step(const Vec& action) {
  gripper_ = clamp_workspace(gripper_ + clip_action(action, kActionCap));
  ++step_index_;
  return observe();
}

EnvSnapshot ReachEnv::get_state() const {
  EnvSnapshot s;
  s.kind = EnvKind::kReach;
  s.gripper_pos = gripper_;
  s.step_index = step_index_;
  return s;
}

void ReachEnv::set_state(const EnvSnapshot& snapshot) {
  if (snapshot.kind != EnvKind::kReach) {
    throw ContractViolation("set_state: snapshot is not from a reach env");
  }
  if (!inside_workspace(snapshot.gripper_pos) || snapshot.step_index < 0) {
    throw ContractViolation("set_state: snapshot outside the workspace");
  }
  gripper_ = snapshot.gripper_pos;
  step_index_ = snapshot.step_index;
}

std::unique_ptr<Environment> ReachEnv::clone() const {
  return std::make_unique<ReachEnv>(*this);
}

// ----- push ----- //

Vec PushEnv::reset(Rng& /*rng*/) {
  gripper_.setZero();
  box_ = box_start();
  yaw_ = 0.0;
  step_index_ = 0;
  return observe();
}

Vec PushEnv::observe() const {
  Vec obs(4);
  obs.head<2>() = box_ - gripper_;
  obs.tail<2>() = box_;
  return obs;
}

Vec PushEnv::step(const Vec& action) {
  gripper_ = clamp_workspace(gripper_ + clip_action(action, kActionCap));

  const Contact c = find_contact(gripper_, box_, yaw_);
  if (c.touching) {
    // the box absorbs 1/friction of the overlap, the gripper backs off the rest
    const double box_share = c.depth / friction_scale_;
    const Vec2 push_dir = -c.normal;
    const Vec2 lever = c.point - box_;
    box_ = clamp_workspace(box_ + push_dir * box_share);
    gripper_ = clamp_workspace(gripper_ - push_dir * (c.depth - box_share));
    yaw_ += kYawPerLever * cross(lever, push_dir);
    yaw_ = std::remainder(yaw_, 2.0 * M_PI);

    // box pinned against the workspace edge: move the gripper out instead
    const Contact rest = find_contact(gripper_, box_, yaw_);
    if (rest.touching) gripper_ = clamp_workspace(gripper_ + rest.normal * rest.depth);
  }
  ++step_index_;
  return observe();
}

bool PushEnv::in_contact() const {
  return find_contact(gripper_, box_, yaw_).touching;
}

EnvSnapshot PushEnv::get_state() const {
  return {EnvKind::kPush, gripper_, box_, yaw_, step_index_};
}

void PushEnv::set_state(const EnvSnapshot& snapshot) {
  if (snapshot.kind != EnvKind::kPush) {
    throw ContractViolation("set_state: snapshot is not from a push env");
  }
  if (!inside_workspace(snapshot.gripper_pos) ||
      !inside_workspace(snapshot.box_pos) || !std::isfinite(snapshot.box_yaw) ||
      snapshot.step_index < 0) {
    throw ContractViolation("set_state: snapshot outside the workspace");
  }
  gripper_ = snapshot.gripper_pos;
  box_ = snapshot.box_pos;
  yaw_ = snapshot.box_yaw;
  step_index_ = snapshot.step_index;
}

std::unique_ptr<Environment> PushEnv::clone() const {
  return std::make_unique<PushEnv>(*this);
}

void PushEnv::set_friction_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ContractViolation("friction scale must be positive and finite");
  }
  friction_scale_ = scale;
}

std::unique_ptr<PlanarEnv> make_planar_env(EnvKind kind) {
  if (kind == EnvKind::kReach) return std::make_unique<ReachEnv>();
  return std::make_unique<PushEnv>();
}

}  // namespace skillmpc
