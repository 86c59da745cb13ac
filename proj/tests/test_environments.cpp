#include <cmath>
#include <numbers>

#include "doctest.h"
#include "skillmpc/env/perturbed.hpp"
#include "skillmpc/env/planar.hpp"
#include "skillmpc/env/task_set.hpp"
#include "skillmpc/errors.hpp"
#include "support/env_fuzz.hpp"

using namespace skillmpc;

namespace {

Vec v2(double x, double y) {
  Vec out(2);
  out << x, y;
  return out;
}

EnvSnapshot push_state(Vec2 gripper, Vec2 box, double yaw = 0.0) {
  return {EnvKind::kPush, gripper, box, yaw, 0};
}

}  // namespace

TEST_CASE("reset") {
  Rng rng(0);
  ReachEnv reach;
  CHECK(reach.reset(rng) == v2(0.0, 0.0));
  CHECK(reach.get_state().step_index == 0);

  PushEnv push;
  Vec expected(4);
  expected << 0.1, 0.0, 0.1, 0.0;
  CHECK(push.reset(rng) == expected);

  Rng a(5), b(5);
  PushEnv p1, p2;
  p1.step(v2(0.03, 0.03));
  CHECK(p1.reset(a) == p2.reset(b));
}

TEST_CASE("observe") {
  ReachEnv reach;
  reach.set_state({EnvKind::kReach, {0.2, -0.1}, {0, 0}, 0.0, 3});
  CHECK(reach.observe() == v2(0.2, -0.1));

  PushEnv push;
  push.set_state(push_state({0.0, 0.0}, {0.1, 0.0}));
  Vec expected(4);
  expected << 0.1, 0.0, 0.1, 0.0;
  CHECK(push.observe() == expected);

  push.set_state(push_state({-0.3, 0.25}, {0.4, -0.5}, 0.2));
  const Vec obs = push.observe();
  CHECK(obs[0] == 0.4 - -0.3);
  CHECK(obs[1] == -0.5 - 0.25);
  CHECK(obs[2] == 0.4);
  CHECK(obs[3] == -0.5);
}

TEST_CASE("step: clipping and free motion") {
  ReachEnv reach;
  CHECK(reach.step(v2(0.1, 0.0)) == v2(0.04, 0.0));
  CHECK(reach.get_state().step_index == 1);

  PushEnv push;
  push.set_state(push_state({-0.5, -0.5}, {0.1, 0.0}));
  const Vec obs = push.step(v2(0.03, 0.0));
  CHECK(obs.tail<2>() == v2(0.1, 0.0));
  CHECK(push.get_state().gripper_pos.x() == doctest::Approx(-0.47).epsilon(1e-15));

  CHECK_THROWS_AS(reach.step(v2(std::nan(""), 0.0)), NumericalError);
  CHECK_THROWS_AS(reach.step(v2(INFINITY, 0.0)), NumericalError);
}

TEST_CASE("step: straight push at the box center") {
  // oracle: 1-D contact rule, box face stays one radius ahead of the gripper
  PushEnv push;
  const Vec2 box0(0.1, 0.0);
  const Vec2 g0(box0.x() - PushEnv::kBoxHalfSide - PushEnv::kGripperRadius, 0.0);
  push.set_state(push_state(g0, box0));
  double g = g0.x(), b = box0.x();
  for (int i = 0; i < 10; ++i) {
    push.step(v2(0.03, 0.0));
    g += 0.03;
    b = std::max(b, g + PushEnv::kGripperRadius + PushEnv::kBoxHalfSide);
  }
  const EnvSnapshot s = push.get_state();
  CHECK(std::abs(s.box_pos.x() - b) < 1e-12);
  CHECK(s.box_pos.x() - box0.x() >= 0.2);
  CHECK(std::abs(s.box_pos.y()) < 1e-12);
  CHECK(std::abs(s.box_yaw) < 0.05);
}

TEST_CASE("step: off-center push turns the box") {
  PushEnv push;
  // contact above the center while pushing +x turns the box clockwise
  push.set_state(push_state({0.05, 0.02}, {0.1, 0.0}));
  for (int i = 0; i < 5; ++i) push.step(v2(0.03, 0.0));
  CHECK(push.get_state().box_yaw < 0.0);
  CHECK(push.get_state().box_pos.x() > 0.15);
}

TEST_CASE("task_reward") {
  Vec obs = v2(0.3, 0.4);
  CHECK(task_reward(EnvKind::kReach, {0.3, 0.4}, obs, v2(0, 0)) == 0.0);
  CHECK(task_reward(EnvKind::kReach, {0.3, 0.4}, v2(0.0, 0.0), v2(0, 0)) ==
        doctest::Approx(-0.5).epsilon(1e-15));

  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    Vec push_obs(4);
    for (int k = 0; k < 4; ++k) push_obs[k] = rng.uniform() - 0.5;
    const Vec2 goal(rng.uniform() - 0.5, rng.uniform() - 0.5);
    const double dx = push_obs[2] - goal.x();
    const double dy = push_obs[3] - goal.y();
    const double r = task_reward(EnvKind::kPush, goal, push_obs, v2(1, 1));
    CHECK(std::abs(r + std::sqrt(dx * dx + dy * dy)) < 1e-15);
    CHECK(r <= 0.0);
  }
}

TEST_CASE("snapshots") {
  SUBCASE("restore and replay") {
    Rng rng(21);
    PushEnv env;
    env.reset(rng);
    for (int i = 0; i < 7; ++i) env.step(oracle::fuzz_action(rng));
    const EnvSnapshot snap = env.get_state();
    std::vector<Vec> actions;
    for (int i = 0; i < 5; ++i) actions.push_back(v2(0.03 * rng.normal(), 0.03 * rng.normal()));
    std::vector<Vec> first;
    for (const auto& a : actions) first.push_back(env.step(a));
    env.set_state(snap);
    for (std::size_t i = 0; i < actions.size(); ++i) CHECK(env.step(actions[i]) == first[i]);
  }
  SUBCASE("perturbed snapshot in an unperturbed sim") {
    PerturbationSpec spec;
    spec.action_gain = 0.8;
    auto real = wrap_perturbed(std::make_unique<ReachEnv>(), spec);
    ReachEnv sim;
    real->step(v2(0.04, 0.0));
    sim.set_state(real->get_state());
    CHECK(sim.observe() == real->observe());
    CHECK(sim.step(v2(0.04, 0.0)) != real->step(v2(0.04, 0.0)));
  }
  SUBCASE("cross-type restore is rejected") {
    ReachEnv reach;
    PushEnv push;
    CHECK_THROWS_AS(push.set_state(reach.get_state()), ContractViolation);
    CHECK_THROWS_AS(reach.set_state(push.get_state()), ContractViolation);
  }
  SUBCASE("out-of-workspace snapshot is rejected") {
    ReachEnv reach;
    CHECK_THROWS_AS(reach.set_state({EnvKind::kReach, {1.5, 0.0}, {0, 0}, 0.0, 0}),
                    ContractViolation);
  }
  SUBCASE("randomized round trips") {
    CHECK(oracle::snapshot_roundtrip_failures(200, 77) == 0);
  }
}

TEST_CASE("wrap_perturbed") {
  SUBCASE("identity spec reproduces the base env") {
    Rng rng(3);
    auto wrapped = wrap_perturbed(std::make_unique<PushEnv>(), PerturbationSpec{});
    PushEnv base;
    wrapped->reset(rng);
    base.reset(rng);
    for (int i = 0; i < 50; ++i) {
      const Vec a = v2(0.03 * rng.normal() + 0.01, 0.03 * rng.normal());
      CHECK(wrapped->step(a) == base.step(a));
    }
  }
  SUBCASE("gain scales the displacement") {
    PerturbationSpec spec;
    spec.action_gain = 0.8;
    auto env = wrap_perturbed(std::make_unique<ReachEnv>(), spec);
    const Vec obs = env->step(v2(0.04, 0.0));
    CHECK(obs[0] == doctest::Approx(0.032).epsilon(1e-14));
    CHECK(obs[1] == 0.0);
  }
  SUBCASE("rotation bends a straight line by the rotated sum") {
    PerturbationSpec spec;
    spec.action_rotation = 5.0 * std::numbers::pi / 180.0;
    auto env = wrap_perturbed(std::make_unique<ReachEnv>(), spec);
    const int n = 12;
    for (int i = 0; i < n; ++i) env->step(v2(0.02, 0.0));
    const double angle = spec.action_rotation;
    CHECK(env->observe()[1] == doctest::Approx(n * 0.02 * std::sin(angle)).epsilon(1e-12));
    CHECK(env->observe()[0] == doctest::Approx(n * 0.02 * std::cos(angle)).epsilon(1e-12));
  }
  SUBCASE("the env clips after the perturbation") {
    PerturbationSpec spec;
    spec.action_gain = 2.0;
    auto env = wrap_perturbed(std::make_unique<ReachEnv>(), spec);
    CHECK(env->step(v2(0.04, 0.0))[0] == 0.04);
  }
  SUBCASE("friction makes the box heavier") {
    PerturbationSpec spec;
    spec.friction_scale = 2.0;
    auto env = wrap_perturbed(std::make_unique<PushEnv>(), spec);
    env->set_state(push_state({0.05, 0.0}, {0.1, 0.0}));
    env->step(v2(0.03, 0.0));
    CHECK(env->get_state().box_pos.x() == doctest::Approx(0.115).epsilon(1e-12));
  }
  SUBCASE("invalid specs are rejected") {
    PerturbationSpec bad;
    bad.action_gain = 0.0;
    CHECK_THROWS_AS(wrap_perturbed(std::make_unique<ReachEnv>(), bad), ConfigError);
    bad.action_gain = 2.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.action_gain = 1.0;
    bad.action_rotation = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("task sets") {
  const TaskSet reach = TaskSet::defaults(EnvKind::kReach);
  CHECK(reach.size() == 4);
  reach.validate(EnvKind::kReach);
  const TaskSet push = TaskSet::defaults(EnvKind::kPush);
  CHECK(push.goal(EnvKind::kPush, 0) == Vec2(0.1, 0.2));
  CHECK(push.goal(EnvKind::kPush, 2).isApprox(Vec2(-0.1, 0.0)));
  CHECK_THROWS_AS((TaskSet{{{0.1, 0.1}}}.validate(EnvKind::kReach)), ConfigError);
  CHECK_THROWS_AS((TaskSet{{{0.1, 0.1}, {0.1, 0.1}}}.validate(EnvKind::kReach)), ConfigError);
  CHECK_THROWS_AS((TaskSet{{{0.1, 0.1}, {1.5, 0.0}}}.validate(EnvKind::kReach)), ConfigError);
}

TEST_CASE("fuzzed invariants: clipping, containment, passivity") {
  const auto rep = oracle::check_step_invariants(100, 100, 5);
  CHECK(rep.steps == 10000);
  CHECK(rep.clip_violations == 0);
  CHECK(rep.containment_violations == 0);
  CHECK(rep.passivity_violations == 0);
}
