#include <cmath>

#include "doctest.h"
#include "skillmpc/embed/task_family.hpp"
#include "skillmpc/embed/trainer.hpp"
#include "skillmpc/env/perturbed.hpp"
#include "skillmpc/errors.hpp"
#include "skillmpc/io/checkpoint_io.hpp"
#include "skillmpc/mpc/composer.hpp"
#include "support/scorer.hpp"

using namespace skillmpc;

namespace {

SkillModel model_for(EnvKind kind, std::uint64_t seed, int n_tasks = 4) {
  EmbedConfig c;
  c.hidden = {16, 16};
  c.n_tasks = n_tasks;
  c.latent_dim = kind == EnvKind::kPush ? 3 : 2;
  TaskSet tasks = TaskSet::defaults(kind);
  tasks.offsets.resize(static_cast<std::size_t>(std::max(n_tasks, 2)));
  if (n_tasks == 1) {
    auto env = make_planar_env(kind);
    Rng rng(seed);
    return SkillModel::init(c, env->obs_dim(), env->action_dim(), env->action_cap(), rng);
  }
  return initial_checkpoint(c, PlanarTaskFamily(kind, tasks), seed).model;
}

// Policy that outputs exactly zero motion when run with mean actions.
SkillModel frozen_model() {
  SkillModel m = model_for(EnvKind::kReach, 1);
  m.policy.weights.back().setZero();
  m.policy.biases.back().setZero();
  return m;
}

Vec obs_at(double x, double y) {
  Vec o(2);
  o << x, y;
  return o;
}

SequenceTaskSpec spec_of(std::vector<Vec2> w, double tol = 0.02) {
  SequenceTaskSpec s;
  s.waypoints = std::move(w);
  s.tolerance = tol;
  return s;
}

MpcConfig mpc(int k, int T, int N) {
  MpcConfig c;
  c.candidates = k;
  c.horizon = T;
  c.exec_steps = N;
  return c;
}

std::vector<LatentEvaluation> evals_of(const std::vector<double>& returns) {
  std::vector<LatentEvaluation> out;
  for (double r : returns) {
    LatentEvaluation e;
    e.discounted_return = r;
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST_CASE("candidate sampling") {
  const SkillModel reach = model_for(EnvKind::kReach, 2);
  Rng rng(1);
  auto c15 = sample_candidates(reach, 15, rng);
  CHECK(c15.size() == 15);
  for (const auto& z : c15) CHECK(z.size() == 2);
  const SkillModel push = model_for(EnvKind::kPush, 2);
  auto c50 = sample_candidates(push, 50, rng);
  CHECK(c50.size() == 50);
  for (const auto& z : c50) CHECK(z.size() == 3);
  CHECK_THROWS_AS(sample_candidates(reach, 0, rng), ContractViolation);

  SkillModel one = model_for(EnvKind::kReach, 3, 1);
  one.embedding.biases.back().tail(2).setConstant(-40.0);
  const Vec mean = one.embedding_dist(0).mean;
  for (const auto& z : sample_candidates(one, 30, rng)) {
    CHECK((z - mean).cwiseAbs().maxCoeff() < 0.03);
  }

  // every task shows up: the mixture is sampled, not one component
  SkillModel spread = model_for(EnvKind::kReach, 4);
  spread.embedding.biases.back().tail(2).setConstant(-40.0);
  std::vector<int> hits(4, 0);
  for (const auto& z : sample_candidates(spread, 400, rng)) {
    for (int t = 0; t < 4; ++t) {
      if ((z - spread.embedding_dist(t).mean).norm() < 0.05) hits[static_cast<std::size_t>(t)]++;
    }
  }
  for (int h : hits) CHECK(h > 60);
}

TEST_CASE("current reward") {
  const auto spec = spec_of({Vec2(0.3, 0.4), Vec2(0.1, 0.1)});
  const Vec a = Vec::Zero(2);
  CHECK(current_reward(spec, 0, EnvKind::kReach, obs_at(0, 0), a) == doctest::Approx(-0.5));
  CHECK(current_reward(spec, 0, EnvKind::kReach, obs_at(0.3, 0.4), a) == 0.0);
  CHECK_THROWS_AS(current_reward(spec, 2, EnvKind::kReach, obs_at(0, 0), a), ContractViolation);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double gx = rng.uniform() - 0.5, gy = rng.uniform() - 0.5;
    const double wx = rng.uniform() - 0.5, wy = rng.uniform() - 0.5;
    const auto s = spec_of({Vec2(wx, wy)});
    CHECK(current_reward(s, 0, EnvKind::kReach, obs_at(gx, gy), a) ==
          doctest::Approx(-std::sqrt((gx - wx) * (gx - wx) + (gy - wy) * (gy - wy))).epsilon(1e-12));
  }

  // push: box or gripper as the target entity
  Vec push_obs(4);
  push_obs << 0.1, 0.0, 0.1, 0.0;  // gripper at the origin, box at (0.1, 0)
  auto box_spec = spec_of({Vec2(0.1, 0.2)});
  box_spec.target = Entity::kBox;
  CHECK(current_reward(box_spec, 0, EnvKind::kPush, push_obs, a) == doctest::Approx(-0.2));
  const auto grip_spec = spec_of({Vec2(0.0, 0.2)});
  CHECK(current_reward(grip_spec, 0, EnvKind::kPush, push_obs, a) == doctest::Approx(-0.2));
}

TEST_CASE("progress advances inside the closed tolerance ball") {
  const auto spec = spec_of({Vec2(0, 0), Vec2(0.5, 0)});
  CHECK(advance_progress(spec, 0, EnvKind::kReach, obs_at(0, 0)) == 1);
  CHECK(advance_progress(spec, 0, EnvKind::kReach, obs_at(0, 0.5)) == 0);
  const auto edge = spec_of({Vec2(0.02, 0)});
  CHECK(advance_progress(edge, 0, EnvKind::kReach, obs_at(0, 0)) == 1);
  CHECK(advance_progress(edge, 0, EnvKind::kReach, obs_at(-1e-9, 0)) == 0);
  // coincident waypoints are consumed together
  const auto twice = spec_of({Vec2(0, 0), Vec2(0.01, 0), Vec2(0.3, 0)});
  CHECK(advance_progress(twice, 0, EnvKind::kReach, obs_at(0, 0)) == 2);
  CHECK(advance_progress(twice, 3, EnvKind::kReach, obs_at(0, 0)) == 3);
}

TEST_CASE("evaluate_latent closed forms") {
  const SkillModel m = frozen_model();
  ReachEnv sim;
  const EnvSnapshot snap{EnvKind::kReach, Vec2(0, 0), Vec2::Zero(), 0.0, 0};
  const auto spec = spec_of({Vec2(0.3, 0.4)});
  MpcConfig cfg = mpc(1, 4, 2);
  cfg.gamma = 1.0;
  cfg.mean_actions = true;
  Rng rng(0);
  const Vec z = Vec::Zero(2);
  const auto ev = evaluate_latent(sim, m, z, snap, spec, 0, cfg, rng);
  CHECK(ev.discounted_return == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(ev.trajectory.size() <= 4u);
  CHECK(ev.start == snap);

  // myopic: only the first reward counts
  const SkillModel moving = model_for(EnvKind::kReach, 9);
  cfg.gamma = 0.0;
  cfg.mean_actions = false;
  Rng r1(5);
  const auto myopic = evaluate_latent(sim, moving, z, snap, spec, 0, cfg, r1);
  const Vec first = obs_at(myopic.trajectory[0].gripper_pos.x(), myopic.trajectory[0].gripper_pos.y());
  CHECK(myopic.discounted_return == current_reward(spec, 0, EnvKind::kReach, first, z));

  PushEnv wrong;
  CHECK_THROWS_AS(evaluate_latent(wrong, m, z, snap, spec, 0, cfg, rng), ContractViolation);
}

TEST_CASE("evaluate_latent matches a standalone scorer") {
  Rng cases(2024);
  for (int n = 0; n < 50; ++n) {
    const EnvKind kind = n % 2 ? EnvKind::kPush : EnvKind::kReach;
    const SkillModel m = model_for(kind, 100 + static_cast<std::uint64_t>(n));
    Vec z(m.config.latent_dim);
    for (int d = 0; d < z.size(); ++d) z[d] = 2.0 * cases.normal();
    EnvSnapshot snap;
    snap.kind = kind;
    snap.gripper_pos = Vec2(cases.uniform() * 0.4 - 0.2, cases.uniform() * 0.4 - 0.2);
    if (kind == EnvKind::kPush) {
      snap.box_pos = snap.gripper_pos + Vec2(0.06 + 0.1 * cases.uniform(), 0.05 * cases.normal());
      snap.box_yaw = 0.3 * cases.normal();
    }
    const auto spec = [&] {
      auto s = spec_of({Vec2(cases.uniform() - 0.5, cases.uniform() - 0.5)});
      s.target = kind == EnvKind::kPush && n % 4 == 1 ? Entity::kBox : Entity::kGripper;
      return s;
    }();
    MpcConfig cfg = mpc(1, 4 + n % 7, 3 + n % 7);
    cfg.gamma = 0.9 + 0.01 * (n % 10);
    cfg.mean_actions = n % 3 == 0;
    auto sim = make_planar_env(kind);
    Rng rng(static_cast<std::uint64_t>(n) * 7 + 1);
    const double expected = oracle::score_rollout(
        m, {z.data(), z.data() + z.size()}, snap, spec.waypoints, 0,
        spec.target == Entity::kBox, cfg.horizon, cfg.gamma, cfg.mean_actions, rng);
    const auto ev = evaluate_latent(*sim, m, z, snap, spec, 0, cfg, rng);
    CAPTURE(n);
    CHECK(std::abs(ev.discounted_return - expected) <= 1e-10);
  }
}

TEST_CASE("select_latent is an argmax with lowest-index ties") {
  CHECK(select_latent(evals_of({-3, -1, -2})) == 1);
  CHECK(select_latent(evals_of({-1, -1})) == 0);
  CHECK_THROWS_AS(select_latent({}), ContractViolation);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r;
    const int k = 1 + rng.uniform_int(50);
    for (int i = 0; i < k; ++i) r.push_back(std::round(rng.normal() * 4) / 4);  // ties are common
    int scan = 0;
    for (int i = 0; i < k; ++i) {
      if (r[static_cast<std::size_t>(i)] > r[static_cast<std::size_t>(scan)]) scan = i;
    }
    CHECK(select_latent(evals_of(r)) == scan);
  }
}

TEST_CASE("horizon validation") {
  CHECK_NOTHROW(mpc(15, 4, 2).validate());
  CHECK_NOTHROW(mpc(1, 3, 2).validate());
  CHECK_THROWS_AS(mpc(15, 2, 2).validate(), ConfigError);  // N = T
  CHECK_THROWS_AS(mpc(15, 1, 2).validate(), ConfigError);  // N > T
  CHECK_THROWS_AS(mpc(15, 5, 2).validate(), ConfigError);  // T > 2N
  CHECK_THROWS_AS(mpc(0, 4, 2).validate(), ConfigError);
  CHECK_THROWS_AS(mpc(50, 30, 10).validate(), ConfigError);
  MpcConfig relaxed = mpc(50, 30, 10);
  relaxed.enforce_horizon_ratio = false;
  CHECK_NOTHROW(relaxed.validate());
  relaxed.horizon = 10;
  CHECK_THROWS_AS(relaxed.validate(), ConfigError);  // N < T always holds
  try {
    mpc(15, 5, 2).validate();
  } catch (const ConfigError& e) {
    CHECK(e.field() == "horizon");
  }
}

TEST_CASE("composition: already-done task, snapshot fidelity, frozen parameters") {
  const SkillModel m = model_for(EnvKind::kReach, 31);
  const std::string before = serialize_checkpoint(SkillCheckpoint{1, "reach", m, 0, 31});
  ReachEnv real;
  const ReachEnv sim;
  Rng reset(0);
  real.reset(reset);

  const auto done = compose(real, sim, m, spec_of({Vec2(0, 0)}), mpc(15, 4, 2), Rng(1));
  CHECK(done.completed);
  CHECK(done.latent_choices <= 1);

  const auto spec = spec_of({Vec2(0.1, 0.1), Vec2(-0.1, 0.1)});
  MpcConfig cfg = mpc(8, 4, 2);
  cfg.max_latent_choices = 12;
  const auto log = compose(real, sim, m, spec, cfg, Rng(2));
  REQUIRE(!log.rounds.empty());
  CHECK(log.latent_choices == static_cast<int>(log.rounds.size()));
  for (const auto& r : log.rounds) {
    REQUIRE(r.candidate_starts.size() == 8u);
    for (const auto& s : r.candidate_starts) CHECK(s == r.start);
    for (double ret : r.candidate_returns) CHECK(ret <= r.candidate_returns[static_cast<std::size_t>(r.chosen)]);
  }
  // each round starts where the previous left the real env
  for (std::size_t i = 1; i < log.rounds.size(); ++i) {
    const auto& prev_steps = log.steps;
    int last = -1;
    for (std::size_t s = 0; s < prev_steps.size(); ++s) {
      if (prev_steps[s].round == static_cast<int>(i) - 1) last = static_cast<int>(s);
    }
    REQUIRE(last >= 0);
    CHECK(log.rounds[i].start == prev_steps[static_cast<std::size_t>(last)].state);
  }
  int progress = 0;
  for (const auto& s : log.steps) {
    CHECK(s.progress >= progress);
    progress = s.progress;
  }
  CHECK(serialize_checkpoint(SkillCheckpoint{1, "reach", m, 0, 31}) == before);
}

TEST_CASE("composition is reproducible and thread-count independent") {
  const SkillModel m = model_for(EnvKind::kPush, 5);
  const auto spec = [] {
    auto s = spec_of({Vec2(0.1, 0.15), Vec2(-0.05, 0.15)});
    s.target = Entity::kBox;
    return s;
  }();
  MpcConfig cfg = mpc(6, 6, 4);
  cfg.max_latent_choices = 3;
  auto run = [&](int threads) {
    MpcConfig c = cfg;
    c.threads = threads;
    PerturbationSpec p;
    p.action_gain = 0.8;
    auto real = wrap_perturbed(make_planar_env(EnvKind::kPush), p);
    Rng reset(0);
    real->reset(reset);
    return compose(*real, *make_planar_env(EnvKind::kPush), m, spec, c, Rng(77));
  };
  const auto a = run(1);
  const auto b = run(1);
  const auto c = run(3);
  REQUIRE(a.steps.size() == b.steps.size());
  REQUIRE(a.steps.size() == c.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].state == b.steps[i].state);
    CHECK(a.steps[i].state == c.steps[i].state);
  }
}

TEST_CASE("compose rejects mismatched inputs") {
  const SkillModel m = model_for(EnvKind::kReach, 3);
  ReachEnv real;
  PushEnv push_sim;
  CHECK_THROWS_AS(compose(real, push_sim, m, spec_of({Vec2(0.1, 0)}), mpc(3, 4, 2), Rng(1)),
                  ContractViolation);
  PushEnv push_real;
  CHECK_THROWS_AS(compose(push_real, push_sim, m, spec_of({Vec2(0.1, 0)}), mpc(3, 4, 2), Rng(1)),
                  ContractViolation);
  CHECK_THROWS_AS(compose(real, ReachEnv(), m, spec_of({}), mpc(3, 4, 2), Rng(1)), ConfigError);
}

TEST_CASE("open-loop baseline runs one latent for the whole budget") {
  const SkillModel m = model_for(EnvKind::kReach, 12);
  ReachEnv real;
  Rng reset(0);
  real.reset(reset);
  const auto log = open_loop_baseline(real, ReachEnv(), m, spec_of({Vec2(0.3, 0.3)}),
                                      mpc(5, 4, 2), 25, Rng(3));
  CHECK(log.latent_choices == 1);
  CHECK(log.rounds.size() == 1u);
  CHECK(log.steps.size() <= 25u);
  for (const auto& s : log.steps) CHECK(s.z == log.rounds[0].z);
}
