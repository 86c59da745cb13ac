#include <cmath>

#include "doctest.h"
#include "skillmpc/errors.hpp"
#include "skillmpc/numerics/adam.hpp"
#include "skillmpc/numerics/gaussian.hpp"
#include "skillmpc/numerics/mlp.hpp"
#include "support/gradient_check.hpp"
#include "support/oracles.hpp"

using namespace skillmpc;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("mlp_forward: zero parameters give a standard normal head") {
  const MlpParams p = MlpParams::zeros(mlp_layout(3, {8, 8}, 2));
  const DiagGaussian g = mlp_forward(p, vec({0.3, -1.0, 2.0}));
  CHECK(g.mean.isZero(0.0));
  CHECK(g.log_std.isZero(0.0));
}

TEST_CASE("mlp_forward: identity single layer passes the first half through") {
  MlpParams p = MlpParams::zeros({4, 4});
  p.weights[0].setIdentity();
  const Vec x = vec({0.5, -0.25, 1.0, -1.0});
  const DiagGaussian g = mlp_forward(p, x);
  CHECK(g.mean[0] == 0.5);
  CHECK(g.mean[1] == -0.25);
  CHECK(g.log_std[0] == 1.0);
  CHECK(g.log_std[1] == -1.0);
}

TEST_CASE("mlp_forward: matches a hand-written forward pass") {
  Rng rng(42);
  MlpInit init;
  init.output_scale = 1.0;
  const MlpParams p = init_mlp(mlp_layout(5, {16}, 3), rng, init);
  const std::vector<double> x{0.1, -0.7, 0.3, 0.9, -0.2};
  const DiagGaussian g = mlp_forward(p, Eigen::Map<const Vec>(x.data(), 5));
  const std::vector<double> ref = oracle::forward_loops(p, x);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(g.mean[i] - ref[static_cast<std::size_t>(i)]) < 1e-12);
    const double clamped =
        std::clamp(ref[static_cast<std::size_t>(3 + i)], kLogStdMin, kLogStdMax);
    CHECK(std::abs(g.log_std[i] - clamped) < 1e-12);
  }
}

TEST_CASE("mlp_forward: dimension mismatch is a contract violation") {
  const MlpParams p = MlpParams::zeros(mlp_layout(3, {4}, 1));
  CHECK_THROWS_AS(mlp_forward(p, vec({1.0, 2.0})), ContractViolation);
}

TEST_CASE("log_std is clamped to [-5, 2]") {
  const DiagGaussian g = make_gaussian(vec({0.0, 0.0}), vec({-9.0, 7.0}));
  CHECK(g.log_std[0] == kLogStdMin);
  CHECK(g.log_std[1] == kLogStdMax);
}

TEST_CASE("gaussian_log_prob closed forms") {
  const DiagGaussian std_normal = make_gaussian(vec({0.0}), vec({0.0}));
  CHECK(gaussian_log_prob(std_normal, vec({0.0})) == doctest::Approx(-0.9189385332).epsilon(1e-10));
  CHECK(gaussian_log_prob(std_normal, vec({1.0})) == doctest::Approx(-1.4189385332).epsilon(1e-10));

  const DiagGaussian g = make_gaussian(vec({1.0, 2.0}), vec({0.3, -0.2}));
  const double ref = oracle::normal_log_pdf(0.0, 1.0, std::exp(0.3)) +
                     oracle::normal_log_pdf(0.0, 2.0, std::exp(-0.2));
  CHECK(std::abs(gaussian_log_prob(g, vec({0.0, 0.0})) - ref) < 1e-12);
  // frozen from a separate script evaluating the density directly
  CHECK(std::abs(gaussian_log_prob(g, vec({0.0, 0.0})) - (-5.1959322797389)) < 1e-12);
  CHECK_THROWS_AS(gaussian_log_prob(g, vec({0.0})), ContractViolation);
}

TEST_CASE("gaussian_entropy closed forms and Monte-Carlo agreement") {
  CHECK(gaussian_entropy(make_gaussian(vec({0.0}), vec({0.0}))) ==
        doctest::Approx(1.4189385332).epsilon(1e-10));
  CHECK(gaussian_entropy(make_gaussian(vec({0.0, 0.0}), vec({0.0, 0.0}))) ==
        doctest::Approx(2.8378770664).epsilon(1e-10));
  const DiagGaussian g = make_gaussian(vec({0.0}), vec({0.5}));
  CHECK(gaussian_entropy(g) == doctest::Approx(1.9189385332).epsilon(1e-10));

  Rng rng(3);
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = std::exp(0.5) * rng.normal();
    acc -= oracle::normal_log_pdf(x, 0.0, std::exp(0.5));
  }
  CHECK(std::abs(acc / n - gaussian_entropy(g)) < 1e-2);
}

TEST_CASE("entropy equals expected negative log-prob") {
  Rng rng(11);
  const DiagGaussian g = make_gaussian(vec({0.4, -1.2, 3.0}), vec({-0.7, 0.2, 1.1}));
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc -= gaussian_log_prob(g, gaussian_sample(g, rng));
  CHECK(std::abs(acc / n - gaussian_entropy(g)) < 1e-2);
}

TEST_CASE("gaussian_sample") {
  SUBCASE("clamped width stays at the mean") {
    const DiagGaussian g = make_gaussian(vec({0.7, -0.3}), vec({-20.0, -20.0}));
    Rng rng(5);
    int near = 0;
    for (int i = 0; i < 1000; ++i) {
      if ((gaussian_sample(g, rng) - g.mean).cwiseAbs().maxCoeff() < 0.03) ++near;
    }
    CHECK(near > 990);
  }
  SUBCASE("fresh streams with the same seed agree") {
    const DiagGaussian g = make_gaussian(vec({0.0, 1.0, 2.0}), vec({0.1, 0.2, 0.3}));
    Rng a(99), b(99);
    CHECK(gaussian_sample(g, a) == gaussian_sample(g, b));
  }
  SUBCASE("law of large numbers") {
    const DiagGaussian g = make_gaussian(vec({0.0}), vec({0.0}));
    Rng rng(17);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = gaussian_sample(g, rng)[0];
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(std::sqrt(sq / n - mean * mean) - 1.0) < 0.02);
  }
}

TEST_CASE("backprop: zero upstream gives zero gradient") {
  Rng rng(1);
  const MlpParams p = init_mlp(mlp_layout(3, {8}, 2), rng);
  const MlpParams g = backprop(p, Vec::Ones(3), GaussianGrad::zeros(2));
  CHECK(g.squared_norm() == 0.0);
}

TEST_CASE("backprop: linear layer with quadratic loss matches normal equations") {
  // loss = 0.5 |W_mean x + b_mean - y|^2  ->  dW = (W x + b - y) x^T
  Rng rng(2);
  MlpInit init;
  init.output_scale = 1.0;
  const MlpParams p = init_mlp({3, 4}, rng, init);
  const Vec x = vec({0.5, -1.0, 2.0});
  const Vec y = vec({0.3, -0.1});
  const DiagGaussian g = mlp_forward(p, x);
  GaussianGrad up = GaussianGrad::zeros(2);
  up.d_mean = g.mean - y;
  const MlpParams grads = backprop(p, x, up);

  const Eigen::MatrixXd w_mean = p.weights[0].topRows(2);
  const Vec resid = w_mean * x + p.biases[0].head(2) - y;
  const Eigen::MatrixXd expected = resid * x.transpose();
  CHECK((grads.weights[0].topRows(2) - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((grads.biases[0].head(2) - resid).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(grads.weights[0].bottomRows(2).isZero(0.0));
}

TEST_CASE("backprop: clamped log_std outputs pass no gradient") {
  MlpParams p = MlpParams::zeros({1, 2});
  p.biases[0][1] = 4.0;  // raw log_std above the clamp
  GaussianGrad up = GaussianGrad::zeros(1);
  up.d_log_std[0] = 1.0;
  CHECK(backprop(p, Vec::Ones(1), up).squared_norm() == 0.0);
}

TEST_CASE("backprop agrees with central finite differences") {
  Rng rng(7);
  int checked = 0;
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const auto r = oracle::gradient_check_instance(rng);
    if (r.skipped) continue;
    ++checked;
    worst = std::max(worst, r.max_rel_error);
  }
  CHECK(checked >= 30);
  CHECK(worst < 1e-4);
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    Rng rng(4);
    MlpParams p = init_mlp(mlp_layout(2, {4}, 1), rng);
    const MlpParams before = p;
    OptimizerState st = OptimizerState::fresh(p);
    adam_step(st, p, p.zeros_like());
    CHECK(st.step == 1);
    CHECK(oracle::flatten(p) == oracle::flatten(before));
  }
  SUBCASE("first step from fresh state moves by lr * sign(g)") {
    MlpParams p = MlpParams::zeros({1, 2});
    MlpParams g = p.zeros_like();
    g.weights[0](0, 0) = 3.0;
    g.weights[0](1, 0) = -0.5;
    AdamOptions o;
    o.learning_rate = 0.01;
    OptimizerState st = OptimizerState::fresh(p, o);
    adam_step(st, p, g);
    // m_hat = g, v_hat = g^2  ->  step = lr * g / (|g| + eps)
    CHECK(p.weights[0](0, 0) == doctest::Approx(-0.01 * 3.0 / (3.0 + 1e-8)).epsilon(1e-12));
    CHECK(p.weights[0](1, 0) == doctest::Approx(0.01 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
    CHECK(p.biases[0].isZero(0.0));
  }
  SUBCASE("converges on w^2") {
    MlpParams p = MlpParams::zeros({1, 2});
    p.biases[0][0] = 1.0;
    AdamOptions o;
    o.learning_rate = 0.1;
    OptimizerState st = OptimizerState::fresh(p, o);
    for (int i = 0; i < 100; ++i) {
      MlpParams g = p.zeros_like();
      g.biases[0][0] = 2.0 * p.biases[0][0];
      adam_step(st, p, g);
    }
    CHECK(std::abs(p.biases[0][0]) < 0.1);
  }
  SUBCASE("non-finite gradient names the tensor") {
    MlpParams p = MlpParams::zeros({1, 2, 2});
    MlpParams g = p.zeros_like();
    g.biases[1][0] = std::nan("");
    OptimizerState st = OptimizerState::fresh(p);
    try {
      adam_step(st, p, g);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("biases[1]") != std::string::npos);
    }
    CHECK(st.step == 0);
  }
}

TEST_CASE("determinism: identical seeds give identical networks and samples") {
  Rng a(123), b(123);
  const MlpParams pa = init_mlp(mlp_layout(4, {16, 16}, 2), a);
  const MlpParams pb = init_mlp(mlp_layout(4, {16, 16}, 2), b);
  CHECK(oracle::flatten(pa) == oracle::flatten(pb));
  const Vec x = Vec::LinSpaced(4, -1.0, 1.0);
  const DiagGaussian ga = mlp_forward(pa, x);
  const DiagGaussian gb = mlp_forward(pb, x);
  CHECK(ga.mean == gb.mean);
  CHECK(gaussian_sample(ga, a) == gaussian_sample(gb, b));
}
