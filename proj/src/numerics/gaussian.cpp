#include "skillmpc/numerics/gaussian.hpp"

#include <cmath>

#include "skillmpc/errors.hpp"

namespace skillmpc {
namespace {

constexpr double kHalfLog2Pi = 0.5 * 1.8378770664093454835606594728112;  // log(2*pi)

void check_dims(const DiagGaussian& g, const Vec& x, const char* what) {
  if (g.mean.size() != g.log_std.size() || g.mean.size() != x.size()) {
    throw ContractViolation(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

DiagGaussian make_gaussian(Vec mean, Vec log_std) {
  if (mean.size() != log_std.size()) {
    throw ContractViolation("make_gaussian: mean/log_std dimension mismatch");
  }
  log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  return {std::move(mean), std::move(log_std)};
}

double gaussian_log_prob(const DiagGaussian& g, const Vec& x) {
  check_dims(g, x, "gaussian_log_prob");
  double total = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double z = (x[d] - g.mean[d]) * std::exp(-g.log_std[d]);
    total += -0.5 * z * z - g.log_std[d] - kHalfLog2Pi;
  }
  return total;
}

double gaussian_entropy(const DiagGaussian& g) {
  return static_cast<double>(g.dim()) * (0.5 + kHalfLog2Pi) + g.log_std.sum();
}

Vec gaussian_sample(const DiagGaussian& g, Rng& rng) {
  Vec out(g.dim());
  for (int d = 0; d < g.dim(); ++d) {
    out[d] = g.mean[d] + std::exp(g.log_std[d]) * rng.normal();
  }
  return out;
}

double entropy_floor(int dim) {
  return static_cast<double>(dim) * (0.5 + kHalfLog2Pi + kLogStdMin);
}

GaussianGrad log_prob_grad(const DiagGaussian& g, const Vec& x) {
  check_dims(g, x, "log_prob_grad");
  GaussianGrad out = GaussianGrad::zeros(g.dim());
  for (int d = 0; d < g.dim(); ++d) {
    const double inv_var = std::exp(-2.0 * g.log_std[d]);
    const double diff = x[d] - g.mean[d];
    out.d_mean[d] = diff * inv_var;
    out.d_log_std[d] = diff * diff * inv_var - 1.0;
  }
  return out;
}

GaussianGrad entropy_grad(const DiagGaussian& g) {
  return {Vec::Zero(g.dim()), Vec::Ones(g.dim())};
}

}  // namespace skillmpc
