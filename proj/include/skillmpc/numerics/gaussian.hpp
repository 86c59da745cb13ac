#pragma once

#include <Eigen/Core>

#include "skillmpc/numerics/rng.hpp"

namespace skillmpc {

using Vec = Eigen::VectorXd;

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// Diagonal Gaussian; the output law of the policy, embedding and inference
// networks. log_std is always inside [kLogStdMin, kLogStdMax].
struct DiagGaussian {
  Vec mean;
  Vec log_std;

  int dim() const { return static_cast<int>(mean.size()); }
  Vec std() const { return log_std.array().exp().matrix(); }
};

// Builds a Gaussian, clamping log_std into the allowed range.
DiagGaussian make_gaussian(Vec mean, Vec log_std);

double gaussian_log_prob(const DiagGaussian& g, const Vec& x);
double gaussian_entropy(const DiagGaussian& g);
Vec gaussian_sample(const DiagGaussian& g, Rng& rng);

// Entropy of a d-dimensional Gaussian with every log_std at the clamp floor.
double entropy_floor(int dim);

// Gradient of a scalar with respect to the (mean, log_std) of a Gaussian.
struct GaussianGrad {
  Vec d_mean;
  Vec d_log_std;

  static GaussianGrad zeros(int dim) {
    return {Vec::Zero(dim), Vec::Zero(dim)};
  }
  GaussianGrad& operator+=(const GaussianGrad& o) {
    d_mean += o.d_mean;
    d_log_std += o.d_log_std;
    return *this;
  }
  GaussianGrad operator*(double s) const { return {d_mean * s, d_log_std * s}; }
};

GaussianGrad log_prob_grad(const DiagGaussian& g, const Vec& x);
GaussianGrad entropy_grad(const DiagGaussian& g);

}  // namespace skillmpc
