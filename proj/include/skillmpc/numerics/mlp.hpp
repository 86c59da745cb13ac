#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "skillmpc/numerics/gaussian.hpp"
#include "skillmpc/numerics/rng.hpp"

namespace skillmpc {

using Mat = Eigen::MatrixXd;

// Fully connected tanh network whose output is split into the mean (first
// half) and log_std (second half) of a diagonal Gaussian. The same type is
// used to hold gradients and optimizer moments.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Mat> weights;  // weights[l] is layer_sizes[l+1] x layer_sizes[l]
  std::vector<Vec> biases;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int head_dim() const { return output_dim() / 2; }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t num_params() const;

  // Throws ContractViolation if shapes disagree or a value is non-finite.
  void validate() const;
  bool same_shape(const MlpParams& other) const;

  MlpParams zeros_like() const { return zeros(layer_sizes); }
  void set_zero();
  MlpParams& operator+=(const MlpParams& other);
  MlpParams& operator*=(double s);
  double squared_norm() const;

  static MlpParams zeros(const std::vector<int>& layer_sizes);
};

struct MlpInit {
  // scale applied to the (fan-in normalized) weights of the output layer
  double output_scale = 0.01;
  // bias of the log_std outputs
  double log_std_bias = 0.0;
};

MlpParams init_mlp(const std::vector<int>& layer_sizes, Rng& rng,
                   const MlpInit& init = {});

// Layer sizes for an input/hidden/Gaussian-head network.
std::vector<int> mlp_layout(int input_dim, const std::vector<int>& hidden,
                            int head_dim);

DiagGaussian mlp_forward(const MlpParams& params, const Vec& input);

// Reverse-mode gradient of a scalar loss, given the loss gradient with
// respect to the Gaussian head. Clamped log_std outputs pass no gradient.
MlpParams backprop(const MlpParams& params, const Vec& input,
                   const GaussianGrad& upstream);
// Same, accumulating into `grads`.
void backprop_accumulate(const MlpParams& params, const Vec& input,
                         const GaussianGrad& upstream, MlpParams& grads);

// Rescales `grads` so its global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(MlpParams& grads, double max_norm);

}  // namespace skillmpc
