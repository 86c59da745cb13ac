#include "skillmpc/numerics/mlp.hpp"

#include <cmath>
#include <string>

#include "skillmpc/errors.hpp"

namespace skillmpc {

std::size_t MlpParams::num_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return n;
}

void MlpParams::validate() const {
  if (layer_sizes.size() < 2) {
    throw ContractViolation("mlp: need at least input and output layer");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw ContractViolation("mlp: layer sizes must be positive");
  }
  if (layer_sizes.back() % 2 != 0) {
    throw ContractViolation("mlp: output size must be even (mean + log_std)");
  }
  if (weights.size() != layer_sizes.size() - 1 ||
      biases.size() != weights.size()) {
    throw ContractViolation("mlp: layer count does not match layer_sizes");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] ||
        weights[l].cols() != layer_sizes[l] ||
        biases[l].size() != layer_sizes[l + 1]) {
      throw ContractViolation("mlp: layer " + std::to_string(l) +
                              " shape disagrees with layer_sizes");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw ContractViolation("mlp: layer " + std::to_string(l) +
                              " holds non-finite values");
    }
  }
}

bool MlpParams::same_shape(const MlpParams& other) const {
  return layer_sizes == other.layer_sizes &&
         weights.size() == other.weights.size();
}

void MlpParams::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

MlpParams& MlpParams::operator+=(const MlpParams& other) {
  if (!same_shape(other)) throw ContractViolation("mlp: += shape mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

MlpParams& MlpParams::operator*=(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : biases) b *= s;
  return *this;
}

double MlpParams::squared_norm() const {
  double n = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].squaredNorm() + biases[l].squaredNorm();
  }
  return n;
}

MlpParams MlpParams::zeros(const std::vector<int>& layer_sizes) {
  MlpParams p;
  p.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    p.weights.push_back(Mat::Zero(layer_sizes[l + 1], layer_sizes[l]));
    p.biases.push_back(Vec::Zero(layer_sizes[l + 1]));
  }
  p.validate();
  return p;
}

MlpParams init_mlp(const std::vector<int>& layer_sizes, Rng& rng,
                   const MlpInit& init) {
  MlpParams p = MlpParams::zeros(layer_sizes);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const bool output = l + 1 == p.weights.size();
    const double scale = (output ? init.output_scale : 1.0) /
                         std::sqrt(static_cast<double>(layer_sizes[l]));
    Mat& w = p.weights[l];
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = scale * rng.normal();
    }
  }
  const int d = p.head_dim();
  p.biases.back().tail(d).setConstant(init.log_std_bias);
  return p;
}

std::vector<int> mlp_layout(int input_dim, const std::vector<int>& hidden,
                            int head_dim) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(2 * head_dim);
  return sizes;
}

namespace {

void check_input(const MlpParams& params, const Vec& input) {
  if (input.size() != params.input_dim()) {
    throw ContractViolation("mlp_forward: input has dimension " +
                            std::to_string(input.size()) + ", expected " +
                            std::to_string(params.input_dim()));
  }
}

// Returns the raw (unclamped) output and fills per-layer activations.
Vec forward_raw(const MlpParams& params, const Vec& input,
                std::vector<Vec>* activations) {
  Vec h = input;
  const std::size_t n = params.weights.size();
  for (std::size_t l = 0; l < n; ++l) {
    if (activations) activations->push_back(h);
    Vec pre = params.weights[l] * h + params.biases[l];
    if (l + 1 < n) {
      h = pre.array().tanh().matrix();
    } else {
      h = std::move(pre);
    }
  }
  return h;
}

}  // namespace

DiagGaussian mlp_forward(const MlpParams& params, const Vec& input) {
  check_input(params, input);
  const Vec out = forward_raw(params, input, nullptr);
  const int d = params.head_dim();
  return make_gaussian(out.head(d), out.tail(d));
}

void backprop_accumulate(const MlpParams& params, const Vec& input,
                         const GaussianGrad& upstream, MlpParams& grads) {
  check_input(params, input);
  const int d = params.head_dim();
  if (upstream.d_mean.size() != d || upstream.d_log_std.size() != d) {
    throw ContractViolation("backprop: upstream gradient has wrong dimension");
  }
  if (!grads.same_shape(params)) {
    throw ContractViolation("backprop: gradient buffer shape mismatch");
  }
  std::vector<Vec> acts;
  acts.reserve(params.weights.size());
  const Vec raw = forward_raw(params, input, &acts);

  Vec delta(2 * d);
  delta.head(d) = upstream.d_mean;
  for (int i = 0; i < d; ++i) {
    const double r = raw[d + i];
    delta[d + i] =
        (r >= kLogStdMin && r <= kLogStdMax) ? upstream.d_log_std[i] : 0.0;
  }
  for (std::size_t l = params.weights.size(); l-- > 0;) {
    grads.weights[l].noalias() += delta * acts[l].transpose();
    grads.biases[l] += delta;
    if (l == 0) break;
    // acts[l] is tanh output of layer l-1
    Vec back = params.weights[l].transpose() * delta;
    delta = back.array() * (1.0 - acts[l].array().square());
  }
}

MlpParams backprop(const MlpParams& params, const Vec& input,
                   const GaussianGrad& upstream) {
  MlpParams grads = params.zeros_like();
  backprop_accumulate(params, input, upstream, grads);
  return grads;
}

double clip_grad_norm(MlpParams& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm && norm > 0.0) grads *= max_norm / norm;
  return norm;
}

}  // namespace skillmpc
