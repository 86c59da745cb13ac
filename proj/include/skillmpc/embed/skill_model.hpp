#pragma once

#include <vector>

#include "skillmpc/embed/config.hpp"
#include "skillmpc/numerics/mlp.hpp"

namespace skillmpc {

// The three jointly trained networks:
//   policy     pi(a | s, z)     input: scaled observation ++ latent
//   embedding  p(z | t)         input: one-hot task id
//   inference  q(z | s^H)       input: scaled window of the last H observations
// Policy actions live in units of the env action cap.
struct SkillModel {
  EmbedConfig config;
  int obs_dim = 0;
  int action_dim = 0;
  double action_scale = 1.0;

  MlpParams policy;
  MlpParams embedding;
  MlpParams inference;

  static SkillModel init(const EmbedConfig& config, int obs_dim, int action_dim,
                         double action_scale, Rng& rng);

  DiagGaussian policy_dist(const Vec& obs, const Vec& z) const;
  DiagGaussian embedding_dist(int task) const;
  DiagGaussian inference_dist(const Vec& window) const;

  Vec policy_input(const Vec& obs, const Vec& z) const;
  Vec one_hot(int task) const;
  Vec to_env_action(const Vec& policy_action) const {
    return policy_action * action_scale;
  }

  // Throws ContractViolation if network shapes disagree with the config.
  void validate() const;
};

// Flattened, scaled window s_i^H: observations i-H+1 .. i, front-padded with
// states[0].
Vec make_window(const std::vector<Vec>& states, int i, int window_len,
                double obs_scale);

}  // namespace skillmpc
