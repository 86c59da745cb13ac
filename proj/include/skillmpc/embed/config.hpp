#pragma once

#include <vector>

namespace skillmpc {

// Hyperparameters of skill-embedding training. None of the defaults come
// from measured runs on hardware; they are sized for desk-scale planar tasks.
struct EmbedConfig {
  int n_tasks = 4;
  int latent_dim = 2;
  int window_len = 5;

  // weights of embedding entropy, inference log-likelihood, policy entropy
  double alpha1 = 0.01;
  double alpha2 = 0.1;
  double alpha3 = 0.01;
  double gamma = 0.99;

  int episode_horizon = 100;
  int episodes_per_iteration = 32;
  int iterations = 300;

  double clip_ratio = 0.2;
  int ppo_epochs = 4;
  int minibatch_size = 256;
  int inference_epochs = 2;
  double lr_policy = 3e-4;
  double lr_embedding = 3e-4;
  double lr_inference = 1e-3;
  double max_grad_norm = 1.0;
  // decay the policy and embedding learning rates linearly to zero
  bool lr_anneal = true;

  std::vector<int> hidden = {64, 64};
  // observations are multiplied by this before entering a network
  double obs_scale = 5.0;
  double policy_init_log_std = -0.5;
  double embedding_init_log_std = -1.0;
  double embedding_init_scale = 2.0;

  int threads = 1;

  // Throws ConfigError naming the first invalid field.
  void validate() const;
};

}  // namespace skillmpc
