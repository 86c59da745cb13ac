#include "skillmpc/embed/config.hpp"

#include <cmath>
#include <string>

#include "skillmpc/errors.hpp"

namespace skillmpc {
namespace {

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, std::string(field) + " " + message);
}

}  // namespace

void EmbedConfig::validate() const {
  require(n_tasks >= 1, "n_tasks", "must be >= 1");
  require(latent_dim >= 1, "latent_dim", "must be >= 1");
  require(window_len >= 1, "window_len", "must be >= 1");
  require(alpha1 >= 0.0 && std::isfinite(alpha1), "alpha1", "must be ≥ 0");
  require(alpha2 >= 0.0 && std::isfinite(alpha2), "alpha2", "must be ≥ 0");
  require(alpha3 >= 0.0 && std::isfinite(alpha3), "alpha3", "must be ≥ 0");
  require(gamma > 0.0 && gamma <= 1.0, "gamma", "must be in (0, 1]");
  require(episode_horizon >= 1, "episode_horizon", "must be >= 1");
  require(episodes_per_iteration >= 1, "episodes_per_iteration", "must be >= 1");
  require(iterations >= 0, "iterations", "must be >= 0");
  require(clip_ratio >= 0.0 && std::isfinite(clip_ratio), "clip_ratio", "must be >= 0");
  require(ppo_epochs >= 0, "ppo_epochs", "must be >= 0");
  require(minibatch_size >= 1, "minibatch_size", "must be >= 1");
  require(inference_epochs >= 0, "inference_epochs", "must be >= 0");
  require(lr_policy > 0.0, "lr_policy", "must be > 0");
  require(lr_embedding > 0.0, "lr_embedding", "must be > 0");
  require(lr_inference > 0.0, "lr_inference", "must be > 0");
  require(max_grad_norm > 0.0, "max_grad_norm", "must be > 0");
  for (int h : hidden) require(h >= 1, "hidden", "sizes must be >= 1");
  require(obs_scale > 0.0 && std::isfinite(obs_scale), "obs_scale", "must be > 0");
  require(std::isfinite(policy_init_log_std), "policy_init_log_std", "must be finite");
  require(std::isfinite(embedding_init_log_std), "embedding_init_log_std", "must be finite");
  require(embedding_init_scale > 0.0, "embedding_init_scale", "must be > 0");
  require(threads >= 1, "threads", "must be >= 1");
}

}  // namespace skillmpc
