#include "skillmpc/embed/skill_model.hpp"

#include <algorithm>
#include <string>

#include "skillmpc/errors.hpp"

namespace skillmpc {

SkillModel SkillModel::init(const EmbedConfig& config, int obs_dim,
                            int action_dim, double action_scale, Rng& rng) {
  config.validate();
  if (obs_dim < 1 || action_dim < 1 || !(action_scale > 0.0)) {
    throw ContractViolation("SkillModel::init: bad env dimensions");
  }
  SkillModel m;
  m.config = config;
  m.obs_dim = obs_dim;
  m.action_dim = action_dim;
  m.action_scale = action_scale;

  Rng policy_rng = rng.child(1);
  Rng embed_rng = rng.child(2);
  Rng infer_rng = rng.child(3);

  MlpInit policy_init;
  policy_init.log_std_bias = config.policy_init_log_std;
  m.policy = init_mlp(mlp_layout(obs_dim + config.latent_dim, config.hidden,
                                 action_dim),
                      policy_rng, policy_init);

  MlpInit embed_init;
  embed_init.output_scale = config.embedding_init_scale;
  embed_init.log_std_bias = config.embedding_init_log_std;
  m.embedding = init_mlp(
      mlp_layout(config.n_tasks, config.hidden, config.latent_dim), embed_rng,
      embed_init);
  // the spread of the initial task means comes from the weights alone
  const int d = config.latent_dim;
  m.embedding.weights.back().bottomRows(d) *= 0.01;

  m.inference = init_mlp(mlp_layout(obs_dim * config.window_len, config.hidden,
                                    config.latent_dim),
                         infer_rng, MlpInit{});
  return m;
}

Vec SkillModel::policy_input(const Vec& obs, const Vec& z) const {
  if (obs.size() != obs_dim || z.size() != config.latent_dim) {
    throw ContractViolation("policy input: observation or latent has wrong size");
  }
  Vec in(obs_dim + config.latent_dim);
  in.head(obs_dim) = obs * config.obs_scale;
  in.tail(config.latent_dim) = z;
  return in;
}

Vec SkillModel::one_hot(int task) const {
  if (task < 0 || task >= config.n_tasks) {
    throw ContractViolation("task id " + std::to_string(task) + " out of range");
  }
  Vec v = Vec::Zero(config.n_tasks);
  v[task] = 1.0;
  return v;
}

DiagGaussian SkillModel::policy_dist(const Vec& obs, const Vec& z) const {
  return mlp_forward(policy, policy_input(obs, z));
}

DiagGaussian SkillModel::embedding_dist(int task) const {
  return mlp_forward(embedding, one_hot(task));
}

DiagGaussian SkillModel::inference_dist(const Vec& window) const {
  return mlp_forward(inference, window);
}

void SkillModel::validate() const {
  config.validate();
  policy.validate();
  embedding.validate();
  inference.validate();
  const int d = config.latent_dim;
  if (policy.input_dim() != obs_dim + d || policy.head_dim() != action_dim) {
    throw ContractViolation("policy network shape disagrees with the config");
  }
  if (embedding.input_dim() != config.n_tasks || embedding.head_dim() != d) {
    throw ContractViolation("embedding network shape disagrees with the config");
  }
  if (inference.input_dim() != obs_dim * config.window_len ||
      inference.head_dim() != d) {
    throw ContractViolation("inference network shape disagrees with the config");
  }
}

Vec make_window(const std::vector<Vec>& states, int i, int window_len,
                double obs_scale) {
  if (states.empty() || i < 0 || i >= static_cast<int>(states.size())) {
    throw ContractViolation("make_window: step index out of range");
  }
  const Eigen::Index dim = states[0].size();
  Vec w(dim * window_len);
  for (int k = 0; k < window_len; ++k) {
    const int src = std::max(0, i - window_len + 1 + k);
    w.segment(k * dim, dim) = states[static_cast<std::size_t>(src)] * obs_scale;
  }
  return w;
}

}  // namespace skillmpc
