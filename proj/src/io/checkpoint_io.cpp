#include "skillmpc/io/checkpoint_io.hpp"

#include "skillmpc/errors.hpp"
#include "skillmpc/io/files.hpp"

namespace skillmpc {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "skillmpc-checkpoint";

json network_to_json(const MlpParams& p) {
  json layers = json::array();
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    json w = json::array();
    for (Eigen::Index r = 0; r < p.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c) w.push_back(p.weights[l](r, c));
    }
    weights.push_back(std::move(w));
    json b = json::array();
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) b.push_back(p.biases[l][i]);
    biases.push_back(std::move(b));
  }
  return {{"layer_sizes", p.layer_sizes}, {"weights", weights}, {"biases", biases}};
}

MlpParams network_from_json(const json& doc, const std::string& name) {
  const auto sizes = doc.at("layer_sizes").get<std::vector<int>>();
  if (sizes.size() < 2) throw FormatError(name + ": too few layers");
  for (int s : sizes) {
    if (s < 1) throw FormatError(name + ": non-positive layer size");
  }
  MlpParams p = MlpParams::zeros(sizes);
  const json& weights = doc.at("weights");
  const json& biases = doc.at("biases");
  if (weights.size() != p.weights.size() || biases.size() != p.biases.size()) {
    throw FormatError(name + ": layer count disagrees with layer_sizes");
  }
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const json& w = weights[l];
    const json& b = biases[l];
    if (w.size() != static_cast<std::size_t>(p.weights[l].size()) ||
        b.size() != static_cast<std::size_t>(p.biases[l].size())) {
      throw FormatError(name + ": layer " + std::to_string(l) + " has the wrong size");
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < p.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c) {
        if (!w[k].is_number()) throw FormatError(name + ": non-numeric weight");
        p.weights[l](r, c) = w[k++].get<double>();
      }
    }
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) {
      if (!b[static_cast<std::size_t>(i)].is_number()) {
        throw FormatError(name + ": non-numeric bias");
      }
      p.biases[l][i] = b[static_cast<std::size_t>(i)].get<double>();
    }
  }
  try {
    p.validate();
  } catch (const ContractViolation& e) {
    throw FormatError(name + ": " + e.what());
  }
  return p;
}

}  // namespace

json embed_config_to_json(const EmbedConfig& c) {
  return {
      {"n_tasks", c.n_tasks},
      {"latent_dim", c.latent_dim},
      {"window_len", c.window_len},
      {"alpha1", c.alpha1},
      {"alpha2", c.alpha2},
      {"alpha3", c.alpha3},
      {"gamma", c.gamma},
      {"episode_horizon", c.episode_horizon},
      {"episodes_per_iteration", c.episodes_per_iteration},
      {"iterations", c.iterations},
      {"clip_ratio", c.clip_ratio},
      {"ppo_epochs", c.ppo_epochs},
      {"minibatch_size", c.minibatch_size},
      {"inference_epochs", c.inference_epochs},
      {"lr_policy", c.lr_policy},
      {"lr_embedding", c.lr_embedding},
      {"lr_inference", c.lr_inference},
      {"max_grad_norm", c.max_grad_norm},
      {"lr_anneal", c.lr_anneal},
      {"hidden", c.hidden},
      {"obs_scale", c.obs_scale},
      {"policy_init_log_std", c.policy_init_log_std},
      {"embedding_init_log_std", c.embedding_init_log_std},
      {"embedding_init_scale", c.embedding_init_scale},
      {"threads", c.threads},
  };
}

EmbedConfig embed_config_from_json(const json& d) {
  EmbedConfig c;
  c.n_tasks = d.at("n_tasks").get<int>();
  c.latent_dim = d.at("latent_dim").get<int>();
  c.window_len = d.at("window_len").get<int>();
  c.alpha1 = d.at("alpha1").get<double>();
  c.alpha2 = d.at("alpha2").get<double>();
  c.alpha3 = d.at("alpha3").get<double>();
  c.gamma = d.at("gamma").get<double>();
  c.episode_horizon = d.at("episode_horizon").get<int>();
  c.episodes_per_iteration = d.at("episodes_per_iteration").get<int>();
  c.iterations = d.at("iterations").get<int>();
  c.clip_ratio = d.at("clip_ratio").get<double>();
  c.ppo_epochs = d.at("ppo_epochs").get<int>();
  c.minibatch_size = d.at("minibatch_size").get<int>();
  c.inference_epochs = d.at("inference_epochs").get<int>();
  c.lr_policy = d.at("lr_policy").get<double>();
  c.lr_embedding = d.at("lr_embedding").get<double>();
  c.lr_inference = d.at("lr_inference").get<double>();
  c.max_grad_norm = d.at("max_grad_norm").get<double>();
  c.lr_anneal = d.at("lr_anneal").get<bool>();
  c.hidden = d.at("hidden").get<std::vector<int>>();
  c.obs_scale = d.at("obs_scale").get<double>();
  c.policy_init_log_std = d.at("policy_init_log_std").get<double>();
  c.embedding_init_log_std = d.at("embedding_init_log_std").get<double>();
  c.embedding_init_scale = d.at("embedding_init_scale").get<double>();
  c.threads = d.at("threads").get<int>();
  return c;
}

json checkpoint_to_json(const SkillCheckpoint& ckpt) {
  const SkillModel& m = ckpt.model;
  return {
      {"format", kFormatName},
      {"format_version", ckpt.format_version},
      {"env_family", ckpt.env_family},
      {"iteration", ckpt.iteration},
      {"rng", {{"seed", ckpt.seed}, {"iterations", ckpt.iteration}}},
      {"env", {{"obs_dim", m.obs_dim}, {"action_dim", m.action_dim}, {"action_scale", m.action_scale}}},
      {"config", embed_config_to_json(m.config)},
      {"networks",
       {{"policy", network_to_json(m.policy)},
        {"embedding", network_to_json(m.embedding)},
        {"inference", network_to_json(m.inference)}}},
  };
}

SkillCheckpoint checkpoint_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormatName) {
      throw FormatError("not a skillmpc checkpoint");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != SkillCheckpoint::kFormatVersion) {
      throw FormatError("unsupported checkpoint format_version " + std::to_string(version));
    }
    SkillCheckpoint ckpt;
    ckpt.format_version = version;
    ckpt.env_family = doc.at("env_family").get<std::string>();
    ckpt.iteration = doc.at("iteration").get<int>();
    ckpt.seed = doc.at("rng").at("seed").get<std::uint64_t>();
    SkillModel& m = ckpt.model;
    m.obs_dim = doc.at("env").at("obs_dim").get<int>();
    m.action_dim = doc.at("env").at("action_dim").get<int>();
    m.action_scale = doc.at("env").at("action_scale").get<double>();
    m.config = embed_config_from_json(doc.at("config"));
    const json& nets = doc.at("networks");
    m.policy = network_from_json(nets.at("policy"), "policy");
    m.embedding = network_from_json(nets.at("embedding"), "embedding");
    m.inference = network_from_json(nets.at("inference"), "inference");
    try {
      m.validate();
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("checkpoint is inconsistent: ") + e.what());
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

std::string serialize_checkpoint(const SkillCheckpoint& ckpt) {
  return checkpoint_to_json(ckpt).dump(1) + "\n";
}

SkillCheckpoint parse_checkpoint(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  return checkpoint_from_json(doc);
}

void save_checkpoint(const std::filesystem::path& path, const SkillCheckpoint& ckpt) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

SkillCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace skillmpc
