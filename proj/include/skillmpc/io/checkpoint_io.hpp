#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "skillmpc/embed/trainer.hpp"

namespace skillmpc {

// Checkpoints are JSON documents:
//   format, format_version, env_family, iteration, rng {seed, iterations},
//   env {obs_dim, action_dim, action_scale}, config {...},
//   networks {policy|embedding|inference: {layer_sizes, weights, biases}}
// Weights are row-major. Doubles are printed in shortest round-trip form, so
// load(save(x)) reproduces every parameter bit for bit.
nlohmann::json checkpoint_to_json(const SkillCheckpoint& ckpt);
SkillCheckpoint checkpoint_from_json(const nlohmann::json& doc);

nlohmann::json embed_config_to_json(const EmbedConfig& config);
EmbedConfig embed_config_from_json(const nlohmann::json& doc);

std::string serialize_checkpoint(const SkillCheckpoint& ckpt);
// Throws FormatError on malformed input or an unknown format version.
SkillCheckpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const SkillCheckpoint& ckpt);
SkillCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace skillmpc
