#include "skillmpc/io/run_config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "skillmpc/errors.hpp"
#include "skillmpc/io/files.hpp"

namespace skillmpc {
namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& raw, const std::string& field) {
  const std::string s = boost::trim_copy(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(field, field + ": expected a number, got '" + s + "'");
  }
  return v;
}

long long to_integer(const std::string& raw, const std::string& field) {
  const std::string s = boost::trim_copy(raw);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(field, field + ": expected an integer, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string& raw, const std::string& field) {
  const long long v = to_integer(raw, field);
  if (v < -2147483648LL || v > 2147483647LL) {
    throw ConfigError(field, field + ": out of range");
  }
  return static_cast<int>(v);
}

bool to_bool(const std::string& raw, const std::string& field) {
  const std::string s = boost::to_lower_copy(boost::trim_copy(raw));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(field, field + ": expected true or false, got '" + s + "'");
}

std::vector<int> to_int_list(const std::string& raw, const std::string& field) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(","));
  std::vector<int> out;
  for (const auto& p : parts) out.push_back(to_int(p, field));
  return out;
}

Vec2 to_point(const std::string& raw, const std::string& field) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(","));
  if (parts.size() != 2) {
    throw ConfigError(field, field + ": expected 'x,y', got '" + boost::trim_copy(raw) + "'");
  }
  return Vec2(to_double(parts[0], field), to_double(parts[1], field));
}

pt::ptree read_ini(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", std::string("malformed config: ") + e.message() +
                                    " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

using Setter = std::function<void(const std::string&)>;

// Applies every key in `section` through `setters`; unknown keys throw.
void apply_section(const pt::ptree& section, const std::string& prefix,
                   const std::map<std::string, Setter>& setters) {
  for (const auto& [key, child] : section) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (!child.empty()) throw ConfigError(name, "unexpected section " + name);
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(name, "unknown key " + name);
    it->second(child.data());
  }
}

}  // namespace

std::vector<Vec2> parse_points(const std::string& text, const std::string& field) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(";"));
  std::vector<Vec2> out;
  for (const auto& p : parts) {
    if (boost::trim_copy(p).empty()) continue;
    out.push_back(to_point(p, field));
  }
  return out;
}

RunConfig RunConfig::defaults(EnvKind env) {
  RunConfig c;
  c.env = env;
  c.tasks = TaskSet::defaults(env);
  c.embed.n_tasks = c.tasks.size();
  if (env == EnvKind::kPush) {
    c.embed.latent_dim = 3;
    // pushing needs the box to move before windows reveal the task, so the
    // inference bonus is kept small or it pulls all embeddings to one mean
    c.embed.alpha2 = 0.01;
    c.embed.episode_horizon = 50;
    c.embed.episodes_per_iteration = 64;
    c.embed.lr_policy = 1e-3;
    c.embed.lr_embedding = 1e-4;
    c.task_options.approach_weight = 1.0;
    c.mpc.candidates = 50;
    c.mpc.horizon = 30;
    c.mpc.exec_steps = 10;
    c.mpc.enforce_horizon_ratio = false;
  }
  return c;
}

void RunConfig::validate() const {
  tasks.validate(env);
  embed.validate();
  if (embed.n_tasks != tasks.size()) {
    throw ConfigError("embed.n_tasks", "embed.n_tasks must equal the number of goals");
  }
  task_options.validate();
  mpc.validate();
  perturbation.validate();
  if (!seed) throw ConfigError("seed", "seed must be set in the config or with --seed");
  if (output_dir.empty()) throw ConfigError("output_dir", "output_dir must not be empty");
  if (eval.episodes_per_task < 1) {
    throw ConfigError("eval.episodes_per_task", "eval.episodes_per_task must be ≥ 1");
  }
  if (eval.identifiability_windows < 1) {
    throw ConfigError("eval.identifiability_windows",
                      "eval.identifiability_windows must be ≥ 1");
  }
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("seed", "seed must be set in the config or with --seed");
  return *seed;
}

RunConfig parse_run_config(const std::string& text) {
  const pt::ptree tree = read_ini(text);

  EnvKind env = EnvKind::kReach;
  if (auto e = tree.get_child_optional("env")) {
    env = env_kind_from_string(boost::trim_copy(e->data()));
  }
  RunConfig c = RunConfig::defaults(env);
  bool n_tasks_given = false;

  const std::map<std::string, Setter> top = {
      {"env", [](const std::string&) {}},
      {"seed",
       [&](const std::string& v) {
         const long long s = to_integer(v, "seed");
         if (s < 0) throw ConfigError("seed", "seed must be ≥ 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"output_dir", [&](const std::string& v) { c.output_dir = boost::trim_copy(v); }},
  };

  EmbedConfig& e = c.embed;
  const std::map<std::string, Setter> embed = {
      {"n_tasks", [&](const std::string& v) { e.n_tasks = to_int(v, "embed.n_tasks"); n_tasks_given = true; }},
      {"latent_dim", [&](const std::string& v) { e.latent_dim = to_int(v, "embed.latent_dim"); }},
      {"window_len", [&](const std::string& v) { e.window_len = to_int(v, "embed.window_len"); }},
      {"alpha1", [&](const std::string& v) { e.alpha1 = to_double(v, "embed.alpha1"); }},
      {"alpha2", [&](const std::string& v) { e.alpha2 = to_double(v, "embed.alpha2"); }},
      {"alpha3", [&](const std::string& v) { e.alpha3 = to_double(v, "embed.alpha3"); }},
      {"gamma", [&](const std::string& v) { e.gamma = to_double(v, "embed.gamma"); }},
      {"episode_horizon", [&](const std::string& v) { e.episode_horizon = to_int(v, "embed.episode_horizon"); }},
      {"episodes_per_iteration", [&](const std::string& v) { e.episodes_per_iteration = to_int(v, "embed.episodes_per_iteration"); }},
      {"iterations", [&](const std::string& v) { e.iterations = to_int(v, "embed.iterations"); }},
      {"clip_ratio", [&](const std::string& v) { e.clip_ratio = to_double(v, "embed.clip_ratio"); }},
      {"ppo_epochs", [&](const std::string& v) { e.ppo_epochs = to_int(v, "embed.ppo_epochs"); }},
      {"minibatch_size", [&](const std::string& v) { e.minibatch_size = to_int(v, "embed.minibatch_size"); }},
      {"inference_epochs", [&](const std::string& v) { e.inference_epochs = to_int(v, "embed.inference_epochs"); }},
      {"lr_policy", [&](const std::string& v) { e.lr_policy = to_double(v, "embed.lr_policy"); }},
      {"lr_embedding", [&](const std::string& v) { e.lr_embedding = to_double(v, "embed.lr_embedding"); }},
      {"lr_inference", [&](const std::string& v) { e.lr_inference = to_double(v, "embed.lr_inference"); }},
      {"max_grad_norm", [&](const std::string& v) { e.max_grad_norm = to_double(v, "embed.max_grad_norm"); }},
      {"lr_anneal", [&](const std::string& v) { e.lr_anneal = to_bool(v, "embed.lr_anneal"); }},
      {"hidden", [&](const std::string& v) { e.hidden = to_int_list(v, "embed.hidden"); }},
      {"obs_scale", [&](const std::string& v) { e.obs_scale = to_double(v, "embed.obs_scale"); }},
      {"policy_init_log_std", [&](const std::string& v) { e.policy_init_log_std = to_double(v, "embed.policy_init_log_std"); }},
      {"embedding_init_log_std", [&](const std::string& v) { e.embedding_init_log_std = to_double(v, "embed.embedding_init_log_std"); }},
      {"embedding_init_scale", [&](const std::string& v) { e.embedding_init_scale = to_double(v, "embed.embedding_init_scale"); }},
      {"threads", [&](const std::string& v) { e.threads = to_int(v, "embed.threads"); }},
  };

  MpcConfig& m = c.mpc;
  const std::map<std::string, Setter> mpc = {
      {"candidates", [&](const std::string& v) { m.candidates = to_int(v, "mpc.candidates"); }},
      {"horizon", [&](const std::string& v) { m.horizon = to_int(v, "mpc.horizon"); }},
      {"exec_steps", [&](const std::string& v) { m.exec_steps = to_int(v, "mpc.exec_steps"); }},
      {"gamma", [&](const std::string& v) { m.gamma = to_double(v, "mpc.gamma"); }},
      {"max_latent_choices", [&](const std::string& v) { m.max_latent_choices = to_int(v, "mpc.max_latent_choices"); }},
      {"mean_actions", [&](const std::string& v) { m.mean_actions = to_bool(v, "mpc.mean_actions"); }},
      {"advance_in_rollout", [&](const std::string& v) { m.advance_in_rollout = to_bool(v, "mpc.advance_in_rollout"); }},
      {"threads", [&](const std::string& v) { m.threads = to_int(v, "mpc.threads"); }},
      {"enforce_horizon_ratio", [&](const std::string& v) { m.enforce_horizon_ratio = to_bool(v, "mpc.enforce_horizon_ratio"); }},
  };

  PerturbationSpec& p = c.perturbation;
  const std::map<std::string, Setter> perturbation = {
      {"action_gain", [&](const std::string& v) { p.action_gain = to_double(v, "perturbation.action_gain"); }},
      {"action_rotation_deg",
       [&](const std::string& v) {
         p.action_rotation = to_double(v, "perturbation.action_rotation_deg") * std::numbers::pi / 180.0;
       }},
      {"action_bias", [&](const std::string& v) { p.action_bias = to_point(v, "perturbation.action_bias"); }},
      {"friction_scale", [&](const std::string& v) { p.friction_scale = to_double(v, "perturbation.friction_scale"); }},
  };

  const std::map<std::string, Setter> eval = {
      {"episodes_per_task", [&](const std::string& v) { c.eval.episodes_per_task = to_int(v, "eval.episodes_per_task"); }},
      {"identifiability_windows", [&](const std::string& v) { c.eval.identifiability_windows = to_int(v, "eval.identifiability_windows"); }},
  };

  bool goals_given = false;
  const std::map<std::string, Setter> tasks = {
      {"goals",
       [&](const std::string& v) {
         const Vec2 start = start_point(c.env);
         c.tasks.offsets.clear();
         for (const Vec2& g : parse_points(v, "tasks.goals")) c.tasks.offsets.push_back(g - start);
         goals_given = true;
       }},
      {"approach_weight", [&](const std::string& v) { c.task_options.approach_weight = to_double(v, "tasks.approach_weight"); }},
      {"start_ring",
       [&](const std::string& v) {
         const Vec2 r = to_point(v, "tasks.start_ring");
         c.task_options.start_ring_inner = r.x();
         c.task_options.start_ring_outer = r.y();
       }},
  };

  const std::map<std::string, const std::map<std::string, Setter>*> sections = {
      {"embed", &embed}, {"mpc", &mpc}, {"perturbation", &perturbation},
      {"eval", &eval}, {"tasks", &tasks}};

  for (const auto& [key, child] : tree) {
    if (child.empty() && !sections.count(key)) {
      auto it = top.find(key);
      if (it == top.end()) throw ConfigError(key, "unknown key " + key);
      it->second(child.data());
      continue;
    }
    auto it = sections.find(key);
    if (it == sections.end()) throw ConfigError(key, "unknown section [" + key + "]");
    apply_section(child, key, *it->second);
  }
  if (goals_given && !n_tasks_given) c.embed.n_tasks = c.tasks.size();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const FormatError& e) {
    throw ConfigError("config", e.what());
  }
  return parse_run_config(text);
}

SequenceTaskSpec parse_task_spec(const std::string& text) {
  const pt::ptree tree = read_ini(text);
  SequenceTaskSpec spec;
  bool have_waypoints = false;
  const std::map<std::string, Setter> task = {
      {"waypoints",
       [&](const std::string& v) {
         spec.waypoints = parse_points(v, "task.waypoints");
         have_waypoints = true;
       }},
      {"tolerance", [&](const std::string& v) { spec.tolerance = to_double(v, "task.tolerance"); }},
      {"target",
       [&](const std::string& v) {
         const std::string s = boost::to_lower_copy(boost::trim_copy(v));
         if (s == "gripper") spec.target = Entity::kGripper;
         else if (s == "box") spec.target = Entity::kBox;
         else throw ConfigError("task.target", "task.target must be gripper or box");
       }},
  };
  for (const auto& [key, child] : tree) {
    if (key != "task" || child.empty()) {
      throw ConfigError(key, "task spec files contain a single [task] section; found '" + key + "'");
    }
    apply_section(child, "task", task);
  }
  if (!have_waypoints) throw ConfigError("task.waypoints", "task.waypoints is required");
  spec.validate();
  return spec;
}

SequenceTaskSpec load_task_spec(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const FormatError& e) {
    throw ConfigError("spec", e.what());
  }
  return parse_task_spec(text);
}

}  // namespace skillmpc
