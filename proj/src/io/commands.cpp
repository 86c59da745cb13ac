#include "skillmpc/io/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "skillmpc/embed/task_family.hpp"
#include "skillmpc/embed/trainer.hpp"
#include "skillmpc/errors.hpp"
#include "skillmpc/io/checkpoint_io.hpp"
#include "skillmpc/io/files.hpp"
#include "skillmpc/io/logs.hpp"
#include "skillmpc/io/run_config.hpp"
#include "skillmpc/mpc/composer.hpp"
#include "skillmpc/numerics/gaussian.hpp"

namespace skillmpc {
namespace fs = std::filesystem;

namespace {

// Runtime failure whose message is already user-facing.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string checkpoint;
  std::string spec;
  std::string out;
  std::string log;
  std::optional<std::uint64_t> seed;
  bool open_loop = false;
  int open_loop_steps = 0;
};

RunConfig load_config(const Options& o) {
  RunConfig c = load_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) c.output_dir = env;
  if (!o.out.empty()) c.output_dir = o.out;
  c.validate();
  return c;
}

SkillCheckpoint load_matching_checkpoint(const std::string& path, const RunConfig& c) {
  SkillCheckpoint ckpt = load_checkpoint(path);
  if (ckpt.env_family != to_string(c.env)) {
    throw ValidationFailure("checkpoint was trained on '" + ckpt.env_family +
                            "' but the config selects '" + to_string(c.env) + "'");
  }
  if (ckpt.model.config.n_tasks != c.tasks.size()) {
    throw ValidationFailure("checkpoint has " + std::to_string(ckpt.model.config.n_tasks) +
                            " tasks but the config lists " + std::to_string(c.tasks.size()));
  }
  auto env = make_planar_env(c.env);
  if (ckpt.model.obs_dim != env->obs_dim() || ckpt.model.action_dim != env->action_dim()) {
    throw ValidationFailure("checkpoint network shapes do not match the '" + to_string(c.env) +
                            "' environment");
  }
  return ckpt;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = load_config(o);
  const PlanarTaskFamily family(c.env, c.tasks, c.task_options);
  const fs::path dir = c.output_dir;
  std::string metrics;
  const auto t0 = std::chrono::steady_clock::now();
  TrainHooks hooks;
  hooks.on_iteration = [&](const IterationMetrics& m) {
    metrics += metrics_record(m);
    if (m.iteration % 10 == 0 || m.iteration == c.embed.iterations) {
      const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      double dist = 0.0;
      for (double d : m.task_final_distance) dist = std::max(dist, d);
      err << "iteration " << m.iteration << "/" << c.embed.iterations
          << "  worst final distance " << dist << "  (" << t << " s)\n";
    }
  };
  const SkillCheckpoint ckpt = train(c.embed, family, c.require_seed(), hooks);
  save_checkpoint(dir / "checkpoint.json", ckpt);
  write_file_atomic(dir / "metrics.ndjson", metrics);
  out << "checkpoint=" << (dir / "checkpoint.json").string() << "\n";
  out << "metrics=" << (dir / "metrics.ndjson").string() << "\n";
  return kExitOk;
}

int cmd_compose(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = load_config(o);
  const SkillCheckpoint ckpt = load_matching_checkpoint(o.checkpoint, c);
  const SequenceTaskSpec spec = load_task_spec(o.spec);

  auto real = wrap_perturbed(make_planar_env(c.env), c.perturbation);
  auto sim = make_planar_env(c.env);
  Rng reset_rng(c.require_seed());
  real->reset(reset_rng);
  const Rng rng(Rng::derive(c.require_seed(), 0xc0));

  CompositionLog log;
  if (o.open_loop) {
    const int steps = o.open_loop_steps > 0
                          ? o.open_loop_steps
                          : c.mpc.max_latent_choices * c.mpc.exec_steps;
    log = open_loop_baseline(*real, *sim, ckpt.model, spec, c.mpc, steps, rng);
  } else {
    log = compose(*real, *sim, ckpt.model, spec, c.mpc, rng);
  }

  const fs::path dir = c.output_dir;
  write_file_atomic(dir / "composition.csv", composition_csv(log));
  write_file_atomic(dir / "candidates.csv", candidates_csv(log));
  write_file_atomic(dir / "summary.txt", composition_summary(log));
  out << composition_summary(log);
  out << "wall_time_s=" << log.wall_time_s << "\n";
  if (!log.completed) {
    err << "task not completed: reached " << log.final_progress << " of " << spec.size()
        << " waypoints with " << log.latent_choices << " latent choices\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream&) {
  const RunConfig c = load_config(o);
  const SkillCheckpoint ckpt = load_matching_checkpoint(o.checkpoint, c);
  const PlanarTaskFamily family(c.env, c.tasks, c.task_options);
  const SkillModel& m = ckpt.model;
  const std::uint64_t seed = c.require_seed();
  const TaskEvaluation ev = evaluate_tasks(m, family, c.eval.episodes_per_task,
                                           m.config.episode_horizon, Rng::derive(seed, 0xe1));
  const IdentifiabilityReport id =
      measure_identifiability(m, family, c.eval.identifiability_windows,
                              m.config.episode_horizon, Rng::derive(seed, 0xe2));

  std::ostringstream r;
  r.precision(10);
  r << "env=" << to_string(c.env) << "\n";
  r << "tasks=" << family.n_tasks() << "\n";
  r << "iteration=" << ckpt.iteration << "\n";
  r << "episodes_per_task=" << c.eval.episodes_per_task << "\n";
  for (int t = 0; t < family.n_tasks(); ++t) {
    const std::size_t i = static_cast<std::size_t>(t);
    r << "task_" << t << "_return=" << ev.mean_return[i] << "\n";
    r << "task_" << t << "_final_distance=" << ev.mean_final_distance[i] << "\n";
    r << "task_" << t << "_embedding_entropy=" << ev.embedding_entropy[i] << "\n";
  }
  r << "embedding_entropy_floor=" << entropy_floor(m.config.latent_dim) << "\n";
  r << "identifiability_windows=" << id.windows << "\n";
  r << "identifiability_pairwise=" << id.pairwise_rate << "\n";
  r << "identifiability_all_tasks=" << id.all_tasks_rate << "\n";
  r << "identifiability_chance=" << 1.0 / family.n_tasks() << "\n";
  write_file_atomic(fs::path(c.output_dir) / "eval.txt", r.str());
  out << r.str();
  return kExitOk;
}

int cmd_plot(const Options& o, std::ostream& out, std::ostream&) {
  const TrajectoryLog log = parse_composition_csv(read_file(o.log));
  fs::path dir = o.out;
  if (dir.empty()) {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) dir = env;
  }
  if (dir.empty()) dir = fs::path(o.log).parent_path();
  const fs::path svg = dir / (fs::path(o.log).stem().string() + ".svg");
  write_file_atomic(svg, render_trajectory_svg(log));
  out << "svg=" << svg.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skill embeddings and latent-space MPC for planar reach and push tasks",
               "skillmpc"};
  app.require_subcommand(1);
  Options o;
  auto seed_opt = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { o.seed = s; }, "Override the config seed");
  };

  auto* train_cmd = app.add_subcommand("train", "Train skill embedding networks");
  train_cmd->add_option("--config", o.config, "Run config (INI)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", o.out, "Output directory");
  seed_opt(train_cmd);

  auto* compose_cmd = app.add_subcommand("compose", "Compose skills for a waypoint task");
  compose_cmd->add_option("--config", o.config, "Run config (INI)")->required()->check(CLI::ExistingFile);
  compose_cmd->add_option("--checkpoint", o.checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  compose_cmd->add_option("--spec", o.spec, "Task spec (INI)")->required()->check(CLI::ExistingFile);
  compose_cmd->add_option("--out", o.out, "Output directory");
  compose_cmd->add_flag("--open-loop", o.open_loop,
                        "Run one latent chosen at the start, open loop, instead of MPC");
  compose_cmd->add_option("--open-loop-steps", o.open_loop_steps,
                          "Real steps for --open-loop (default: budget x exec_steps)");
  seed_opt(compose_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Report per-task return, entropy and identifiability");
  eval_cmd->add_option("--config", o.config, "Run config (INI)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--checkpoint", o.checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", o.out, "Output directory");
  seed_opt(eval_cmd);

  auto* plot_cmd = app.add_subcommand("plot", "Render a composition log as SVG");
  plot_cmd->add_option("log", o.log, "composition.csv written by compose")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", o.out, "Output directory (default: next to the log)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "skillmpc: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(o, out, err);
    if (*compose_cmd) return cmd_compose(o, out, err);
    if (*eval_cmd) return cmd_eval(o, out, err);
    if (*plot_cmd) return cmd_plot(o, out, err);
  } catch (const ConfigError& e) {
    err << "skillmpc: invalid " << e.field() << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const FormatError& e) {
    err << "skillmpc: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationFailure& e) {
    err << "skillmpc: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "skillmpc: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace skillmpc
