#include "skillmpc/io/logs.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <json.hpp>

#include "skillmpc/errors.hpp"

namespace skillmpc {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw FormatError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad number '" + s + "'");
  }
}

Vec2 parse_pair(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  if (parts.size() != 2) throw FormatError("expected x,y in '" + s + "'");
  return Vec2(parse_double(parts[0]), parse_double(parts[1]));
}

}  // namespace

std::string metrics_record(const IterationMetrics& m) {
  nlohmann::json j = {
      {"iteration", m.iteration},
      {"task_episodes", m.task_episodes},
      {"task_return", m.task_return},
      {"task_final_distance", m.task_final_distance},
      {"embedding_entropy", m.embedding_entropy},
      {"policy_entropy", m.policy_entropy},
      {"inference_log_prob", m.inference_log_prob},
      {"inference_loss", m.inference_loss},
      {"surrogate", m.ppo.surrogate},
      {"approx_kl", m.ppo.approx_kl},
      {"clip_fraction", m.ppo.clip_fraction},
  };
  return j.dump() + "\n";
}

std::string composition_csv(const CompositionLog& log) {
  const bool push = log.kind == EnvKind::kPush;
  std::ostringstream out;
  out << "# env=" << to_string(log.kind) << "\n";
  out << "# target=" << (log.spec.target == Entity::kBox ? "box" : "gripper") << "\n";
  out << "# tolerance=" << num(log.spec.tolerance) << "\n";
  for (const Vec2& w : log.spec.waypoints) out << "# waypoint=" << num(w.x()) << "," << num(w.y()) << "\n";
  out << "# start=" << num(log.initial.gripper_pos.x()) << "," << num(log.initial.gripper_pos.y()) << "\n";
  if (push) {
    out << "# box_start=" << num(log.initial.box_pos.x()) << "," << num(log.initial.box_pos.y()) << "\n";
  }
  int dz = 0;
  for (const auto& s : log.steps) dz = std::max(dz, static_cast<int>(s.z.size()));
  out << "round,step,gripper_x,gripper_y";
  if (push) out << ",box_x,box_y,box_yaw";
  out << ",progress,latent_index";
  for (int d = 0; d < dz; ++d) out << ",z_" << d;
  out << ",reward\n";
  for (const auto& s : log.steps) {
    out << s.round << "," << s.step << "," << num(s.state.gripper_pos.x()) << ","
        << num(s.state.gripper_pos.y());
    if (push) {
      out << "," << num(s.state.box_pos.x()) << "," << num(s.state.box_pos.y()) << ","
          << num(s.state.box_yaw);
    }
    out << "," << s.progress << "," << s.latent_index;
    for (int d = 0; d < dz; ++d) out << "," << (d < s.z.size() ? num(s.z[d]) : "");
    out << "," << num(s.reward) << "\n";
  }
  return out.str();
}

std::string candidates_csv(const CompositionLog& log) {
  std::ostringstream out;
  out << "round,candidate,return,chosen\n";
  for (const auto& r : log.rounds) {
    for (std::size_t i = 0; i < r.candidate_returns.size(); ++i) {
      out << r.round << "," << i << "," << num(r.candidate_returns[i]) << ","
          << (static_cast<int>(i) == r.chosen ? 1 : 0) << "\n";
    }
  }
  return out.str();
}

std::string composition_summary(const CompositionLog& log) {
  std::ostringstream out;
  out << "env=" << to_string(log.kind) << "\n";
  out << "completed=" << (log.completed ? "true" : "false") << "\n";
  out << "latent_choices=" << log.latent_choices << "\n";
  out << "real_steps=" << log.steps.size() << "\n";
  out << "waypoints=" << log.spec.size() << "\n";
  out << "waypoints_reached=" << log.final_progress << "\n";
  return out.str();
}

TrajectoryLog parse_composition_csv(const std::string& text) {
  TrajectoryLog log;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  bool have_env = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = boost::trim_copy(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "env") {
        try {
          log.kind = env_kind_from_string(value);
        } catch (const ConfigError&) {
          throw FormatError("unknown env '" + value + "' in log");
        }
        have_env = true;
      } else if (key == "waypoint") {
        log.waypoints.push_back(parse_pair(value));
      } else if (key == "start") {
        log.start = parse_pair(value);
      } else if (key == "box_start") {
        log.box_start = parse_pair(value);
      }
      continue;
    }
    std::vector<std::string> cells;
    boost::split(cells, line, boost::is_any_of(","));
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size()) {
      throw FormatError("row has " + std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(header.size()));
    }
    auto col = [&](const std::string& name) -> const std::string& {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw FormatError("log has no column " + name);
      return cells[static_cast<std::size_t>(it - header.begin())];
    };
    log.rounds.push_back(static_cast<int>(parse_double(col("round"))));
    log.progress.push_back(static_cast<int>(parse_double(col("progress"))));
    log.gripper.emplace_back(parse_double(col("gripper_x")), parse_double(col("gripper_y")));
    if (log.kind == EnvKind::kPush) {
      log.box.emplace_back(parse_double(col("box_x")), parse_double(col("box_y")));
    }
  }
  if (!have_env) throw FormatError("log is missing its '# env=' header");
  if (log.gripper.empty()) throw FormatError("log contains no steps");
  return log;
}

std::string render_trajectory_svg(const TrajectoryLog& log) {
  if (log.gripper.empty()) throw FormatError("nothing to plot");
  // world bounds -> square canvas, y up
  double lo_x = log.start.x(), hi_x = log.start.x();
  double lo_y = log.start.y(), hi_y = log.start.y();
  auto extend = [&](const Vec2& p) {
    lo_x = std::min(lo_x, p.x());
    hi_x = std::max(hi_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_y = std::max(hi_y, p.y());
  };
  for (const Vec2& p : log.gripper) extend(p);
  for (const Vec2& p : log.box) extend(p);
  for (const Vec2& p : log.waypoints) extend(p);
  if (log.kind == EnvKind::kPush) extend(log.box_start);
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 0.05}) * 1.15;
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  constexpr double kSize = 600.0, kPad = 40.0;
  const double scale = (kSize - 2 * kPad) / span;
  auto px = [&](const Vec2& p) {
    return Vec2(kSize / 2 + (p.x() - cx) * scale, kSize / 2 - (p.y() - cy) * scale);
  };
  auto polyline = [&](const std::vector<Vec2>& pts, const char* cls, const char* color) {
    std::string s = std::string("<polyline class=\"") + cls + "\" fill=\"none\" stroke=\"" + color +
                    "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 q = px(pts[i]);
      if (i) s += " ";
      s += coord(q.x()) + "," + coord(q.y());
    }
    return s + "\"/>\n";
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
         "viewBox=\"0 0 600 600\">\n";
  out << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
      << (log.kind == EnvKind::kPush ? "Box and gripper positions" : "Gripper positions")
      << "</text>\n";
  out << polyline(log.gripper, "gripper", "#1f77b4");
  if (!log.box.empty()) out << polyline(log.box, "box", "#ff7f0e");

  // a new latent takes over at the position reached by the previous round
  const std::vector<Vec2>& tracked = log.box.empty() ? log.gripper : log.box;
  Vec2 where = log.box.empty() ? log.start : log.box_start;
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    if (i == 0 || log.rounds[i] != log.rounds[i - 1]) {
      const Vec2 q = px(where);
      out << "<circle class=\"switch\" cx=\"" << coord(q.x()) << "\" cy=\"" << coord(q.y())
          << "\" r=\"3\" fill=\"black\"/>\n";
    }
    where = tracked[i];
  }
  for (std::size_t i = 0; i < log.waypoints.size(); ++i) {
    const Vec2 q = px(log.waypoints[i]);
    out << "<rect class=\"waypoint\" x=\"" << coord(q.x() - 6) << "\" y=\"" << coord(q.y() - 6)
        << "\" width=\"12\" height=\"12\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << coord(q.x() + 8) << "\" y=\"" << coord(q.y() - 8)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">" << (i + 1)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace skillmpc
