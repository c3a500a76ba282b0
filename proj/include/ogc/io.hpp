#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ogc/curriculum.hpp"
#include "ogc/harness.hpp"
#include "ogc/level.hpp"
#include "ogc/mutator.hpp"

namespace ogc::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Levels
//
// JSONL record: {"height", "width", "grid": rows joined by "\n" (tiles only),
// "agents": [[row, col, dir], ...]} with dir 0..3 = up, down, left, right.
// "frame": [h, w] is the designed top-left part; without it the frame is
// inferred as for ASCII input.

inline std::string grid_rows(const Level& level) {
  std::string out;
  for (int r = 0; r < level.height; ++r) {
    if (r) out.push_back('\n');
    for (int c = 0; c < level.width; ++c) out.push_back(tile_symbol(level.at({r, c})));
  }
  return out;
}

inline json level_to_json(const Level& level) {
  json agents = json::array();
  for (const auto& a : level.agents) agents.push_back({a.cell.row, a.cell.col, static_cast<int>(a.dir)});
  return {{"height", level.height},
          {"width", level.width},
          {"grid", grid_rows(level)},
          {"agents", agents},
          {"frame", {level.frame_h, level.frame_w}}};
}

inline Level level_from_json(const json& j, const ValidateOptions& opts = {}) {
  try {
    Level level(j.at("height").get<int>(), j.at("width").get<int>());
    const auto rows = split_rows(j.at("grid").get<std::string>());
    if (static_cast<int>(rows.size()) != level.height) throw FormatError("grid row count differs from height");
    for (int r = 0; r < level.height; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (static_cast<int>(row.size()) != level.width) throw FormatError("grid row width differs from width");
      for (int c = 0; c < level.width; ++c) {
        const auto t = symbol_tile(row[static_cast<std::size_t>(c)]);
        if (!t) throw FormatError(std::string("unknown grid symbol '") + row[static_cast<std::size_t>(c)] + "'");
        level.set({r, c}, *t);
      }
    }
    if (j.contains("frame")) {
      level.frame_h = j["frame"].at(0).get<int>();
      level.frame_w = j["frame"].at(1).get<int>();
    } else {
      infer_frame(level);
    }
    const auto& agents = j.at("agents");
    if (!agents.is_array() || agents.size() != 2) throw FormatError("level record needs exactly 2 agents");
    for (std::size_t a = 0; a < 2; ++a) {
      const int dir = agents[a].at(2).get<int>();
      if (dir < 0 || dir > 3) throw FormatError("agent direction must be 0..3");
      level.agents[a] = {{agents[a].at(0).get<int>(), agents[a].at(1).get<int>()}, static_cast<Direction>(dir)};
    }
    require_valid(level, opts);
    return level;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed level record: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
}

inline std::vector<std::string> nonblank_lines(const std::string& text) {
  std::vector<std::string> out;
  for (auto& line : split_rows(text)) {
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(std::move(line));
  }
  return out;
}

// Accepts either JSONL level records (first non-blank char '{') or ASCII
// grids separated by blank lines.
inline std::vector<Level> parse_levels(const std::string& text, const ValidateOptions& opts = {}) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw FormatError("level file is empty");
  std::vector<Level> out;
  if (text[first] == '{') {
    for (const auto& line : nonblank_lines(text)) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw FormatError(std::string("bad JSON line: ") + e.what());
      }
      out.push_back(level_from_json(j, opts));
    }
  } else {
    for (const auto& block : split_ascii_levels(text)) out.push_back(parse_ascii(block, opts));
  }
  return out;
}

inline std::vector<Level> load_levels(const std::string& path, const ValidateOptions& opts = {}) {
  return parse_levels(read_file(path), opts);
}

inline std::string levels_jsonl(const std::vector<Level>& levels) {
  std::string out;
  for (const auto& l : levels) out += level_to_json(l).dump() + "\n";
  return out;
}

inline std::string levels_ascii(const std::vector<Level>& levels) {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) out += "\n";
    out += render_ascii(levels[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectories
//
// First line: {"level": <level record>, "seed": "<decimal>"}; then one line
// per step: {"t", "actions": [name, name], "reward", "shaped": [a, b],
// "events": [{"kind", "agent"}], "agent_pos": [[r, c], [r, c]]}.

inline std::optional<Action> action_from_name(const std::string& name) {
  for (Action a : kActions) {
    if (name == action_name(a)) return a;
  }
  return std::nullopt;
}

inline std::optional<EventKind> event_from_name(const std::string& name) {
  for (EventKind k : {EventKind::Delivery, EventKind::OnionPotted, EventKind::PlatePickup, EventKind::SoupPickup}) {
    if (name == event_name(k)) return k;
  }
  return std::nullopt;
}

inline json step_to_json(const TrajectoryStep& s) {
  json events = json::array();
  for (const auto& e : s.events) events.push_back({{"kind", event_name(e.kind)}, {"agent", e.agent}});
  return {{"t", s.t},
          {"actions", {action_name(s.actions[0]), action_name(s.actions[1])}},
          {"reward", s.reward},
          {"shaped", {s.shaped[0], s.shaped[1]}},
          {"events", events},
          {"agent_pos", {{s.agent_pos[0].row, s.agent_pos[0].col}, {s.agent_pos[1].row, s.agent_pos[1].col}}}};
}

inline std::string trajectory_jsonl(const Trajectory& tr) {
  std::string out = json{{"level", level_to_json(tr.level)}, {"seed", std::to_string(tr.seed)}}.dump() + "\n";
  for (const auto& s : tr.steps) out += step_to_json(s).dump() + "\n";
  return out;
}

inline Trajectory parse_trajectory(const std::string& text) {
  const auto lines = nonblank_lines(text);
  if (lines.empty()) throw FormatError("trajectory file is empty");
  try {
    Trajectory tr;
    const json head = json::parse(lines[0]);
    tr.level = level_from_json(head.at("level"));
    tr.seed = std::stoull(head.at("seed").get<std::string>());
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const json j = json::parse(lines[i]);
      TrajectoryStep s;
      s.t = j.at("t").get<int>();
      for (std::size_t a = 0; a < 2; ++a) {
        const auto act = action_from_name(j.at("actions").at(a).get<std::string>());
        if (!act) throw FormatError("unknown action in trajectory");
        s.actions[a] = *act;
        s.shaped[a] = j.at("shaped").at(a).get<double>();
        s.agent_pos[a] = {j.at("agent_pos").at(a).at(0).get<int>(), j.at("agent_pos").at(a).at(1).get<int>()};
        if (!tr.level.contains(s.agent_pos[a])) throw FormatError("trajectory position outside the level");
      }
      s.reward = j.at("reward").get<double>();
      for (const auto& e : j.at("events")) {
        const auto kind = event_from_name(e.at("kind").get<std::string>());
        if (!kind) throw FormatError("unknown event in trajectory");
        s.events.push_back({*kind, e.at("agent").get<int>()});
      }
      tr.steps.push_back(std::move(s));
    }
    return tr;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed trajectory: ") + e.what());
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const LevelError*>(&e)) throw;
    throw FormatError(std::string("malformed trajectory: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Stats and metrics

inline json metrics_to_json(const Metrics& m) {
  return {{"mean_return", m.mean_return},
          {"solved_rate", m.solved_rate},
          {"std_return", m.std_return},
          {"n_episodes", m.n_episodes}};
}

inline json suite_to_json(const SuiteReport& r) {
  json out = metrics_to_json(r.overall);
  json per = json::array();
  for (const auto& l : r.per_level) {
    json e = metrics_to_json(l.metrics);
    e["name"] = l.name;
    e["digest"] = l.digest.hex();
    per.push_back(e);
  }
  out["per_level"] = per;
  return out;
}

inline json stats_to_json(const EpisodeStats& s) {
  return {{"digest", s.digest.hex()},     {"shared_return", s.shared_return},
          {"shaped_return", s.shaped_return}, {"deliveries", s.deliveries},
          {"solved", s.solved},           {"height", s.height},
          {"width", s.width},             {"visits", s.visits}};
}

inline json op_to_json(const MutationOp& op) {
  return {{"op", mutation_name(op.kind)}, {"from", {op.from.row, op.from.col}}, {"to", {op.to.row, op.to.col}}};
}

inline json certificate_to_json(const SolvabilityReport& r) {
  json out{{"solvable", r.solvable}, {"agent_regions", r.agent_regions}};
  if (r.certificate) {
    const auto& c = *r.certificate;
    json handovers = json::array();
    for (const auto& h : c.handovers) {
      handovers.push_back({{"counter", {h.counter.row, h.counter.col}}, {"from", h.from_region}, {"to", h.to_region}});
    }
    out["certificate"] = {{"pot", {c.pot.row, c.pot.col}},
                          {"load_region", c.load_region},
                          {"serve_region", c.serve_region},
                          {"onion_region", c.onion_region},
                          {"plate_region", c.plate_region},
                          {"goal_region", c.goal_region},
                          {"handovers", handovers}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Buffer checkpoints: one JSON line per entry, scores as 17-significant-digit
// strings so reload is bit-exact.

inline std::string exact_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_exact_double(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) throw FormatError("bad score string '" + s + "'");
  return v;
}

inline std::string buffer_checkpoint(const LevelBuffer& buffer) {
  std::string out;
  for (const auto& e : buffer.entries()) {
    out += json{{"digest", e.digest.hex()},
                {"level", render_ascii(e.level)},
                {"agent_dirs", {static_cast<int>(e.level.agents[0].dir), static_cast<int>(e.level.agents[1].dir)}},
                {"frame", {e.level.frame_h, e.level.frame_w}},
                {"score", exact_double(e.score)},
                {"last_sampled_episode", e.last_sampled_episode},
                {"insert_episode", e.insert_episode}}
               .dump() +
           "\n";
  }
  return out;
}

inline LevelBuffer load_buffer_checkpoint(const std::string& text, std::size_t capacity) {
  LevelBuffer buffer(capacity);
  for (const auto& line : nonblank_lines(text)) {
    try {
      const json j = json::parse(line);
      LevelBufferEntry e;
      e.level = parse_ascii(j.at("level").get<std::string>());
      if (j.contains("agent_dirs")) {
        for (std::size_t a = 0; a < 2; ++a) e.level.agents[a].dir = static_cast<Direction>(j["agent_dirs"][a].get<int>());
      }
      if (j.contains("frame")) {
        e.level.frame_h = j["frame"].at(0).get<int>();
        e.level.frame_w = j["frame"].at(1).get<int>();
        require_valid(e.level);
      }
      e.digest = level_digest(e.level);
      const auto stored = LevelDigest::from_hex(j.at("digest").get<std::string>());
      if (!stored || *stored != e.digest) throw FormatError("checkpoint digest does not match its level");
      e.score = parse_exact_double(j.at("score").get<std::string>());
      e.last_sampled_episode = j.at("last_sampled_episode").get<long>();
      e.insert_episode = j.at("insert_episode").get<long>();
      if (buffer.size() >= capacity) throw FormatError("checkpoint holds more entries than the buffer capacity");
      if (buffer.find(e.digest)) throw FormatError("checkpoint repeats a level digest");
      buffer.push(std::move(e));
    } catch (const json::exception& e) {
      throw FormatError(std::string("malformed checkpoint line: ") + e.what());
    }
  }
  return buffer;
}

}  // namespace ogc::io
