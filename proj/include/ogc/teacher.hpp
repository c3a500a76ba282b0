#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ogc/layouts.hpp"
#include "ogc/level.hpp"
#include "ogc/rng.hpp"

namespace ogc {

// Sequential level design: a teacher picks one cell index per step and the
// next element in a fixed order is placed there.
enum class TeacherPhase : std::uint8_t { WallBudget, Walls, Agent1, Agent2, Goal, Onion, Pot, Bowl, Done };

inline const char* phase_name(TeacherPhase p) {
  switch (p) {
    case TeacherPhase::WallBudget: return "wall_budget";
    case TeacherPhase::Walls: return "walls";
    case TeacherPhase::Agent1: return "agent1";
    case TeacherPhase::Agent2: return "agent2";
    case TeacherPhase::Goal: return "goal";
    case TeacherPhase::Onion: return "onion";
    case TeacherPhase::Pot: return "pot";
    case TeacherPhase::Bowl: return "bowl";
    case TeacherPhase::Done: return "done";
  }
  return "?";
}

inline constexpr int kStationsPerType = 2;

struct TeacherConfig {
  int height = kCanvasHeight;
  int width = kCanvasWidth;
  int max_walls = 15;
  int noise_dim = 50;

  int action_count() const { return height * width; }

  friend bool operator==(const TeacherConfig&, const TeacherConfig&) = default;
};

struct TeacherState {
  TeacherConfig config;
  Level canvas;  // agents are tracked separately until finalize
  std::array<std::optional<Cell>, 2> agents;
  TeacherPhase phase = TeacherPhase::WallBudget;
  int phase_step = 0;  // placements made in the current phase
  int budget = 0;
  std::vector<double> noise;
  int t = 0;
  Rng rng;

  bool done() const { return phase == TeacherPhase::Done; }
  int remaining_budget() const { return phase == TeacherPhase::Walls ? budget - phase_step : 0; }

  friend bool operator==(const TeacherState&, const TeacherState&) = default;
};

class TeacherError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline TeacherState teacher_reset(const Rng& rng, const TeacherConfig& config = {}) {
  if (config.height < 3 || config.width < 3) throw std::invalid_argument("teacher canvas must be at least 3x3");
  const int interior = (config.height - 2) * (config.width - 2);
  if (interior < config.max_walls + 2 + 4 * kStationsPerType) {
    throw std::invalid_argument("teacher canvas too small for the wall budget plus all elements");
  }
  TeacherState s;
  s.config = config;
  s.canvas = Level(config.height, config.width, Tile::Floor);
  for (std::size_t i = 0; i < s.canvas.size(); ++i) {
    if (s.canvas.on_border(s.canvas.cell(i))) s.canvas.grid[i] = Tile::Wall;
  }
  Rng noise_rng = rng.split(0);
  s.noise.resize(static_cast<std::size_t>(config.noise_dim));
  for (auto& x : s.noise) x = noise_rng.uniform();
  s.rng = rng.split(1);
  return s;
}

inline std::optional<Tile> phase_tile(TeacherPhase p) {
  switch (p) {
    case TeacherPhase::Walls: return Tile::Wall;
    case TeacherPhase::Goal: return Tile::Goal;
    case TeacherPhase::Onion: return Tile::OnionPile;
    case TeacherPhase::Pot: return Tile::Pot;
    case TeacherPhase::Bowl: return Tile::PlatePile;
    default: return std::nullopt;
  }
}

inline bool teacher_cell_free(const TeacherState& s, Cell c) {
  return s.canvas.at(c) == Tile::Floor && !s.canvas.on_border(c) && s.agents[0] != c && s.agents[1] != c;
}

inline Cell random_free_cell(TeacherState& s) {
  std::vector<Cell> free;
  for (std::size_t i = 0; i < s.canvas.size(); ++i) {
    if (teacher_cell_free(s, s.canvas.cell(i))) free.push_back(s.canvas.cell(i));
  }
  if (free.empty()) throw TeacherError("teacher canvas has no free cell left");
  return s.rng.pick(free);
}

inline void advance_phase(TeacherState& s) {
  ++s.phase_step;
  auto next = [&](TeacherPhase p) {
    s.phase = p;
    s.phase_step = 0;
  };
  switch (s.phase) {
    case TeacherPhase::WallBudget: next(TeacherPhase::Walls); break;
    case TeacherPhase::Walls:
      if (s.phase_step >= s.budget) next(TeacherPhase::Agent1);
      break;
    case TeacherPhase::Agent1: next(TeacherPhase::Agent2); break;
    case TeacherPhase::Agent2: next(TeacherPhase::Goal); break;
    case TeacherPhase::Goal:
      if (s.phase_step >= kStationsPerType) next(TeacherPhase::Onion);
      break;
    case TeacherPhase::Onion:
      if (s.phase_step >= kStationsPerType) next(TeacherPhase::Pot);
      break;
    case TeacherPhase::Pot:
      if (s.phase_step >= kStationsPerType) next(TeacherPhase::Bowl);
      break;
    case TeacherPhase::Bowl:
      if (s.phase_step >= kStationsPerType) next(TeacherPhase::Done);
      break;
    case TeacherPhase::Done: break;
  }
}

// One design step. Collision rules: same element type on the same cell is
// skipped; any other occupied cell (border counts as wall) relocates the new
// element to a uniformly random free cell.
inline std::pair<TeacherState, bool> teacher_step(TeacherState s, int action) {
  if (s.done()) throw TeacherError("teacher_step on a finished design episode");
  if (action < 0 || action >= s.config.action_count()) {
    throw std::out_of_range("teacher action " + std::to_string(action) + " outside [0, " +
                            std::to_string(s.config.action_count()) + ")");
  }
  const Cell c = s.canvas.cell(static_cast<std::size_t>(action));

  if (s.phase == TeacherPhase::WallBudget) {
    s.budget = 1 + action % s.config.max_walls;
  } else if (s.phase == TeacherPhase::Agent1 || s.phase == TeacherPhase::Agent2) {
    const auto a = static_cast<std::size_t>(s.phase == TeacherPhase::Agent1 ? 0 : 1);
    s.agents[a] = teacher_cell_free(s, c) ? c : random_free_cell(s);
  } else {
    const Tile tile = *phase_tile(s.phase);
    if (teacher_cell_free(s, c)) {
      s.canvas.set(c, tile);
    } else if (s.canvas.at(c) != tile) {
      s.canvas.set(random_free_cell(s), tile);
    }
  }

  ++s.t;
  advance_phase(s);
  const bool done = s.done();
  return {std::move(s), done};
}

inline Level finalize(const TeacherState& s) {
  if (!s.done()) throw TeacherError(std::string("finalize called in phase ") + phase_name(s.phase));
  Level level = s.canvas;
  level.agents = {AgentStart{*s.agents[0]}, AgentStart{*s.agents[1]}};
  require_valid(level, ValidateOptions{s.config.max_walls});
  return level;
}

// Observation handed to a teacher policy.
struct TeacherObservation {
  static constexpr int kChannels = 7;  // wall, goal, onion, pot, bowl, agent1, agent2
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> masks;
  int next_element = 0;  // TeacherPhase as integer
  double remaining_budget = 0.0;
  double time = 0.0;
  std::vector<double> noise;
};

inline TeacherObservation teacher_observe(const TeacherState& s) {
  TeacherObservation o;
  o.height = s.config.height;
  o.width = s.config.width;
  const auto plane = s.canvas.size();
  o.masks.assign(plane * TeacherObservation::kChannels, 0);
  for (std::size_t i = 0; i < plane; ++i) {
    int ch = -1;
    switch (s.canvas.grid[i]) {
      case Tile::Wall: ch = 0; break;
      case Tile::Goal: ch = 1; break;
      case Tile::OnionPile: ch = 2; break;
      case Tile::Pot: ch = 3; break;
      case Tile::PlatePile: ch = 4; break;
      case Tile::Floor: break;
    }
    if (ch >= 0) o.masks[static_cast<std::size_t>(ch) * plane + i] = 1;
  }
  for (std::size_t a = 0; a < 2; ++a) {
    if (s.agents[a]) o.masks[(5 + a) * plane + s.canvas.index(*s.agents[a])] = 1;
  }
  o.next_element = static_cast<int>(s.phase);
  o.remaining_budget = s.config.max_walls > 0 ? static_cast<double>(s.remaining_budget()) / s.config.max_walls : 0.0;
  const int max_len = 1 + s.config.max_walls + 2 + 4 * kStationsPerType;
  o.time = static_cast<double>(s.t) / max_len;
  o.noise = s.noise;
  return o;
}

// Action script that rebuilds `level` exactly (agents keep their order).
// Needs every station and wall off the border and at most max_walls walls.
inline std::vector<int> teacher_script_for(const Level& level, const TeacherConfig& config = {}) {
  if (level.height != config.height || level.width != config.width) {
    throw std::invalid_argument("teacher_script_for: level size differs from the teacher canvas");
  }
  if (level.padded()) throw std::invalid_argument("teacher_script_for: the teacher cannot build padded levels");
  auto idx = [&](Cell c) { return static_cast<int>(level.index(c)); };
  std::vector<Cell> walls;
  for (std::size_t i = 0; i < level.size(); ++i) {
    const Cell c = level.cell(i);
    if (level.on_border(c)) {
      if (level.grid[i] != Tile::Wall) throw std::invalid_argument("teacher cannot place elements on the border");
    } else if (level.grid[i] == Tile::Wall) {
      walls.push_back(c);
    }
  }
  if (static_cast<int>(walls.size()) > config.max_walls) {
    throw std::invalid_argument("teacher_script_for: level has more walls than the teacher budget");
  }

  std::vector<int> script;
  const int budget = std::max<int>(1, static_cast<int>(walls.size()));
  script.push_back(budget - 1);
  for (Cell w : walls) script.push_back(idx(w));
  // A zero-wall level still spends one wall step; aim it at the border, where it is skipped.
  if (walls.empty()) script.push_back(0);
  script.push_back(idx(level.agents[0].cell));
  script.push_back(idx(level.agents[1].cell));
  for (Tile t : {Tile::Goal, Tile::OnionPile, Tile::Pot, Tile::PlatePile}) {
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (level.grid[i] == t) cells.push_back(level.cell(i));
    }
    if (cells.empty() || cells.size() > kStationsPerType) {
      throw std::invalid_argument(std::string("teacher_script_for: need 1-2 ") + tile_name(t) + " tiles");
    }
    script.push_back(idx(cells[0]));
    script.push_back(idx(cells.size() == 2 ? cells[1] : cells[0]));
  }
  return script;
}

struct DesignEpisode {
  Level level;
  std::vector<int> actions;
};

inline DesignEpisode run_teacher_script(const Rng& rng, const std::vector<int>& script, const TeacherConfig& config = {}) {
  TeacherState s = teacher_reset(rng, config);
  std::vector<int> used;
  for (int a : script) {
    if (s.done()) break;
    s = teacher_step(std::move(s), a).first;
    used.push_back(a);
  }
  return {finalize(s), std::move(used)};
}

// Uniformly random teacher, for smoke tests and the CLI.
inline DesignEpisode random_teacher_episode(const Rng& rng, const TeacherConfig& config = {}) {
  TeacherState s = teacher_reset(rng, config);
  Rng policy = rng.split(2);
  std::vector<int> actions;
  while (!s.done()) {
    const int a = static_cast<int>(policy.below(static_cast<std::uint64_t>(config.action_count())));
    actions.push_back(a);
    s = teacher_step(std::move(s), a).first;
  }
  return {finalize(s), std::move(actions)};
}

}  // namespace ogc
