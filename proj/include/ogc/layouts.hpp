#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ogc/level.hpp"

namespace ogc {

struct NamedLevel {
  std::string name;
  Level level;
};

inline constexpr int kCanvasHeight = 6;
inline constexpr int kCanvasWidth = 9;

namespace assets {

// The five classic Overcooked-AI kitchens, transcribed from the upstream
// layout files into this project's alphabet (D -> B plate pile, S -> G goal,
// X -> W counter, numbered agents -> A).
inline constexpr const char* kCrampedRoom =
    "WWPWW\n"
    "O  AO\n"
    "WA  W\n"
    "WBWGW\n";

inline constexpr const char* kAsymmetricAdvantages =
    "WWWWWWWWW\n"
    "O WGWOW G\n"
    "W   P   W\n"
    "W A P A W\n"
    "WWWBWBWWW\n";

inline constexpr const char* kCoordinationRing =
    "WWWPW\n"
    "W A P\n"
    "BAW W\n"
    "O   W\n"
    "WOGWW\n";

inline constexpr const char* kForcedCoordination =
    "WWWPW\n"
    "O WAP\n"
    "OAW W\n"
    "B W W\n"
    "WWWGW\n";

inline constexpr const char* kCounterCircuit =
    "WWWPPWWW\n"
    "W      W\n"
    "B WWWW G\n"
    "WA    AW\n"
    "WWWOOWWW\n";

}  // namespace assets

inline std::vector<NamedLevel> builtin_eval_suite(int canvas_h = kCanvasHeight, int canvas_w = kCanvasWidth) {
  const std::pair<const char*, const char*> sources[] = {
      {"cramped_room", assets::kCrampedRoom},
      {"asymmetric_advantages", assets::kAsymmetricAdvantages},
      {"coordination_ring", assets::kCoordinationRing},
      {"forced_coordination", assets::kForcedCoordination},
      {"counter_circuit", assets::kCounterCircuit},
  };
  std::vector<NamedLevel> suite;
  for (const auto& [name, text] : sources) suite.push_back({name, pad(parse_ascii(text), canvas_h, canvas_w)});
  return suite;
}

inline Level builtin_level(const std::string& name) {
  for (auto& entry : builtin_eval_suite()) {
    if (entry.name == name) return entry.level;
  }
  throw LevelError("unknown-layout", "no builtin layout named '" + name + "'");
}

// ---------------------------------------------------------------------------
// Ring kitchens with the station block moved around the four sides.

enum class Side { Top, Right, Bottom, Left };

inline const char* side_name(Side s) {
  switch (s) {
    case Side::Top: return "top";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Left: return "left";
  }
  return "?";
}

struct SymmetrySuiteParams {
  std::vector<std::pair<int, int>> sizes = {{6, 7}, {6, 8}, {6, 9}};
  int canvas_h = kCanvasHeight;
  int canvas_w = kCanvasWidth;
};

// Room with a central wall island; onion, plate, pot and goal sit in a row
// centred on `side`, and the agents start in the two ring corners furthest
// from it.
inline Level ring_kitchen(int h, int w, Side side) {
  if (h < 6 || w < 6) throw LevelError("infeasible", "ring kitchens need at least 6x6 cells");
  Level level(h, w, Tile::Floor);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (level.on_border({r, c})) level.set({r, c}, Tile::Wall);
    }
  }
  for (int r = 2; r <= h - 3; ++r) {
    for (int c = 2; c <= w - 3; ++c) level.set({r, c}, Tile::Wall);
  }

  constexpr Tile block[] = {Tile::OnionPile, Tile::PlatePile, Tile::Pot, Tile::Goal};
  const bool horizontal = side == Side::Top || side == Side::Bottom;
  const int span = horizontal ? w - 2 : h - 2;
  const int start = 1 + (span - 4) / 2;
  for (int i = 0; i < 4; ++i) {
    Cell c;
    switch (side) {
      case Side::Top: c = {0, start + i}; break;
      case Side::Bottom: c = {h - 1, start + i}; break;
      case Side::Left: c = {start + i, 0}; break;
      case Side::Right: c = {start + i, w - 1}; break;
    }
    level.set(c, block[i]);
  }

  std::pair<Cell, Cell> starts;
  switch (side) {
    case Side::Top: starts = {{h - 2, 1}, {h - 2, w - 2}}; break;
    case Side::Bottom: starts = {{1, 1}, {1, w - 2}}; break;
    case Side::Left: starts = {{1, w - 2}, {h - 2, w - 2}}; break;
    case Side::Right: starts = {{1, 1}, {h - 2, 1}}; break;
  }
  level.agents = {AgentStart{starts.first}, AgentStart{starts.second}};
  sort_agents(level);
  return level;
}

// Mirror axis that keeps the station block on its side.
inline bool mirror_flips_cols(Side side) { return side == Side::Top || side == Side::Bottom; }

inline std::vector<NamedLevel> symmetry_suite(const SymmetrySuiteParams& params = {}, int count = 24) {
  std::vector<NamedLevel> all;
  for (auto [h, w] : params.sizes) {
    if (h > params.canvas_h || w > params.canvas_w) {
      throw LevelError("infeasible", "ring kitchen " + std::to_string(h) + "x" + std::to_string(w) +
                                         " does not fit the canvas");
    }
    for (Side side : {Side::Top, Side::Right, Side::Bottom, Side::Left}) {
      const Level base = ring_kitchen(h, w, side);
      const std::string name = "ring_" + std::to_string(h) + "x" + std::to_string(w) + "_" + side_name(side);
      all.push_back({name, pad(base, params.canvas_h, params.canvas_w)});
      all.push_back({name + "_mirror", pad(mirror(base, mirror_flips_cols(side)), params.canvas_h, params.canvas_w)});
    }
  }
  if (count < 0 || static_cast<std::size_t>(count) > all.size()) {
    throw LevelError("infeasible", "requested " + std::to_string(count) + " symmetry levels but the size list yields " +
                                       std::to_string(all.size()));
  }
  all.resize(static_cast<std::size_t>(count));
  for (const auto& entry : all) require_valid(entry.level);
  return all;
}

}  // namespace ogc
