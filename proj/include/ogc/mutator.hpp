#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ogc/level.hpp"
#include "ogc/rng.hpp"

namespace ogc {

struct MutationOp {
  enum class Kind : std::uint8_t { ToggleWall, MoveGoal, MovePot, MovePlatePile, MoveOnionPile };

  Kind kind = Kind::ToggleWall;
  Cell from;  // ToggleWall: the toggled cell
  Cell to;    // ToggleWall: same as `from`

  static MutationOp toggle(Cell c) { return {Kind::ToggleWall, c, c}; }
  static MutationOp move(Kind k, Cell from, Cell to) { return {k, from, to}; }

  friend bool operator==(const MutationOp&, const MutationOp&) = default;
};

inline constexpr MutationOp::Kind kMutationKinds[] = {MutationOp::Kind::ToggleWall, MutationOp::Kind::MoveGoal,
                                                      MutationOp::Kind::MovePot, MutationOp::Kind::MovePlatePile,
                                                      MutationOp::Kind::MoveOnionPile};

inline const char* mutation_name(MutationOp::Kind k) {
  switch (k) {
    case MutationOp::Kind::ToggleWall: return "toggle_wall";
    case MutationOp::Kind::MoveGoal: return "move_goal";
    case MutationOp::Kind::MovePot: return "move_pot";
    case MutationOp::Kind::MovePlatePile: return "move_plate_pile";
    case MutationOp::Kind::MoveOnionPile: return "move_onion_pile";
  }
  return "?";
}

inline Tile moved_station(MutationOp::Kind k) {
  switch (k) {
    case MutationOp::Kind::MoveGoal: return Tile::Goal;
    case MutationOp::Kind::MovePot: return Tile::Pot;
    case MutationOp::Kind::MovePlatePile: return Tile::PlatePile;
    case MutationOp::Kind::MoveOnionPile: return Tile::OnionPile;
    case MutationOp::Kind::ToggleWall: break;
  }
  return Tile::Wall;
}

inline bool is_agent_cell(const Level& level, Cell c) {
  return level.agents[0].cell == c || level.agents[1].cell == c;
}

inline bool is_corner(const Level& level, Cell c) {
  return (c.row == 0 || c.row == level.frame_h - 1) && (c.col == 0 || c.col == level.frame_w - 1);
}

// Cells a wall toggle may flip: interior floor/wall cells without an agent.
inline bool toggle_target(const Level& level, Cell c) {
  if (!level.in_frame(c) || level.on_frame_border(c) || is_agent_cell(level, c)) return false;
  const Tile t = level.at(c);
  return t == Tile::Floor || t == Tile::Wall;
}

// Cells a station may move onto: any wall inside the frame (border included,
// corners excluded) or an interior floor cell without an agent.
inline bool station_target(const Level& level, Cell c) {
  if (!level.in_frame(c) || is_corner(level, c) || is_agent_cell(level, c)) return false;
  const Tile t = level.at(c);
  return t == Tile::Wall || (t == Tile::Floor && !level.on_frame_border(c));
}

// Single op. nullopt when the op's preconditions fail or the result would
// break a level invariant (e.g. the wall budget).
inline std::optional<Level> apply_op(const Level& level, const MutationOp& op, const ValidateOptions& opts = {}) {
  Level out = level;
  if (op.kind == MutationOp::Kind::ToggleWall) {
    if (op.from != op.to || !toggle_target(level, op.from)) return std::nullopt;
    out.set(op.from, level.at(op.from) == Tile::Wall ? Tile::Floor : Tile::Wall);
  } else {
    const Tile station = moved_station(op.kind);
    if (!level.contains(op.from) || level.at(op.from) != station) return std::nullopt;
    if (op.from == op.to || !station_target(level, op.to)) return std::nullopt;
    const Tile displaced = level.at(op.to);
    out.set(op.to, station);
    out.set(op.from, level.on_frame_border(op.from) ? Tile::Wall : displaced);
  }
  if (!validate(out, opts).valid()) return std::nullopt;
  return out;
}

inline std::optional<MutationOp> sample_op(const Level& level, MutationOp::Kind kind, Rng& rng) {
  std::vector<Cell> targets;
  if (kind == MutationOp::Kind::ToggleWall) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (toggle_target(level, level.cell(i))) targets.push_back(level.cell(i));
    }
    if (targets.empty()) return std::nullopt;
    return MutationOp::toggle(rng.pick(targets));
  }
  const Tile station = moved_station(kind);
  std::vector<Cell> sources;
  for (std::size_t i = 0; i < level.size(); ++i) {
    const Cell c = level.cell(i);
    if (level.at(c) == station) sources.push_back(c);
    if (station_target(level, c)) targets.push_back(c);
  }
  if (sources.empty() || targets.empty()) return std::nullopt;
  const Cell from = rng.pick(sources);
  return MutationOp::move(kind, from, rng.pick(targets));
}

struct MutationResult {
  Level level;
  std::vector<MutationOp> ops;  // applied ops, in order
  int skipped = 0;              // op slots that found nothing applicable within the retry bound
};

inline constexpr int kMutationRetryBound = 20;

// Applies n sampled ops in sequence. Kind is uniform over the five ops, then
// the target is uniform over that op's candidate cells; inapplicable draws
// are resampled up to the retry bound. Agents never move.
inline MutationResult mutate_logged(const Level& level, int n, Rng& rng, const ValidateOptions& opts = {}) {
  MutationResult result{level, {}, 0};
  for (int i = 0; i < n; ++i) {
    bool applied = false;
    for (int attempt = 0; attempt < kMutationRetryBound && !applied; ++attempt) {
      const auto kind = kMutationKinds[rng.below(std::size(kMutationKinds))];
      const auto op = sample_op(result.level, kind, rng);
      if (!op) continue;
      if (auto next = apply_op(result.level, *op, opts)) {
        result.level = std::move(*next);
        result.ops.push_back(*op);
        applied = true;
      }
    }
    if (!applied) ++result.skipped;
  }
  return result;
}

inline Level mutate(const Level& level, int n, Rng& rng, const ValidateOptions& opts = {}) {
  return mutate_logged(level, n, rng, opts).level;
}

}  // namespace ogc
