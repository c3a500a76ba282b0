#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ogc {

enum class Tile : std::uint8_t { Floor, Wall, OnionPile, PlatePile, Pot, Goal };

inline constexpr std::array<Tile, 4> kStationTiles = {Tile::OnionPile, Tile::PlatePile, Tile::Pot, Tile::Goal};

inline constexpr bool is_station(Tile t) { return t != Tile::Floor && t != Tile::Wall; }

enum class Direction : std::uint8_t { Up, Down, Left, Right };

inline constexpr std::array<Direction, 4> kDirections = {Direction::Up, Direction::Down, Direction::Left,
                                                         Direction::Right};

struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;

  Cell step(Direction d) const {
    switch (d) {
      case Direction::Up: return {row - 1, col};
      case Direction::Down: return {row + 1, col};
      case Direction::Left: return {row, col - 1};
      case Direction::Right: return {row, col + 1};
    }
    return *this;
  }
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

struct AgentStart {
  Cell cell;
  Direction dir = Direction::Up;

  friend bool operator==(const AgentStart&, const AgentStart&) = default;
};

// A fully specified layout. Row-major tile grid plus the two agent starts.
// frame_h x frame_w is the designed part at the top-left; pad() grows the
// grid around it and leaves the frame alone.
struct Level {
  int height = 0;
  int width = 0;
  std::vector<Tile> grid;
  std::array<AgentStart, 2> agents{};
  int frame_h = 0;
  int frame_w = 0;

  Level() = default;
  Level(int h, int w, Tile fill = Tile::Floor)
      : height(h), width(w), grid(static_cast<std::size_t>(h * w), fill), frame_h(h), frame_w(w) {}

  bool padded() const { return frame_h != height || frame_w != width; }
  bool in_frame(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < frame_h && c.col < frame_w; }
  bool on_frame_border(Cell c) const {
    return in_frame(c) && (c.row == 0 || c.col == 0 || c.row == frame_h - 1 || c.col == frame_w - 1);
  }

  bool contains(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width; }
  bool on_border(Cell c) const { return c.row == 0 || c.col == 0 || c.row == height - 1 || c.col == width - 1; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row * width + c.col); }
  Cell cell(std::size_t i) const { return {static_cast<int>(i) / width, static_cast<int>(i) % width}; }
  std::size_t size() const { return grid.size(); }

  Tile at(Cell c) const { return grid[index(c)]; }
  Tile at_or_wall(Cell c) const { return contains(c) ? at(c) : Tile::Wall; }
  void set(Cell c, Tile t) { grid[index(c)] = t; }

  friend bool operator==(const Level&, const Level&) = default;
};

class LevelError : public std::runtime_error {
 public:
  LevelError(std::string rule, const std::string& message) : std::runtime_error(message), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

inline char tile_symbol(Tile t) {
  switch (t) {
    case Tile::Floor: return ' ';
    case Tile::Wall: return 'W';
    case Tile::OnionPile: return 'O';
    case Tile::PlatePile: return 'B';
    case Tile::Pot: return 'P';
    case Tile::Goal: return 'G';
  }
  return '?';
}

inline std::optional<Tile> symbol_tile(char c) {
  switch (c) {
    case ' ': return Tile::Floor;
    case 'W': return Tile::Wall;
    case 'O': return Tile::OnionPile;
    case 'B': return Tile::PlatePile;
    case 'P': return Tile::Pot;
    case 'G': return Tile::Goal;
    default: return std::nullopt;
  }
}

inline const char* tile_name(Tile t) {
  switch (t) {
    case Tile::Floor: return "floor";
    case Tile::Wall: return "wall";
    case Tile::OnionPile: return "onion";
    case Tile::PlatePile: return "plate";
    case Tile::Pot: return "pot";
    case Tile::Goal: return "goal";
  }
  return "?";
}

inline char direction_symbol(Direction d) {
  constexpr char symbols[] = {'U', 'D', 'L', 'R'};
  return symbols[static_cast<int>(d)];
}

inline int count_tiles(const Level& level, Tile t) {
  return static_cast<int>(std::count(level.grid.begin(), level.grid.end(), t));
}

// Walls strictly inside the frame. Border walls and padding never count, so
// the number is unchanged by pad().
inline int interior_wall_count(const Level& level) {
  int n = 0;
  for (int r = 1; r < level.frame_h - 1; ++r) {
    for (int c = 1; c < level.frame_w - 1; ++c) n += level.at({r, c}) == Tile::Wall;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string rule;
  std::string message;
  std::optional<Cell> cell;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool valid() const { return violations.empty(); }
  bool has(std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
  }
  std::string summary() const {
    std::ostringstream out;
    for (const auto& v : violations) {
      out << v.rule << ": " << v.message;
      if (v.cell) out << " at (" << v.cell->row << "," << v.cell->col << ")";
      out << "; ";
    }
    return out.str();
  }
};

struct ValidateOptions {
  int max_walls = 15;
  int min_stations = 1;
  int max_stations = 2;
};

class InvalidLevel : public LevelError {
 public:
  explicit InvalidLevel(ValidationReport report)
      : LevelError(report.violations.empty() ? "invalid" : report.violations.front().rule,
                   "invalid level: " + report.summary()),
        report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

inline ValidationReport validate(const Level& level, const ValidateOptions& opts = {}) {
  ValidationReport report;
  auto fail = [&](std::string rule, std::string msg, std::optional<Cell> c = std::nullopt) {
    report.violations.push_back({std::move(rule), std::move(msg), c});
  };

  if (level.height < 3 || level.width < 3 ||
      level.grid.size() != static_cast<std::size_t>(level.height) * static_cast<std::size_t>(level.width)) {
    fail("dimensions", "grid must be at least 3x3 and hold height*width tiles");
    return report;
  }
  if (level.frame_h < 3 || level.frame_w < 3 || level.frame_h > level.height || level.frame_w > level.width) {
    fail("dimensions", "frame must be at least 3x3 and fit the grid");
    return report;
  }

  for (std::size_t i = 0; i < level.size(); ++i) {
    const Cell c = level.cell(i);
    if ((level.on_border(c) || level.on_frame_border(c)) && level.grid[i] == Tile::Floor) {
      fail("border", "border cell is walkable", c);
    }
    if (!level.in_frame(c) && level.grid[i] != Tile::Wall) fail("padding", "padding cell is not a wall", c);
  }

  for (int a = 0; a < 2; ++a) {
    const Cell c = level.agents[static_cast<std::size_t>(a)].cell;
    if (!level.contains(c) || level.at(c) != Tile::Floor) {
      fail("agent-floor", "agent " + std::to_string(a) + " does not start on a floor cell", c);
    }
  }
  if (level.agents[0].cell == level.agents[1].cell) fail("agent-overlap", "agents share a start cell", level.agents[0].cell);

  for (Tile t : kStationTiles) {
    const int n = count_tiles(level, t);
    const std::string rule = std::string(tile_name(t)) + "-count";
    if (n < opts.min_stations) {
      fail(rule, "found " + std::to_string(n) + " " + tile_name(t) + " tiles");
    } else if (n > opts.max_stations) {
      report.warnings.push_back({rule, "found " + std::to_string(n) + " " + tile_name(t) + " tiles", std::nullopt});
    }
  }

  const int walls = interior_wall_count(level);
  if (walls > opts.max_walls) {
    fail("wall-budget", std::to_string(walls) + " interior walls exceed the budget of " + std::to_string(opts.max_walls));
  }
  return report;
}

inline void require_valid(const Level& level, const ValidateOptions& opts = {}) {
  auto report = validate(level, opts);
  if (!report.valid()) throw InvalidLevel(std::move(report));
}

// ---------------------------------------------------------------------------
// ASCII form: rows over {W, ' ', O, B, P, G, A}, each terminated by '\n'.

class ParseError : public LevelError {
 public:
  using LevelError::LevelError;
};

inline std::vector<std::string> split_rows(std::string_view text) {
  std::vector<std::string> rows;
  std::string row;
  for (char ch : text) {
    if (ch == '\n') {
      rows.push_back(std::move(row));
      row.clear();
    } else if (ch != '\r') {
      row.push_back(ch);
    }
  }
  if (!row.empty()) rows.push_back(std::move(row));
  return rows;
}

// Agents ('A') become floor tiles with starts assigned in row-major order,
// facing up. The result is checked against every level invariant.
// Frame for text that does not carry one: one ring past the last floor row
// and column, grown to cover every non-wall tile. Trailing all-wall rows and
// columns are read as padding.
inline void infer_frame(Level& level) {
  int floor_r = -1, floor_c = -1, any_r = -1, any_c = -1;
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level.grid[i] == Tile::Wall) continue;
    const Cell c = level.cell(i);
    any_r = std::max(any_r, c.row);
    any_c = std::max(any_c, c.col);
    if (level.grid[i] == Tile::Floor) {
      floor_r = std::max(floor_r, c.row);
      floor_c = std::max(floor_c, c.col);
    }
  }
  level.frame_h = std::clamp(std::max(floor_r + 2, any_r + 1), std::min(3, level.height), level.height);
  level.frame_w = std::clamp(std::max(floor_c + 2, any_c + 1), std::min(3, level.width), level.width);
}

inline Level parse_ascii(std::string_view text, const ValidateOptions& opts = {}) {
  const auto rows = split_rows(text);
  if (rows.empty()) throw ParseError("empty", "level text has no rows");
  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw ParseError("ragged", "row " + std::to_string(r) + " has width " + std::to_string(rows[r].size()) +
                                     ", expected " + std::to_string(width));
    }
  }

  Level level(static_cast<int>(rows.size()), static_cast<int>(width));
  std::vector<Cell> agents;
  for (int r = 0; r < level.height; ++r) {
    for (int c = 0; c < level.width; ++c) {
      const char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (ch == 'A') {
        agents.push_back({r, c});
        level.set({r, c}, Tile::Floor);
        continue;
      }
      const auto tile = symbol_tile(ch);
      if (!tile) {
        throw ParseError("symbol", std::string("unknown symbol '") + ch + "' at (" + std::to_string(r) + "," +
                                       std::to_string(c) + ")");
      }
      level.set({r, c}, *tile);
    }
  }
  if (agents.size() != 2) {
    throw ParseError("agent-count", "expected 2 agents, found " + std::to_string(agents.size()));
  }
  level.agents = {AgentStart{agents[0], Direction::Up}, AgentStart{agents[1], Direction::Up}};
  infer_frame(level);
  require_valid(level, opts);
  return level;
}

inline std::string render_ascii(const Level& level) {
  std::string out;
  out.reserve(static_cast<std::size_t>(level.height * (level.width + 1)));
  for (int r = 0; r < level.height; ++r) {
    for (int c = 0; c < level.width; ++c) {
      const Cell cell{r, c};
      const bool agent = level.agents[0].cell == cell || level.agents[1].cell == cell;
      out.push_back(agent ? 'A' : tile_symbol(level.at(cell)));
    }
    out.push_back('\n');
  }
  return out;
}

// Splits a stream of blank-line separated ASCII levels.
inline std::vector<std::string> split_ascii_levels(std::string_view text) {
  std::vector<std::string> blocks;
  std::string block;
  for (const auto& row : split_rows(text)) {
    if (row.empty()) {
      if (!block.empty()) blocks.push_back(std::move(block));
      block.clear();
    } else {
      block += row;
      block.push_back('\n');
    }
  }
  if (!block.empty()) blocks.push_back(std::move(block));
  return blocks;
}

// ---------------------------------------------------------------------------
// Padding

inline Level pad(const Level& level, int target_h, int target_w) {
  if (target_h < level.height || target_w < level.width) {
    throw LevelError("pad-size", "pad target " + std::to_string(target_h) + "x" + std::to_string(target_w) +
                                     " is smaller than the level " + std::to_string(level.height) + "x" +
                                     std::to_string(level.width));
  }
  Level out(target_h, target_w, Tile::Wall);
  for (int r = 0; r < level.height; ++r) {
    for (int c = 0; c < level.width; ++c) out.set({r, c}, level.at({r, c}));
  }
  out.agents = level.agents;
  out.frame_h = level.frame_h;
  out.frame_w = level.frame_w;
  return out;
}

// ---------------------------------------------------------------------------
// Digest: FNV-1a over a fixed little-endian encoding of the level.

struct LevelDigest {
  std::uint64_t value = 0;

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
  }

  static std::optional<LevelDigest> from_hex(std::string_view s) {
    if (s.size() != 16) return std::nullopt;
    std::uint64_t v = 0;
    for (char ch : s) {
      int d;
      if (ch >= '0' && ch <= '9') d = ch - '0';
      else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
      else return std::nullopt;
      v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    return LevelDigest{v};
  }

  friend auto operator<=>(const LevelDigest&, const LevelDigest&) = default;
};

inline LevelDigest level_digest(const Level& level) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto byte = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  auto word = [&byte](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  word(static_cast<std::uint32_t>(level.height));
  word(static_cast<std::uint32_t>(level.width));
  for (Tile t : level.grid) byte(static_cast<std::uint8_t>(t));
  for (const auto& a : level.agents) {
    word(static_cast<std::uint32_t>(a.cell.row));
    word(static_cast<std::uint32_t>(a.cell.col));
    byte(static_cast<std::uint8_t>(a.dir));
  }
  return {h};
}

// ---------------------------------------------------------------------------
// Mirroring, used to build symmetric evaluation suites.

inline Direction mirror_direction(Direction d, bool flip_cols) {
  if (flip_cols) {
    if (d == Direction::Left) return Direction::Right;
    if (d == Direction::Right) return Direction::Left;
  } else {
    if (d == Direction::Up) return Direction::Down;
    if (d == Direction::Down) return Direction::Up;
  }
  return d;
}

inline void sort_agents(Level& level) {
  if (level.agents[1].cell < level.agents[0].cell) std::swap(level.agents[0], level.agents[1]);
}

// Reflects the level left-right (flip_cols) or top-bottom. Agent starts are
// re-sorted into row-major order so the result matches what parse would give.
inline Level mirror(const Level& level, bool flip_cols) {
  Level out(level.height, level.width);
  auto map = [&](Cell c) -> Cell {
    return flip_cols ? Cell{c.row, level.width - 1 - c.col} : Cell{level.height - 1 - c.row, c.col};
  };
  for (std::size_t i = 0; i < level.size(); ++i) out.set(map(level.cell(i)), level.grid[i]);
  for (std::size_t a = 0; a < 2; ++a) {
    out.agents[a] = {map(level.agents[a].cell), mirror_direction(level.agents[a].dir, flip_cols)};
  }
  sort_agents(out);
  return out;
}

}  // namespace ogc
