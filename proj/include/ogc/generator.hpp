#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ogc/layouts.hpp"
#include "ogc/level.hpp"
#include "ogc/rng.hpp"

namespace ogc {

// Domain-randomisation parameters. Station counts are drawn per type.
struct GeneratorConfig {
  int canvas_h = kCanvasHeight;
  int canvas_w = kCanvasWidth;
  int min_walls = 0;
  int max_walls = 15;
  int min_stations = 1;
  int max_stations = 2;
  int wall_budget = 15;  // the validator's cap; wall_range must sit inside [0, wall_budget]
  int retry_bound = 100;

  void check() const {
    if (min_walls < 0 || max_walls < min_walls || max_walls > wall_budget) {
      throw std::invalid_argument("generator wall range must satisfy 0 <= min <= max <= wall budget");
    }
    if (min_stations != 1 || max_stations != 2) {
      throw std::invalid_argument("generator station range must be [1, 2]");
    }
    if (canvas_h < 3 || canvas_w < 3) throw std::invalid_argument("generator canvas must be at least 3x3");
  }
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Element placement order shared with the teacher environment.
inline constexpr Tile kPlacementOrder[] = {Tile::Goal, Tile::OnionPile, Tile::Pot, Tile::PlatePile};

struct SampleStats {
  int attempts = 0;
};

// Walls, stations and agents all land on distinct interior cells; the border
// is solid wall. Solvability is deliberately not checked.
inline Level sample_level(Rng& rng, const GeneratorConfig& config = {}, SampleStats* stats = nullptr) {
  config.check();
  const ValidateOptions opts{config.wall_budget, config.min_stations, config.max_stations};

  for (int attempt = 1; attempt <= config.retry_bound; ++attempt) {
    if (stats) stats->attempts = attempt;
    Level level(config.canvas_h, config.canvas_w, Tile::Floor);
    std::vector<Cell> free;
    for (std::size_t i = 0; i < level.size(); ++i) {
      const Cell c = level.cell(i);
      if (level.on_border(c)) {
        level.set(c, Tile::Wall);
      } else {
        free.push_back(c);
      }
    }

    // Draws distinct cells by swap-removal; order of `free` after removal is
    // part of the deterministic stream.
    auto take = [&](int n, Tile tile) -> bool {
      for (int k = 0; k < n; ++k) {
        if (free.empty()) return false;
        const auto j = rng.below(free.size());
        level.set(free[j], tile);
        free[j] = free.back();
        free.pop_back();
      }
      return true;
    };

    const int walls = rng.between(config.min_walls, config.max_walls);
    bool ok = take(walls, Tile::Wall);
    for (Tile station : kPlacementOrder) {
      if (!ok) break;
      ok = take(rng.between(config.min_stations, config.max_stations), station);
    }
    if (!ok || free.size() < 2) continue;

    for (auto& agent : level.agents) {
      const auto j = rng.below(free.size());
      agent = {free[j], Direction::Up};
      free[j] = free.back();
      free.pop_back();
    }
    sort_agents(level);
    if (validate(level, opts).valid()) return level;
  }
  throw GenerationError("level generation exhausted " + std::to_string(config.retry_bound) + " attempts on a " +
                        std::to_string(config.canvas_h) + "x" + std::to_string(config.canvas_w) + " canvas");
}

// k independent draws, slot i from rng.split(i).
inline std::vector<Level> sample_batch(const Rng& rng, const GeneratorConfig& config, int k) {
  if (k < 1) throw std::invalid_argument("sample_batch needs k >= 1");
  std::vector<Level> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Rng slot = rng.split(static_cast<std::uint64_t>(i));
    out.push_back(sample_level(slot, config));
  }
  return out;
}

}  // namespace ogc
