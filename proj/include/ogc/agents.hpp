#pragma once

#include <algorithm>
#include <deque>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "ogc/env.hpp"
#include "ogc/level.hpp"
#include "ogc/rng.hpp"

namespace ogc {

// ---------------------------------------------------------------------------
// Grid search

// Shortest 4-neighbour path over floor cells from `from` to any floor cell
// adjacent to one of `targets`. Neighbours expand in Up, Down, Left, Right
// order, so among equal-length paths the earliest-discovered wins. `blocked`
// cells are treated as walls. The path includes `from`; nullopt when no
// adjacent cell is reachable.
inline std::optional<std::vector<Cell>> bfs_path_any(const Level& level, Cell from, const std::vector<Cell>& targets,
                                                     const std::vector<Cell>& blocked = {}) {
  if (!level.contains(from) || level.at(from) != Tile::Floor || targets.empty()) return std::nullopt;
  std::vector<std::uint8_t> goal(level.size(), 0);
  for (Cell t : targets) {
    if (!level.contains(t)) continue;
    for (Direction d : kDirections) {
      const Cell n = t.step(d);
      if (level.contains(n)) goal[level.index(n)] = 1;
    }
  }
  std::vector<std::uint8_t> wall(level.size(), 0);
  for (Cell b : blocked) {
    if (level.contains(b) && b != from) wall[level.index(b)] = 1;
  }

  std::vector<int> parent(level.size(), -2);
  std::queue<Cell> frontier;
  parent[level.index(from)] = -1;
  frontier.push(from);
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop();
    if (goal[level.index(c)]) {
      std::vector<Cell> path;
      for (int i = static_cast<int>(level.index(c)); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
        path.push_back(level.cell(static_cast<std::size_t>(i)));
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (Direction d : kDirections) {
      const Cell n = c.step(d);
      if (!level.contains(n) || level.at(n) != Tile::Floor) continue;
      const auto ni = level.index(n);
      if (wall[ni] || parent[ni] != -2) continue;
      parent[ni] = static_cast<int>(level.index(c));
      frontier.push(n);
    }
  }
  return std::nullopt;
}

inline std::optional<std::vector<Cell>> bfs_path(const Level& level, Cell from, Cell target,
                                                 const std::vector<Cell>& blocked = {}) {
  return bfs_path_any(level, from, {target}, blocked);
}

// 4-connected floor components; -1 on non-floor cells.
inline std::vector<int> floor_regions(const Level& level, int* count = nullptr) {
  std::vector<int> region(level.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level.grid[i] != Tile::Floor || region[i] >= 0) continue;
    std::queue<Cell> q;
    q.push(level.cell(i));
    region[i] = next;
    while (!q.empty()) {
      const Cell c = q.front();
      q.pop();
      for (Direction d : kDirections) {
        const Cell n = c.step(d);
        if (!level.contains(n) || level.at(n) != Tile::Floor) continue;
        if (region[level.index(n)] >= 0) continue;
        region[level.index(n)] = next;
        q.push(n);
      }
    }
    ++next;
  }
  if (count) *count = next;
  return region;
}

// ---------------------------------------------------------------------------
// Policy interface

enum class Observability : std::uint8_t { Masked, Privileged };

struct PolicyMemory {
  Rng rng;
  std::deque<std::array<Cell, 2>> recent;  // joint positions, newest last
  int repeats = 0;
};

// What a policy sees. Masked policies get only `obs`; privileged ones also
// get the full state.
struct PolicyView {
  const Observation* obs = nullptr;
  const EnvState* state = nullptr;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Observability observability() const = 0;
  virtual PolicyMemory reset_memory(std::uint64_t episode_seed, int agent) const {
    return PolicyMemory{Rng(Rng::mix(episode_seed, static_cast<std::uint64_t>(agent) + 1)), {}, 0};
  }
  virtual Action act(const PolicyView& view, int agent, PolicyMemory& memory) const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

class StayPolicy final : public Policy {
 public:
  std::string name() const override { return "stay"; }
  Observability observability() const override { return Observability::Masked; }
  Action act(const PolicyView&, int, PolicyMemory&) const override { return Action::Stay; }
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random:" + std::to_string(seed_); }
  Observability observability() const override { return Observability::Masked; }
  PolicyMemory reset_memory(std::uint64_t episode_seed, int agent) const override {
    return PolicyMemory{Rng(Rng::mix(Rng::mix(seed_, episode_seed), static_cast<std::uint64_t>(agent))), {}, 0};
  }
  Action act(const PolicyView&, int, PolicyMemory& memory) const override {
    return kActions[memory.rng.below(kNumActions)];
  }

 private:
  std::uint64_t seed_;
};

inline PolicyPtr stay_policy() { return std::make_shared<StayPolicy>(); }
inline PolicyPtr random_policy(std::uint64_t seed) { return std::make_shared<RandomPolicy>(seed); }

// ---------------------------------------------------------------------------
// Greedy planner
//
// Privileged scripted cook used to check the dynamics and solvability, not to
// play fairly. Each step it picks one errand from the full state:
//   soup in hand        -> nearest goal
//   onion in hand       -> nearest pot that still takes onions
//   plate in hand       -> a ready pot, else a cooking pot (waits facing it)
//   empty hands         -> loose soup, then a plate if busy pots lack one,
//                          then an onion if pots still need onions
// Targets it cannot reach from its region are handed over by dropping the
// item on a counter that touches a region which can reach them. If the other
// agent blocks the path it re-plans around it; with no plan it stays. An
// agent that would stay on the partner's path steps off it. When the joint
// position has already occurred kLivelockRepeats times in the last
// kLivelockWindow steps while it is trying to move or is held up by the
// partner, it takes one random step. This catches standoffs, two-step
// oscillations and dead-end pockets.

inline constexpr int kLivelockRepeats = 8;
inline constexpr std::size_t kLivelockWindow = 16;

struct Errand {
  std::vector<Cell> targets;
  bool interact = true;  // false: walk up, face the target and wait
};

class GreedyPolicy final : public Policy {
 public:
  std::string name() const override { return "greedy"; }
  Observability observability() const override { return Observability::Privileged; }

  Action act(const PolicyView& view, int agent, PolicyMemory& memory) const override {
    if (!view.state) throw std::invalid_argument("greedy policy needs the privileged state view");
    const EnvState& s = *view.state;

    // Times the current joint position already occurred in the window.
    memory.repeats = static_cast<int>(std::count(memory.recent.begin(), memory.recent.end(), s.pos));
    memory.recent.push_back(s.pos);
    if (memory.recent.size() > kLivelockWindow) memory.recent.pop_front();

    const Action planned = plan(s, agent);
    if (memory.repeats >= kLivelockRepeats && stuck(s, agent, planned)) {
      memory.recent.clear();
      return move_action(kDirections[memory.rng.below(4)]);
    }
    return planned;
  }

  // Trying to move, or held up by the partner: either waiting on a path
  // through it or standing on its path.
  static bool stuck(const EnvState& s, int agent, Action planned) {
    const auto me = static_cast<std::size_t>(agent);
    if (const auto d = action_direction(planned)) return s.level().at_or_wall(s.pos[me].step(*d)) == Tile::Floor;
    if (planned != Action::Stay) return false;
    const Planner p(s, agent);
    return p.waiting_on_partner() || p.in_partners_way();
  }

  static Action plan(const EnvState& s, int agent) {
    const Planner me(s, agent);
    const auto errand = me.errand();
    const Action a = errand ? me.go(*errand) : Action::Stay;
    if (a != Action::Stay) return a;
    return me.make_way().value_or(Action::Stay);
  }

  static std::optional<Errand> errand_of(const EnvState& s, int agent) { return Planner(s, agent).errand(); }

 private:
  struct Planner {
    const EnvState& s;
    const Level& level;
    std::size_t me;
    std::size_t other;
    std::vector<int> region;

    Planner(const EnvState& st, int agent)
        : s(st), level(st.level()), me(static_cast<std::size_t>(agent)), other(1 - static_cast<std::size_t>(agent)),
          region(floor_regions(st.level())) {}

    int region_of(Cell c) const { return region[level.index(c)]; }
    int my_region() const { return region_of(s.pos[me]); }

    bool touches(int r, Cell target) const {
      for (Direction d : kDirections) {
        const Cell n = target.step(d);
        if (level.contains(n) && region_of(n) == r) return true;
      }
      return false;
    }

    template <class Pred>
    std::vector<Cell> cells_where(Pred pred) const {
      std::vector<Cell> out;
      for (std::size_t i = 0; i < level.size(); ++i) {
        if (pred(level.cell(i))) out.push_back(level.cell(i));
      }
      return out;
    }

    std::vector<Cell> reachable(const std::vector<Cell>& cells) const {
      std::vector<Cell> out;
      for (Cell c : cells) {
        if (touches(my_region(), c)) out.push_back(c);
      }
      return out;
    }

    std::vector<Cell> tiles(Tile t) const {
      return cells_where([&](Cell c) { return level.at(c) == t; });
    }
    std::vector<Cell> counters_with(Item item) const {
      return cells_where([&](Cell c) { return level.at(c) == Tile::Wall && s.counter_item(c) == item; });
    }
    // Items on counters the partner can pick up.
    std::vector<Cell> handed_over(Item item) const {
      const int theirs = region_of(s.pos[other]);
      auto out = counters_with(item);
      std::erase_if(out, [&](Cell c) { return theirs == my_region() || !touches(theirs, c); });
      return out;
    }
    // Pots that some agent's region touches; the rest can never be used.
    bool pot_in_play(std::size_t p) const {
      const Cell c = s.kitchen->pot_cells[p];
      return touches(region_of(s.pos[0]), c) || touches(region_of(s.pos[1]), c);
    }

    template <class Pred>
    std::vector<Cell> pots_where(Pred pred) const {
      std::vector<Cell> out;
      for (std::size_t p = 0; p < s.pots.size(); ++p) {
        if (pot_in_play(p) && pred(s.pots[p])) out.push_back(s.kitchen->pot_cells[p]);
      }
      return out;
    }

    static std::optional<Errand> to(std::vector<Cell> targets, bool interact = true) {
      if (targets.empty()) return std::nullopt;
      return Errand{std::move(targets), interact};
    }

    // Empty counters shared with the partner's region when that region can
    // reach one of `targets`.
    std::vector<Cell> handover_counters(const std::vector<Cell>& targets) const {
      const int mine = my_region();
      const int theirs = region_of(s.pos[other]);
      if (theirs == mine) return {};
      if (std::none_of(targets.begin(), targets.end(), [&](Cell t) { return touches(theirs, t); })) return {};
      return cells_where([&](Cell c) {
        return level.at(c) == Tile::Wall && s.counter_item(c) == Item::Nothing && touches(mine, c) &&
               touches(theirs, c);
      });
    }

    // Ingredients going across leave one counter free while a soup is due to
    // come back the same way.
    std::optional<Errand> deliver_or_handover(const std::vector<Cell>& targets) const {
      if (auto e = to(reachable(targets))) return e;
      auto counters = handover_counters(targets);
      const auto goals = tiles(Tile::Goal);
      const int theirs = region_of(s.pos[other]);
      const bool soup_returns =
          s.held[me] != Item::Soup && std::none_of(goals.begin(), goals.end(), [&](Cell g) { return touches(theirs, g); });
      const bool soup_due = s.held[other] == Item::Plate || s.held[other] == Item::Soup ||
                            std::any_of(s.pots.begin(), s.pots.end(), [](const PotState& p) { return p.ready || p.cooking(); });
      if (soup_returns && soup_due && counters.size() < 2) return std::nullopt;
      return to(std::move(counters));
    }

    // Free counter in reach, preferring ones the partner cannot reach so
    // handover counters stay clear.
    std::optional<Errand> put_down() const {
      const int theirs = region_of(s.pos[other]);
      auto free = cells_where(
          [&](Cell c) { return level.at(c) == Tile::Wall && s.counter_item(c) == Item::Nothing && touches(my_region(), c); });
      std::vector<Cell> private_free;
      for (Cell c : free) {
        if (theirs == my_region() || !touches(theirs, c)) private_free.push_back(c);
      }
      return to(private_free.empty() ? free : private_free);
    }

    int count_held(Item item) const { return static_cast<int>(s.held[0] == item) + static_cast<int>(s.held[1] == item); }

    std::optional<Errand> errand() const {
      const auto pots_open = pots_where([](const PotState& p) { return p.accepts_onion(); });
      const auto pots_cooked = pots_where([](const PotState& p) { return p.ready; });
      const auto pots_busy = pots_where([](const PotState& p) { return p.ready || p.cooking(); });

      switch (s.held[me]) {
        case Item::Soup:
          return deliver_or_handover(tiles(Tile::Goal));
        case Item::Onion:
          // Clear hands for soup coming back across the counter.
          if (pots_open.empty() || (reachable(pots_open).empty() && s.held[other] == Item::Soup)) return put_down();
          if (auto e = deliver_or_handover(pots_open)) return e;
          return put_down();
        case Item::Plate:
          if (auto e = to(reachable(pots_cooked))) return e;
          if (auto e = to(reachable(pots_busy), false)) return e;
          if (!pots_busy.empty()) {
            if (auto e = to(handover_counters(pots_busy))) return e;
          }
          return put_down();
        case Item::Nothing: break;
      }

      // A worker can reach a pot itself, so items waiting on counters are
      // not yet supply for it; it clears them before going to a pile. A
      // feeder counts what it has handed over and only fetches from piles,
      // so it never takes back its own handover.
      const bool worker = !reachable(pots_busy).empty() || !reachable(pots_open).empty();

      // Loose soup is only worth taking by someone who can serve it.
      if (!reachable(tiles(Tile::Goal)).empty()) {
        if (auto e = to(reachable(counters_with(Item::Soup)))) return e;
      }

      const int plates_needed = static_cast<int>(pots_busy.size());
      int plates_supplied = count_held(Item::Plate);
      if (!worker) plates_supplied += static_cast<int>(handed_over(Item::Plate).size());
      if (plates_needed > plates_supplied) {
        if (worker) {
          if (auto e = to(reachable(counters_with(Item::Plate)))) return e;
        }
        if (auto e = to(reachable(tiles(Tile::PlatePile)))) return e;
      }

      int onions_needed = 0;
      for (std::size_t p = 0; p < s.pots.size(); ++p) {
        if (pot_in_play(p) && s.pots[p].accepts_onion()) onions_needed += kPotCapacity - s.pots[p].onions;
      }
      int onions_supplied = count_held(Item::Onion);
      if (!worker) onions_supplied += static_cast<int>(handed_over(Item::Onion).size());
      if (onions_needed > onions_supplied) {
        if (worker) {
          if (auto e = to(reachable(counters_with(Item::Onion)))) return e;
        }
        if (auto e = to(reachable(tiles(Tile::OnionPile)))) return e;
      }
      return std::nullopt;
    }

    std::optional<Action> step_along(const std::vector<Cell>& path) const {
      if (path.size() < 2) return std::nullopt;
      for (Direction d : kDirections) {
        if (s.pos[me].step(d) == path[1]) return move_action(d);
      }
      return std::nullopt;
    }

    Action go(const Errand& e) const {
      const Cell here = s.pos[me];
      auto path = bfs_path_any(level, here, e.targets);
      if (!path) return Action::Stay;
      if (std::find(path->begin(), path->end(), s.pos[other]) != path->end()) {
        path = bfs_path_any(level, here, e.targets, {s.pos[other]});
        if (!path) return Action::Stay;
      }
      if (auto a = step_along(*path)) return *a;
      // Adjacent: first target in Up, Down, Left, Right order; turn to face it.
      for (Direction d : kDirections) {
        const Cell n = here.step(d);
        if (std::find(e.targets.begin(), e.targets.end(), n) == e.targets.end()) continue;
        if (s.dir[me] != d) return move_action(d);
        return e.interact ? Action::Interact : Action::Stay;
      }
      return Action::Stay;
    }

    bool waiting_on_partner() const {
      const auto e = errand();
      if (!e) return false;
      const auto path = bfs_path_any(level, s.pos[me], e->targets);
      return path && path->size() >= 2 && !bfs_path_any(level, s.pos[me], e->targets, {s.pos[other]});
    }

    bool in_partners_way() const {
      const auto e = Planner(s, static_cast<int>(other)).errand();
      if (!e) return false;
      const auto theirs = bfs_path_any(level, s.pos[other], e->targets);
      return theirs && std::find(theirs->begin(), theirs->end(), s.pos[me]) != theirs->end();
    }

    // Called when this agent would stay: if it sits on the partner's
    // shortest path, move to the nearest cell off that path.
    std::optional<Action> make_way() const {
      const Planner partner(s, static_cast<int>(other));
      const auto e = partner.errand();
      if (!e) return std::nullopt;
      const auto theirs = bfs_path_any(level, s.pos[other], e->targets);
      if (!theirs || std::find(theirs->begin(), theirs->end(), s.pos[me]) == theirs->end()) return std::nullopt;

      std::vector<Cell> blocked = *theirs;
      std::vector<Cell> free = cells_where([&](Cell c) {
        return level.at(c) == Tile::Floor && region_of(c) == my_region() &&
               std::find(blocked.begin(), blocked.end(), c) == blocked.end();
      });
      if (free.empty()) return std::nullopt;
      // Path to a free cell itself: search for cells adjacent to it, then
      // append it. Other agent's cell stays impassable.
      std::optional<std::vector<Cell>> best;
      for (Cell f : free) {
        auto p = bfs_path_any(level, s.pos[me], {f}, {s.pos[other]});
        if (!p) continue;
        if (p->back() != f) p->push_back(f);
        if (!best || p->size() < best->size()) best = std::move(p);
      }
      if (!best) return std::nullopt;
      return step_along(*best);
    }
  };
};

inline PolicyPtr greedy_policy() { return std::make_shared<GreedyPolicy>(); }

class PolicyNameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// "stay", "random:<seed>" or "greedy".
inline PolicyPtr make_policy(const std::string& name) {
  if (name == "stay") return stay_policy();
  if (name == "greedy") return greedy_policy();
  if (name.rfind("random:", 0) == 0) {
    const std::string seed = name.substr(7);
    if (seed.empty() || seed.find_first_not_of("0123456789") != std::string::npos) {
      throw PolicyNameError("random policy needs a numeric seed: '" + name + "'");
    }
    return random_policy(std::stoull(seed));
  }
  throw PolicyNameError("unknown policy '" + name + "' (expected stay, random:<seed> or greedy)");
}

}  // namespace ogc
