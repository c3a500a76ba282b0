#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ogc/level.hpp"
#include "ogc/rng.hpp"

namespace ogc {

enum class Action : std::uint8_t { Left, Right, Up, Down, Interact, Stay };

inline constexpr int kNumActions = 6;
inline constexpr std::array<Action, kNumActions> kActions = {Action::Left,     Action::Right, Action::Up,
                                                             Action::Down, Action::Interact, Action::Stay};

using JointAction = std::array<Action, 2>;

inline const char* action_name(Action a) {
  switch (a) {
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Interact: return "interact";
    case Action::Stay: return "stay";
  }
  return "?";
}

inline std::optional<Direction> action_direction(Action a) {
  switch (a) {
    case Action::Left: return Direction::Left;
    case Action::Right: return Direction::Right;
    case Action::Up: return Direction::Up;
    case Action::Down: return Direction::Down;
    default: return std::nullopt;
  }
}

inline Action move_action(Direction d) {
  switch (d) {
    case Direction::Up: return Action::Up;
    case Direction::Down: return Action::Down;
    case Direction::Left: return Action::Left;
    case Direction::Right: return Action::Right;
  }
  return Action::Stay;
}

enum class Item : std::uint8_t { Nothing, Onion, Plate, Soup };

inline const char* item_name(Item i) {
  switch (i) {
    case Item::Nothing: return "nothing";
    case Item::Onion: return "onion";
    case Item::Plate: return "plate";
    case Item::Soup: return "soup";
  }
  return "?";
}

inline constexpr int kPotCapacity = 3;

// Invariants: timer > 0 only while cooking (3 onions, not ready);
// ready implies onions == 3 and timer == 0.
struct PotState {
  int onions = 0;
  int timer = 0;
  bool ready = false;

  bool cooking() const { return timer > 0; }
  bool accepts_onion() const { return onions < kPotCapacity && !ready && timer == 0; }
  bool consistent() const {
    if (onions < 0 || onions > kPotCapacity || timer < 0) return false;
    if (timer > 0 && (onions != kPotCapacity || ready)) return false;
    if (ready && (onions != kPotCapacity || timer != 0)) return false;
    return true;
  }

  friend bool operator==(const PotState&, const PotState&) = default;
};

struct ShapedRewards {
  double onion_potted = 3.0;
  double plate_pickup = 3.0;
  double soup_pickup = 5.0;

  friend bool operator==(const ShapedRewards&, const ShapedRewards&) = default;
};

struct EnvParams {
  int horizon = 400;
  int cook_time = 20;
  double delivery_reward = 20.0;
  ShapedRewards shaped;

  friend bool operator==(const EnvParams&, const EnvParams&) = default;
};

// Immutable per-episode data shared by every state of the episode.
struct Kitchen {
  Level level;
  EnvParams params;
  std::vector<Cell> pot_cells;  // row-major
  std::vector<int> pot_slot;    // per cell; -1 where there is no pot

  Kitchen(Level lvl, EnvParams p) : level(std::move(lvl)), params(p), pot_slot(level.size(), -1) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (level.grid[i] == Tile::Pot) {
        pot_slot[i] = static_cast<int>(pot_cells.size());
        pot_cells.push_back(level.cell(i));
      }
    }
  }
};

enum class EventKind : std::uint8_t { Delivery, OnionPotted, PlatePickup, SoupPickup };

inline const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::Delivery: return "delivery";
    case EventKind::OnionPotted: return "onion_potted";
    case EventKind::PlatePickup: return "plate_pickup";
    case EventKind::SoupPickup: return "soup_pickup";
  }
  return "?";
}

struct Event {
  EventKind kind;
  int agent;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EnvState {
  std::shared_ptr<const Kitchen> kitchen;
  std::array<Cell, 2> pos{};
  std::array<Direction, 2> dir{};
  std::array<Item, 2> held{};
  std::vector<PotState> pots;   // aligned with kitchen->pot_cells
  std::vector<Item> counters;   // per cell; only Wall cells ever hold an item
  int t = 0;
  int deliveries = 0;
  std::uint64_t rng_state = 0;

  const Level& level() const { return kitchen->level; }
  const EnvParams& params() const { return kitchen->params; }
  bool done() const { return t >= kitchen->params.horizon; }

  PotState* pot_at(Cell c) {
    const int slot = kitchen->pot_slot[level().index(c)];
    return slot < 0 ? nullptr : &pots[static_cast<std::size_t>(slot)];
  }
  const PotState* pot_at(Cell c) const {
    const int slot = kitchen->pot_slot[level().index(c)];
    return slot < 0 ? nullptr : &pots[static_cast<std::size_t>(slot)];
  }
  Item counter_item(Cell c) const { return counters[level().index(c)]; }

  friend bool operator==(const EnvState& a, const EnvState& b) {
    const bool same_kitchen =
        a.kitchen == b.kitchen ||
        (a.kitchen && b.kitchen && a.kitchen->level == b.kitchen->level && a.kitchen->params == b.kitchen->params);
    return same_kitchen && a.pos == b.pos && a.dir == b.dir && a.held == b.held && a.pots == b.pots &&
           a.counters == b.counters && a.t == b.t && a.deliveries == b.deliveries && a.rng_state == b.rng_state;
  }
};

class EnvError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline EnvState reset(std::shared_ptr<const Kitchen> kitchen, std::uint64_t seed) {
  require_valid(kitchen->level);
  EnvState s;
  const Level& level = kitchen->level;
  for (std::size_t a = 0; a < 2; ++a) {
    s.pos[a] = level.agents[a].cell;
    s.dir[a] = level.agents[a].dir;
    s.held[a] = Item::Nothing;
  }
  s.pots.assign(kitchen->pot_cells.size(), PotState{});
  s.counters.assign(level.size(), Item::Nothing);
  s.rng_state = Rng::mix(seed, 0x6f6763ULL);
  s.kitchen = std::move(kitchen);
  return s;
}

inline EnvState reset(const Level& level, std::uint64_t seed, const EnvParams& params = {}) {
  return reset(std::make_shared<const Kitchen>(level, params), seed);
}

// Simultaneous move resolution. Proposals into non-floor cells are dropped
// first; then a shared target or a swap cancels both moves.
inline std::array<Cell, 2> resolve_movement(const std::array<Cell, 2>& positions, std::array<Cell, 2> proposals,
                                            const Level& level) {
  for (std::size_t a = 0; a < 2; ++a) {
    if (level.at_or_wall(proposals[a]) != Tile::Floor) proposals[a] = positions[a];
  }
  if (proposals[0] == proposals[1]) return positions;
  if (proposals[0] == positions[1] && proposals[1] == positions[0]) return positions;
  return proposals;
}

inline bool any_pot_has_onions(const EnvState& s) {
  for (const auto& p : s.pots) {
    if (p.onions > 0) return true;
  }
  return false;
}

// Interaction with the cell the agent faces. Undefined (item, tile) pairs are
// no-ops. Returns the shaped/delivery event, if any.
inline std::optional<Event> apply_interact(EnvState& s, int agent) {
  const auto a = static_cast<std::size_t>(agent);
  const Cell target = s.pos[a].step(s.dir[a]);
  const Level& level = s.level();
  if (!level.contains(target)) return std::nullopt;
  Item& hand = s.held[a];

  switch (level.at(target)) {
    case Tile::Floor:
      return std::nullopt;
    case Tile::OnionPile:
      if (hand == Item::Nothing) hand = Item::Onion;
      return std::nullopt;
    case Tile::PlatePile:
      if (hand == Item::Nothing) {
        hand = Item::Plate;
        if (any_pot_has_onions(s)) return Event{EventKind::PlatePickup, agent};
      }
      return std::nullopt;
    case Tile::Wall: {
      Item& counter = s.counters[level.index(target)];
      if (hand == Item::Nothing && counter != Item::Nothing) {
        hand = counter;
        counter = Item::Nothing;
      } else if (hand != Item::Nothing && counter == Item::Nothing) {
        counter = hand;
        hand = Item::Nothing;
      }
      return std::nullopt;
    }
    case Tile::Pot: {
      PotState& pot = *s.pot_at(target);
      if (hand == Item::Onion && pot.accepts_onion()) {
        hand = Item::Nothing;
        if (++pot.onions == kPotCapacity) pot.timer = s.params().cook_time;
        return Event{EventKind::OnionPotted, agent};
      }
      if (hand == Item::Plate && pot.ready) {
        hand = Item::Soup;
        pot = PotState{};
        return Event{EventKind::SoupPickup, agent};
      }
      return std::nullopt;
    }
    case Tile::Goal:
      if (hand == Item::Soup) {
        hand = Item::Nothing;
        ++s.deliveries;
        return Event{EventKind::Delivery, agent};
      }
      return std::nullopt;
  }
  return std::nullopt;
}

// Result of an in-place step; at most one event per agent.
struct StepInfo {
  double reward = 0.0;
  std::array<double, 2> shaped{};
  bool done = false;
  std::array<Event, 2> events{};
  int n_events = 0;

  std::span<const Event> event_span() const { return {events.data(), static_cast<std::size_t>(n_events)}; }
};

inline StepInfo step_in_place(EnvState& s, const JointAction& joint) {
  if (s.done()) throw EnvError("step called on a finished episode (t = " + std::to_string(s.t) + ")");
  const EnvParams& params = s.params();

  std::array<Cell, 2> proposals = s.pos;
  for (std::size_t a = 0; a < 2; ++a) {
    if (auto d = action_direction(joint[a])) {
      s.dir[a] = *d;
      proposals[a] = s.pos[a].step(*d);
    }
  }
  s.pos = resolve_movement(s.pos, proposals, s.level());

  StepInfo info;
  for (int a = 0; a < 2; ++a) {
    if (joint[static_cast<std::size_t>(a)] != Action::Interact) continue;
    auto ev = apply_interact(s, a);
    if (!ev) continue;
    info.events[static_cast<std::size_t>(info.n_events++)] = *ev;
    auto& shaped = info.shaped[static_cast<std::size_t>(a)];
    switch (ev->kind) {
      case EventKind::Delivery: info.reward += params.delivery_reward; break;
      case EventKind::OnionPotted: shaped += params.shaped.onion_potted; break;
      case EventKind::PlatePickup: shaped += params.shaped.plate_pickup; break;
      case EventKind::SoupPickup: shaped += params.shaped.soup_pickup; break;
    }
  }

  for (auto& pot : s.pots) {
    if (pot.timer > 0 && --pot.timer == 0) pot.ready = true;
  }

  ++s.t;
  info.done = s.done();
  return info;
}

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;
  std::array<double, 2> shaped{};
  bool done = false;
  std::vector<Event> events;
};

inline StepOutcome step(const EnvState& state, const JointAction& joint) {
  StepOutcome out;
  out.next_state = state;
  const StepInfo info = step_in_place(out.next_state, joint);
  out.reward = info.reward;
  out.shaped = info.shaped;
  out.done = info.done;
  out.events.assign(info.event_span().begin(), info.event_span().end());
  return out;
}

// ---------------------------------------------------------------------------
// Observations: channel-major stack of boolean h x w masks, ego agent first.
//
//   0 self position        1 other position
//   2-5 self facing U/D/L/R   6-9 other facing U/D/L/R
//   10 wall  11 onion pile  12 plate pile  13 pot  14 goal
//   15/16/17 pot holding exactly 1/2/3 onions
//   18 pot cooking  19 pot ready
//   20/21/22 onion/plate/soup lying on a counter
//   23/24/25 onion/plate/soup held (marked at the holder's cell)

inline constexpr int kObsChannels = 26;

namespace channel {
inline constexpr int kSelfPos = 0;
inline constexpr int kOtherPos = 1;
inline constexpr int kSelfDir = 2;
inline constexpr int kOtherDir = 6;
inline constexpr int kWall = 10;
inline constexpr int kOnionPile = 11;
inline constexpr int kPlatePile = 12;
inline constexpr int kPot = 13;
inline constexpr int kGoal = 14;
inline constexpr int kPotOnions = 15;  // +0,+1,+2 for 1,2,3 onions
inline constexpr int kPotCooking = 18;
inline constexpr int kPotReady = 19;
inline constexpr int kCounterItem = 20;  // +0 onion, +1 plate, +2 soup
inline constexpr int kHeldItem = 23;     // +0 onion, +1 plate, +2 soup
}  // namespace channel

struct Observation {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  Observation() = default;
  Observation(int c, int h, int w) : channels(c), height(h), width(w), data(static_cast<std::size_t>(c * h * w), 0) {}

  std::size_t plane() const { return static_cast<std::size_t>(height * width); }
  std::uint8_t& at(int c, Cell cell) {
    return data[static_cast<std::size_t>(c) * plane() + static_cast<std::size_t>(cell.row * width + cell.col)];
  }
  bool at(int c, Cell cell) const {
    return data[static_cast<std::size_t>(c) * plane() + static_cast<std::size_t>(cell.row * width + cell.col)] != 0;
  }
  std::span<const std::uint8_t> channel(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * plane(), plane()};
  }
  int popcount(int c) const {
    int n = 0;
    for (auto v : channel(c)) n += v;
    return n;
  }

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline int item_offset(Item i) { return static_cast<int>(i) - 1; }

inline Observation observe(const EnvState& s, int agent) {
  const Level& level = s.level();
  Observation obs(kObsChannels, level.height, level.width);
  const auto self = static_cast<std::size_t>(agent);
  const auto other = 1 - self;

  obs.at(channel::kSelfPos, s.pos[self]) = 1;
  obs.at(channel::kOtherPos, s.pos[other]) = 1;
  obs.at(channel::kSelfDir + static_cast<int>(s.dir[self]), s.pos[self]) = 1;
  obs.at(channel::kOtherDir + static_cast<int>(s.dir[other]), s.pos[other]) = 1;

  for (std::size_t i = 0; i < level.size(); ++i) {
    const Cell c = level.cell(i);
    switch (level.grid[i]) {
      case Tile::Wall: obs.at(channel::kWall, c) = 1; break;
      case Tile::OnionPile: obs.at(channel::kOnionPile, c) = 1; break;
      case Tile::PlatePile: obs.at(channel::kPlatePile, c) = 1; break;
      case Tile::Pot: obs.at(channel::kPot, c) = 1; break;
      case Tile::Goal: obs.at(channel::kGoal, c) = 1; break;
      case Tile::Floor: break;
    }
    if (s.counters[i] != Item::Nothing) obs.at(channel::kCounterItem + item_offset(s.counters[i]), c) = 1;
  }

  const auto& kitchen = *s.kitchen;
  for (std::size_t p = 0; p < s.pots.size(); ++p) {
    const PotState& pot = s.pots[p];
    const Cell c = kitchen.pot_cells[p];
    if (pot.onions > 0) obs.at(channel::kPotOnions + pot.onions - 1, c) = 1;
    if (pot.cooking()) obs.at(channel::kPotCooking, c) = 1;
    if (pot.ready) obs.at(channel::kPotReady, c) = 1;
  }

  for (std::size_t a = 0; a < 2; ++a) {
    if (s.held[a] != Item::Nothing) obs.at(channel::kHeldItem + item_offset(s.held[a]), s.pos[a]) = 1;
  }
  return obs;
}

// Joint observation for a centralised critic: a's channels followed by b's.
inline Observation centralized_observation(const Observation& a, const Observation& b) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument("centralized_observation: observation dimensions differ");
  }
  Observation out(a.channels + b.channels, a.height, a.width);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
  return out;
}

}  // namespace ogc
