#include <gtest/gtest.h>

#include <cstdlib>

#include "ogc/agents.hpp"
#include "ogc/harness.hpp"
#include "ogc/layouts.hpp"

using namespace ogc;

namespace {

const char* kCorridor =
    "WWOWPWBWW\n"
    "WA     AW\n"
    "WWWWGWWWW\n";

int hops(Cell a, Cell b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

}  // namespace

TEST(Bfs, StraightCorridorIsManhattan) {
  Level l(3, 9, Tile::Wall);
  for (int c = 1; c <= 7; ++c) l.set({1, c}, Tile::Floor);
  const auto p = bfs_path(l, {1, 1}, {1, 8});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->front(), (Cell{1, 1}));
  EXPECT_EQ(p->back(), (Cell{1, 7}));
  EXPECT_EQ(static_cast<int>(p->size()) - 1, hops({1, 1}, {1, 7}));
  for (std::size_t i = 1; i < p->size(); ++i) EXPECT_EQ(hops((*p)[i - 1], (*p)[i]), 1);
}

TEST(Bfs, UnreachableAndBlocked) {
  Level l(3, 9, Tile::Wall);
  for (int c = 1; c <= 3; ++c) l.set({1, c}, Tile::Floor);
  for (int c = 5; c <= 7; ++c) l.set({1, c}, Tile::Floor);
  EXPECT_FALSE(bfs_path(l, {1, 1}, {1, 8}));
  EXPECT_TRUE(bfs_path(l, {1, 1}, {1, 4}));  // adjacent to the wall from the left
  EXPECT_FALSE(bfs_path(l, {1, 1}, {0, 3}, {{1, 2}}));
  EXPECT_FALSE(bfs_path(l, {0, 0}, {1, 4}));  // start on a wall
}

TEST(Bfs, TieBreakPrefersUpThenDown) {
  // Open 5x5 interior; from (3,1) to a target at (1,5)'s neighbour: the
  // first step should be Up when both Up and Right are shortest.
  Level l(7, 7, Tile::Floor);
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l.on_border(l.cell(i))) l.grid[i] = Tile::Wall;
  }
  const auto p = bfs_path(l, {3, 1}, {1, 6});
  ASSERT_TRUE(p);
  EXPECT_EQ((*p)[1], (Cell{2, 1}));
  EXPECT_EQ(static_cast<int>(p->size()) - 1, hops({3, 1}, {1, 5}));
}

TEST(Regions, ForcedCoordinationHasTwo) {
  int n = 0;
  const auto r = floor_regions(builtin_level("forced_coordination"), &n);
  EXPECT_EQ(n, 2);
  int n2 = 0;
  floor_regions(builtin_level("cramped_room"), &n2);
  EXPECT_EQ(n2, 1);
  EXPECT_EQ(r.size(), 54u);
}

TEST(RandomPolicy, UniformOverSixActions) {
  const auto p = random_policy(11);
  auto mem = p->reset_memory(3, 0);
  const int n = 60000;
  std::array<int, kNumActions> hits{};
  for (int i = 0; i < n; ++i) ++hits[static_cast<std::size_t>(p->act({}, 0, mem))];
  for (int h : hits) {
    EXPECT_GT(h, 0);
    EXPECT_NEAR(h / double(n), 1.0 / 6.0, 0.02);
  }
}

TEST(RandomPolicy, ReproducibleStreams) {
  const auto p = random_policy(5);
  auto draw = [&](std::uint64_t episode, int agent) {
    auto mem = p->reset_memory(episode, agent);
    std::vector<Action> out;
    for (int i = 0; i < 50; ++i) out.push_back(p->act({}, agent, mem));
    return out;
  };
  EXPECT_EQ(draw(1, 0), draw(1, 0));
  EXPECT_NE(draw(1, 0), draw(1, 1));
  EXPECT_NE(draw(1, 0), draw(2, 0));
  EXPECT_EQ(p->name(), "random:5");
}

TEST(StayPolicy, AlwaysStays) {
  const auto p = stay_policy();
  auto mem = p->reset_memory(0, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(p->act({}, 0, mem), Action::Stay);
  EXPECT_TRUE(mem.recent.empty());
  EXPECT_EQ(p->observability(), Observability::Masked);
}

TEST(Greedy, NeedsPrivilegedState) {
  const auto g = greedy_policy();
  EXPECT_EQ(g->observability(), Observability::Privileged);
  auto mem = g->reset_memory(0, 0);
  EXPECT_THROW(g->act({}, 0, mem), std::invalid_argument);
}

TEST(Greedy, SolvesEveryBuiltin) {
  HarnessConfig hc;
  for (const auto& [name, level] : builtin_eval_suite()) {
    const auto s = rollout(level, greedy_policy(), greedy_policy(), hc, 1);
    EXPECT_GE(s.deliveries, 2) << name;
  }
}

TEST(Greedy, SolvesSymmetrySuite) {
  HarnessConfig hc;
  for (const auto& [name, level] : symmetry_suite()) {
    EXPECT_GE(rollout(level, greedy_policy(), greedy_policy(), hc, 0).deliveries, 1) << name;
  }
}

TEST(Greedy, SealedPotGivesNothingAndDoesNotCrash) {
  // The pot is boxed in by walls, so no agent can face it.
  const Level l = parse_ascii(
      "WWWWWWWWW\n"
      "WA  WWW W\n"
      "O   WPW W\n"
      "B  AWWW G\n"
      "WWWWWWWWW\n");
  HarnessConfig hc;
  const auto s = rollout(l, greedy_policy(), greedy_policy(), hc, 0);
  EXPECT_EQ(s.deliveries, 0);
  EXPECT_EQ(s.shared_return, 0.0);
}

TEST(Greedy, NarrowCorridorDoesNotLivelock) {
  const Level l = parse_ascii(kCorridor);
  HarnessConfig hc;
  const auto s = rollout(l, greedy_policy(), greedy_policy(), hc, 3);
  EXPECT_GE(s.deliveries, 1);
}

TEST(Greedy, PairedWithStayStillCooksAlone) {
  HarnessConfig hc;
  // Agent 1 sits on the only plate-access cell, so only agent 2 can cook.
  const auto s = rollout(builtin_level("cramped_room"), stay_policy(), greedy_policy(), hc, 0);
  EXPECT_GE(s.deliveries, 1);
}

TEST(MakePolicy, NamesAndErrors) {
  EXPECT_EQ(make_policy("stay")->name(), "stay");
  EXPECT_EQ(make_policy("greedy")->name(), "greedy");
  EXPECT_EQ(make_policy("random:42")->name(), "random:42");
  EXPECT_THROW(make_policy("random:"), PolicyNameError);
  EXPECT_THROW(make_policy("random:x1"), PolicyNameError);
  EXPECT_THROW(make_policy("ppo"), PolicyNameError);
}
