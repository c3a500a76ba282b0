#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "ogc/generator.hpp"
#include "ogc/harness.hpp"
#include "ogc/layouts.hpp"

using namespace ogc;

namespace {

const char* kSmall = "WWPWW\nWA AW\nWO BW\nWWGWW\n";

HarnessConfig short_config(int horizon = 400) {
  HarnessConfig hc;
  hc.horizon = horizon;
  return hc;
}

}  // namespace

TEST(Rollout, StayPairEarnsNothingAndStaysPut) {
  const Level l = parse_ascii(kSmall);
  const auto hc = short_config();
  const auto s = rollout(l, stay_policy(), stay_policy(), hc, 0);
  EXPECT_EQ(s.shared_return, 0.0);
  EXPECT_EQ(s.deliveries, 0);
  EXPECT_FALSE(s.solved);
  int nonzero = 0;
  for (int v : s.visits) {
    if (v) {
      ++nonzero;
      EXPECT_EQ(v, hc.horizon);
    }
  }
  EXPECT_EQ(nonzero, 2);
}

TEST(Rollout, VisitsSumToTwiceHorizon) {
  Rng gen(4);
  for (int i = 0; i < 20; ++i) {
    const Level l = sample_level(gen);
    const auto s = rollout(l, random_policy(1), greedy_policy(), short_config(123), static_cast<std::uint64_t>(i));
    EXPECT_EQ(std::accumulate(s.visits.begin(), s.visits.end(), 0), 2 * 123);
    EXPECT_EQ(s.shared_return, 20.0 * s.deliveries);
  }
}

TEST(Rollout, TraceMatchesStats) {
  Trajectory tr;
  const auto hc = short_config();
  const auto s = rollout(builtin_level("cramped_room"), greedy_policy(), greedy_policy(), hc, 7, &tr);
  ASSERT_EQ(tr.steps.size(), 400u);
  double total = 0.0;
  for (std::size_t t = 0; t < tr.steps.size(); ++t) {
    EXPECT_EQ(tr.steps[t].t, static_cast<int>(t));
    total += tr.steps[t].reward;
  }
  EXPECT_EQ(total, s.shared_return);
  const auto h = visit_heatmap(std::vector<Trajectory>{tr});
  for (std::size_t i = 0; i < h.counts.size(); ++i) EXPECT_EQ(h.counts[i], s.visits[i]);
}

TEST(Rollout, RejectsNullPolicy) {
  const Level l = parse_ascii(kSmall);
  EXPECT_THROW(rollout(l, nullptr, stay_policy(), short_config(), 0), std::invalid_argument);
  EXPECT_THROW(rollout_batch({l}, stay_policy(), nullptr, short_config()), std::invalid_argument);
}

TEST(Batch, MatchesSequentialForAnyThreadCount) {
  const Level l = parse_ascii(kSmall);
  std::vector<Level> levels(1024, l);
  auto hc = short_config(50);
  hc.seed = 99;
  hc.threads = 4;
  const auto batch = rollout_batch(levels, random_policy(3), random_policy(4), hc);
  hc.threads = 1;
  const auto single = rollout_batch(levels, random_policy(3), random_policy(4), hc);
  ASSERT_EQ(batch.size(), 1024u);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto seq = rollout(levels[i], random_policy(3), random_policy(4), hc, slot_seed(hc.seed, i));
    ASSERT_EQ(batch[i], seq) << i;
    ASSERT_EQ(single[i], seq) << i;
  }
}

TEST(Metrics, SolvedRateAndStd) {
  std::vector<EpisodeStats> stats(4);
  for (int i = 0; i < 4; ++i) {
    stats[static_cast<std::size_t>(i)].deliveries = i;
    stats[static_cast<std::size_t>(i)].shared_return = 20.0 * i;
    stats[static_cast<std::size_t>(i)].solved = is_solved(i);
  }
  const auto m = metrics(stats);
  EXPECT_EQ(m.solved_rate, 0.5);
  EXPECT_EQ(m.mean_return, 30.0);
  EXPECT_NEAR(m.std_return, std::sqrt(500.0), 1e-12);
  EXPECT_EQ(m.n_episodes, 4);
  EXPECT_THROW(metrics({}), std::invalid_argument);
}

TEST(Suite, GreedySolvesBuiltins) {
  const auto r = evaluate_suite(builtin_eval_suite(), greedy_policy(), greedy_policy(), 2, short_config());
  EXPECT_EQ(r.per_level.size(), 5u);
  EXPECT_GT(r.overall.solved_rate, 0.0);
  EXPECT_EQ(r.overall.n_episodes, 10);
  for (const auto& lm : r.per_level) EXPECT_GE(lm.metrics.mean_return, 20.0) << lm.name;
}

TEST(Suite, CrossplayWithStayOnForcedCoordinationIsZero) {
  const std::vector<NamedLevel> levels{{"forced_coordination", builtin_level("forced_coordination")}};
  const std::vector<PolicyPtr> pols{stay_policy(), greedy_policy()};
  const auto m = crossplay_matrix(pols, levels, 2, short_config());
  EXPECT_EQ(m[0][0].mean_return, 0.0);
  EXPECT_EQ(m[0][1].mean_return, 0.0);
  EXPECT_EQ(m[1][0].mean_return, 0.0);
  EXPECT_GT(m[1][1].mean_return, 0.0);
}

TEST(Solvability, SmallExampleAndBuiltins) {
  const auto r = solvability_check(parse_ascii(kSmall));
  EXPECT_TRUE(r.solvable);
  ASSERT_TRUE(r.certificate);
  EXPECT_TRUE(r.certificate->handovers.empty());
  EXPECT_EQ(r.certificate->pot, (Cell{0, 2}));
  for (const auto& [name, level] : builtin_eval_suite()) EXPECT_TRUE(solvability_check(level).solvable) << name;
  const auto fc = solvability_check(builtin_level("forced_coordination"));
  EXPECT_EQ(fc.agent_regions.size(), 2u);
  EXPECT_FALSE(fc.certificate->handovers.empty());
}

TEST(Solvability, SealedPotIsUnsolvable) {
  const Level l = parse_ascii(
      "WWWWWWWWW\n"
      "WA  WWW W\n"
      "O   WPW W\n"
      "B  AWWW G\n"
      "WWWWWWWWW\n");
  const auto r = solvability_check(l);
  EXPECT_FALSE(r.solvable);
  EXPECT_FALSE(r.certificate);
}

TEST(Solvability, CertificateRegionsTouchTheirStations) {
  Rng gen(17);
  for (int i = 0; i < 300; ++i) {
    const Level l = sample_level(gen);
    const auto r = solvability_check(l);
    if (!r.solvable) continue;
    const auto region = floor_regions(l);
    const auto& c = *r.certificate;
    auto touches = [&](Cell at, int reg) {
      for (Direction d : kDirections) {
        const Cell n = at.step(d);
        if (l.contains(n) && region[l.index(n)] == reg) return true;
      }
      return false;
    };
    EXPECT_EQ(l.at(c.pot), Tile::Pot);
    EXPECT_TRUE(touches(c.pot, c.load_region));
    EXPECT_TRUE(touches(c.pot, c.serve_region));
    for (const auto& h : c.handovers) {
      EXPECT_EQ(l.at(h.counter), Tile::Wall);
      EXPECT_TRUE(touches(h.counter, h.from_region));
      EXPECT_TRUE(touches(h.counter, h.to_region));
    }
  }
}

// Soundness against the scripted cook: certified levels the greedy pair
// cannot finish must be few. The greedy planner is not optimal, so this
// bounds its misses rather than demanding none.
TEST(Solvability, GreedyDeliversOnCertifiedLevels) {
  Rng gen(23);
  int certified = 0, delivered = 0;
  while (certified < 50) {
    const Level l = sample_level(gen);
    if (!solvability_check(l).solvable) continue;
    ++certified;
    delivered += rollout(l, greedy_policy(), greedy_policy(), short_config(), 0).deliveries >= 1;
  }
  EXPECT_GE(delivered, 45);
}

TEST(Shaping, LinearAnneal) {
  HarnessConfig hc;
  hc.anneal_steps = 1000;
  EXPECT_EQ(shaping_coefficient(0, hc), 1.0);
  EXPECT_EQ(shaping_coefficient(500, hc), 0.5);
  EXPECT_EQ(shaping_coefficient(1000, hc), 0.0);
  EXPECT_EQ(shaping_coefficient(5000, hc), 0.0);
  EXPECT_THROW(shaping_coefficient(-1, hc), std::invalid_argument);
  hc.anneal_steps = 0;
  EXPECT_THROW(shaping_coefficient(0, hc), std::invalid_argument);
}

TEST(Bench, CsvShapeAndDefaults) {
  EXPECT_EQ(kDefaultBenchEnvCounts, (std::vector<int>{1, 32, 256, 1024, 4096, 16384}));
  const auto rows = throughput_bench({1, 4}, 50, 0, 1);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.env, "overcooked");
    EXPECT_GT(r.sps, 0.0);
  }
  const auto csv = bench_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "env,n_envs,steps,seconds,sps");
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    EXPECT_EQ(line.rfind("overcooked,", 0), 0u);
  }
  EXPECT_EQ(n, 2);
  EXPECT_THROW(bench_once(0, 10, 0), std::invalid_argument);
}

TEST(Heatmap, CrampedRoomCorridorIsVisited) {
  const Level l = builtin_level("cramped_room");
  std::vector<EpisodeStats> eps;
  for (std::uint64_t s = 0; s < 4; ++s) eps.push_back(rollout(l, greedy_policy(), greedy_policy(), short_config(), s));
  const auto h = visit_heatmap(eps);
  EXPECT_EQ(h.total(), 4LL * 2 * 400);
  // Cell in front of the pot.
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l.grid[i] == Tile::Pot) {
      EXPECT_GT(h.at(l.cell(i).step(Direction::Down)), 0);
    } else if (l.grid[i] != Tile::Floor) {
      EXPECT_EQ(h.counts[i], 0);
    }
  }
  const auto csv = heatmap_csv(h);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), h.height);
}
