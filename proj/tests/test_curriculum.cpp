#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ogc/curriculum.hpp"
#include "ogc/generator.hpp"
#include "ogc/io.hpp"

using namespace ogc;

namespace {

// Closed-form rank weights (1/rank)^(1/beta), normalised.
std::vector<double> rank_oracle(int n, double beta) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += w[static_cast<std::size_t>(i)] = std::pow(1.0 / (i + 1), 1.0 / beta);
  for (auto& x : w) x /= z;
  return w;
}

std::vector<Level> distinct_levels(int n, std::uint64_t seed = 5) {
  return sample_batch(Rng(seed), {}, n);
}

PlrConfig no_staleness() {
  PlrConfig c;
  c.staleness_coef = 0.0;
  return c;
}

}  // namespace

TEST(Config, Defaults) {
  const PlrConfig c;
  EXPECT_EQ(c.capacity, 4000u);
  EXPECT_EQ(c.replay_prob, 0.5);
  EXPECT_EQ(c.staleness_coef, 0.3);
  EXPECT_EQ(c.temperature, 0.1);
  EXPECT_TRUE(c.rank_prioritization);
  EXPECT_EQ(c.min_fill_ratio, 0.5);
  EXPECT_TRUE(c.force_unique);
  EXPECT_TRUE(c.robust);
  const auto a = PlrConfig::accel_preset();
  EXPECT_EQ(a.replay_prob, 0.8);
  ASSERT_TRUE(a.accel);
  EXPECT_EQ(a.accel->n_mutations, 20);
  EXPECT_EQ(a.accel->subsample, 4);
  PlrConfig bad;
  bad.temperature = 0.0;
  EXPECT_THROW(bad.check(), std::invalid_argument);
  bad = PlrConfig{};
  bad.replay_prob = 1.5;
  EXPECT_THROW(bad.check(), std::invalid_argument);
}

TEST(MaxMC, Examples) {
  EpisodeSummary ep;
  ep.values = {0, 10, 20};
  ep.max_known_return = 20;
  EXPECT_EQ(maxmc_score(ep), 10.0);
  ep.values = {20, 20};
  EXPECT_EQ(maxmc_score(ep), 0.0);
  ep.values = {30};
  EXPECT_EQ(maxmc_score(ep), -10.0);
  EXPECT_EQ(maxmc_score(ep, true), 0.0);
  ep.values.clear();
  EXPECT_THROW(maxmc_score(ep), CurriculumError);
}

TEST(RelativeRegret, Examples) {
  EXPECT_EQ(relative_regret({30, 10}), 20.0);
  EXPECT_EQ(relative_regret({5, 5}), 0.0);
  EXPECT_EQ(relative_regret({0, 7}), 7.0);
  EXPECT_EQ(relative_regret({9, 3, 6}), 4.5);
  EXPECT_THROW(relative_regret({1}), CurriculumError);
}

TEST(MaxReturn, RunningMaxFromFirstObservation) {
  MaxReturnTable t;
  const LevelDigest d{7};
  EXPECT_FALSE(t.get(d));
  EXPECT_EQ(t.observe(d, -3), -3);
  EXPECT_EQ(t.observe(d, -5), -3);
  EXPECT_EQ(t.observe(d, 4), 4);
  EpisodeSummary ep{d, {}, 2.0, {1.0, 3.0}, 0.0};
  EXPECT_EQ(score_episode(ep, t), 4.0 - 2.0);
  EXPECT_GE(ep.max_known_return, ep.shared_return);
}

TEST(Decide, GateAndRobustContract) {
  const PlrConfig cfg;
  LevelBuffer empty(cfg.capacity);
  Rng rng(0);
  for (int i = 0; i < 100; ++i) {
    const auto d = decide_source(empty, cfg, rng);
    EXPECT_EQ(d.source, LevelSource::Generate);
    EXPECT_FALSE(d.update_policy);
  }

  PlrConfig small = cfg;
  small.capacity = 10;
  LevelBuffer partial(10);
  const auto lv = distinct_levels(10);
  for (int i = 0; i < 4; ++i) insert_or_update(partial, lv[static_cast<std::size_t>(i)], 1.0, 0, small);
  ASSERT_DOUBLE_EQ(partial.fill_ratio(), 0.4);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(decide_source(partial, small, rng).source, LevelSource::Generate);

  for (int i = 4; i < 10; ++i) insert_or_update(partial, lv[static_cast<std::size_t>(i)], 1.0, 0, small);
  int replays = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto d = decide_source(partial, small, rng);
    if (d.source == LevelSource::Replay) {
      ++replays;
      EXPECT_TRUE(d.update_policy);
    } else {
      EXPECT_FALSE(d.update_policy);
    }
  }
  EXPECT_NEAR(replays / 10000.0, 0.5, 0.03);

  PlrConfig plain = small;
  plain.robust = false;
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(decide_source(partial, plain, rng).update_policy);
}

TEST(Decide, DomainRandomisationAlwaysGenerates) {
  const auto cfg = PlrConfig::domain_randomisation();
  LevelBuffer buffer(cfg.capacity);
  EXPECT_EQ(insert_or_update(buffer, distinct_levels(1)[0], 5.0, 0, cfg), InsertOutcome::Rejected);
  const auto ds = decide_batch(buffer, cfg, Rng(3), 64);
  for (const auto& d : ds) EXPECT_EQ(d.source, LevelSource::Generate);
}

TEST(Sample, RankProbabilitiesMatchClosedForm) {
  const auto cfg = no_staleness();
  LevelBuffer b(cfg.capacity);
  const auto lv = distinct_levels(3);
  insert_or_update(b, lv[0], 10, 0, cfg);
  insert_or_update(b, lv[1], 5, 0, cfg);
  insert_or_update(b, lv[2], 1, 0, cfg);
  const auto p = replay_distribution(b, cfg, 0);
  const auto o = rank_oracle(3, 0.1);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[static_cast<std::size_t>(i)], o[static_cast<std::size_t>(i)], 1e-12);
  // Rounded literals as printed.
  EXPECT_NEAR(p[0], 0.99901, 5e-6);
  EXPECT_NEAR(p[1], 9.766e-4, 5e-6);
  EXPECT_NEAR(p[2], 1.693e-5, 5e-8);
}

TEST(Sample, DistributionProperties) {
  Rng rng(2);
  const auto lv = distinct_levels(40);
  PlrConfig cfg = no_staleness();
  cfg.temperature = 1.0;
  LevelBuffer b(100);
  for (std::size_t i = 0; i < lv.size(); ++i) insert_or_update(b, lv[i], rng.uniform() * 10, 0, cfg);
  const auto p = replay_distribution(b, cfg, 50);
  double sum = 0.0;
  for (double x : p) sum += x;
  EXPECT_NEAR(sum, 1.0, 1e-9);
  const auto order = rank_order(b);
  for (std::size_t r = 1; r < order.size(); ++r) EXPECT_GE(p[order[r - 1]], p[order[r]]);

  // Staleness only.
  PlrConfig stale = cfg;
  stale.staleness_coef = 1.0;
  for (std::size_t i = 0; i < b.size(); ++i) b.entry(i).last_sampled_episode = static_cast<long>(i);
  const auto q = replay_distribution(b, stale, 100);
  double z = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) z += 100.0 - static_cast<double>(i);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(q[i], (100.0 - static_cast<double>(i)) / z, 1e-12);
}

TEST(Sample, SingleEntryAndBookkeeping) {
  const PlrConfig cfg;
  LevelBuffer b(4);
  insert_or_update(b, distinct_levels(1)[0], 3.0, 2, cfg);
  EXPECT_EQ(replay_distribution(b, cfg, 9), std::vector<double>{1.0});
  Rng rng(0);
  const auto e = sample_from_buffer(b, cfg, 9, rng);
  EXPECT_EQ(e.digest, b.entry(0).digest);
  EXPECT_EQ(b.entry(0).last_sampled_episode, 9);
  LevelBuffer none(4);
  EXPECT_THROW(sample_from_buffer(none, cfg, 0, rng), CurriculumError);
}

TEST(Sample, EmpiricalFrequenciesFollowDistribution) {
  const auto cfg = no_staleness();
  PlrConfig warm = cfg;
  warm.temperature = 0.5;
  LevelBuffer b(10);
  const auto lv = distinct_levels(4);
  for (int i = 0; i < 4; ++i) insert_or_update(b, lv[static_cast<std::size_t>(i)], 4.0 - i, 0, warm);
  const auto p = replay_distribution(b, warm, 0);
  std::vector<int> hits(4, 0);
  Rng rng(1);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hits[sample_index(p, rng)];
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(hits[static_cast<std::size_t>(i)] / double(n), p[static_cast<std::size_t>(i)], 0.01);
}

TEST(Insert, UniqueUpdateAndEviction) {
  const PlrConfig cfg;
  LevelBuffer b(3);
  const auto lv = distinct_levels(5);
  EXPECT_EQ(insert_or_update(b, lv[0], 1.0, 1, cfg), InsertOutcome::Inserted);
  EXPECT_EQ(insert_or_update(b, lv[0], 7.0, 2, cfg), InsertOutcome::Updated);
  EXPECT_EQ(b.size(), 1u);
  EXPECT_EQ(b.entry(0).score, 7.0);
  EXPECT_EQ(insert_or_update(b, lv[1], 2.0, 3, cfg), InsertOutcome::Inserted);
  EXPECT_EQ(insert_or_update(b, lv[2], 2.0, 4, cfg), InsertOutcome::Inserted);
  // Full. Below the minimum: unchanged.
  EXPECT_EQ(insert_or_update(b, lv[3], 1.5, 5, cfg), InsertOutcome::Rejected);
  EXPECT_FALSE(b.find(level_digest(lv[3])));
  // Equal to the minimum: still rejected.
  EXPECT_EQ(insert_or_update(b, lv[3], 2.0, 5, cfg), InsertOutcome::Rejected);
  // Above: evicts the oldest of the tied minimum (lv[1], inserted at 3).
  EXPECT_EQ(insert_or_update(b, lv[3], 3.0, 6, cfg), InsertOutcome::Replaced);
  EXPECT_FALSE(b.find(level_digest(lv[1])));
  EXPECT_TRUE(b.find(level_digest(lv[2])));
  EXPECT_TRUE(b.find(level_digest(lv[3])));
  EXPECT_EQ(b.size(), 3u);
  EXPECT_THROW(insert_or_update(b, lv[4], std::nan(""), 7, cfg), CurriculumError);
}

TEST(Insert, CapacityAndUniquenessOverManyInserts) {
  PlrConfig cfg;
  cfg.capacity = 200;
  LevelBuffer b(cfg.capacity);
  const auto pool = distinct_levels(400, 8);
  Rng rng(4);
  for (long i = 0; i < 20000; ++i) {
    insert_or_update(b, pool[rng.below(pool.size())], rng.uniform() * 100, i, cfg);
    ASSERT_LE(b.size(), cfg.capacity);
  }
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_TRUE(seen.insert(b.entry(i).digest.value).second);
    EXPECT_EQ(b.find(b.entry(i).digest), i);
    EXPECT_EQ(b.entry(i).digest, level_digest(b.entry(i).level));
  }
}

TEST(Accel, EditCycleProposesSubsampleChildren) {
  PlrConfig cfg = PlrConfig::accel_preset();
  LevelBuffer b(cfg.capacity);
  const auto lv = distinct_levels(4);
  for (int i = 0; i < 4; ++i) insert_or_update(b, lv[static_cast<std::size_t>(i)], i, 0, cfg);
  MaxReturnTable table;
  int calls = 0;
  const Evaluator eval = [&](const Level&) {
    ++calls;
    EpisodeSummary ep;
    ep.shared_return = 0.0;
    ep.values = {-1.0, -1.0};
    return ep;
  };
  Rng rng(6);
  const auto kids = accel_edit_cycle(b, cfg, 1, rng, eval, table);
  EXPECT_EQ(kids.size(), 4u);
  EXPECT_EQ(calls, 4);
  for (const auto& k : kids) {
    EXPECT_FALSE(k.update_policy);
    EXPECT_EQ(k.score, 1.0);
    EXPECT_LE(k.ops_applied, 20);
  }
  EXPECT_LE(b.size(), cfg.capacity);
}

TEST(Accel, ConstantScoresStabiliseFullBuffer) {
  PlrConfig cfg = PlrConfig::accel_preset();
  cfg.capacity = 4;
  LevelBuffer b(cfg.capacity);
  const auto lv = distinct_levels(4);
  for (const auto& l : lv) insert_or_update(b, l, 0.0, 0, cfg);
  std::set<std::uint64_t> before;
  for (const auto& e : b.entries()) before.insert(e.digest.value);
  MaxReturnTable table;
  const Evaluator eval = [](const Level&) {
    EpisodeSummary ep;
    ep.values = {0.0};
    return ep;
  };
  Rng rng(1);
  for (long ep = 1; ep <= 20; ++ep) accel_edit_cycle(b, cfg, ep, rng, eval, table);
  std::set<std::uint64_t> after;
  for (const auto& e : b.entries()) after.insert(e.digest.value);
  EXPECT_EQ(before, after);
}

TEST(Accel, ChildrenRespectWallBudget) {
  PlrConfig cfg = PlrConfig::accel_preset();
  LevelBuffer b(cfg.capacity);
  GeneratorConfig gen;
  gen.min_walls = 15;
  Rng g(0);
  for (int i = 0; i < 8; ++i) insert_or_update(b, sample_level(g, gen), 1.0, 0, cfg);
  MaxReturnTable table;
  const Evaluator eval = [](const Level&) {
    EpisodeSummary ep;
    ep.values = {-5.0};
    return ep;
  };
  for (long ep = 1; ep <= 30; ++ep) {
    for (const auto& k : accel_edit_cycle(b, cfg, ep, g, eval, table)) {
      const auto i = b.find(k.child);
      if (i) {
        ASSERT_LE(interior_wall_count(b.entry(*i).level), 15);
      }
    }
  }
}

TEST(Checkpoint, BitExactReload) {
  PlrConfig cfg;
  LevelBuffer b(50);
  const auto lv = distinct_levels(20);
  Rng rng(3);
  for (std::size_t i = 0; i < lv.size(); ++i) {
    insert_or_update(b, lv[i], rng.uniform() * 1e-3 + 1.0 / 3.0, static_cast<long>(i), cfg);
  }
  b.entry(3).last_sampled_episode = 99;
  const auto text = io::buffer_checkpoint(b);
  const auto back = io::load_buffer_checkpoint(text, 50);
  ASSERT_EQ(back.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_EQ(back.entry(i).digest, b.entry(i).digest);
    EXPECT_EQ(back.entry(i).level, b.entry(i).level);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.entry(i).score), std::bit_cast<std::uint64_t>(b.entry(i).score));
    EXPECT_EQ(back.entry(i).last_sampled_episode, b.entry(i).last_sampled_episode);
    EXPECT_EQ(back.entry(i).insert_episode, b.entry(i).insert_episode);
  }
  EXPECT_EQ(io::buffer_checkpoint(back), text);
  EXPECT_THROW(io::load_buffer_checkpoint(text, 5), io::FormatError);
}
