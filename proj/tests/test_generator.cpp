#include <gtest/gtest.h>

#include <set>

#include "ogc/generator.hpp"

using namespace ogc;

TEST(Generator, FixedSeedIsReproducible) {
  Rng a(42), b(42);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_level(a), sample_level(b));
}

TEST(Generator, TenThousandSamplesAreValid) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const Level l = sample_level(rng);
    ASSERT_TRUE(validate(l).valid()) << render_ascii(l);
    for (Tile t : kStationTiles) {
      const int n = count_tiles(l, t);
      ASSERT_GE(n, 1);
      ASSERT_LE(n, 2);
    }
    ASSERT_LE(interior_wall_count(l), 15);
    ASSERT_EQ(l.height, 6);
    ASSERT_EQ(l.width, 9);
  }
}

TEST(Generator, ZeroWallRangeGivesOpenRoom) {
  GeneratorConfig cfg;
  cfg.max_walls = 0;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Level l = sample_level(rng, cfg);
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (!l.on_border(l.cell(k))) {
        ASSERT_NE(l.grid[k], Tile::Wall);
      }
    }
  }
}

TEST(Generator, WallRangeOneToFifteen) {
  GeneratorConfig cfg;
  cfg.min_walls = 1;
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const Level l = sample_level(rng, cfg);
    int interior = 0;
    for (std::size_t k = 0; k < l.size(); ++k) interior += !l.on_border(l.cell(k)) && l.grid[k] == Tile::Wall;
    ASSERT_GE(interior, 1);
    ASSERT_LE(interior, 15);
  }
}

TEST(Generator, ConfigChecks) {
  GeneratorConfig bad;
  bad.max_walls = 16;
  Rng rng(0);
  EXPECT_THROW(sample_level(rng, bad), std::invalid_argument);
  GeneratorConfig stations;
  stations.max_stations = 3;
  EXPECT_THROW(sample_level(rng, stations), std::invalid_argument);
}

TEST(Generator, TinyCanvasExhaustsRetries) {
  GeneratorConfig cfg;
  cfg.canvas_h = 4;
  cfg.canvas_w = 4;  // 4 interior cells cannot hold 4 stations and 2 agents
  cfg.max_walls = 0;
  Rng rng(0);
  SampleStats stats;
  EXPECT_THROW(sample_level(rng, cfg, &stats), GenerationError);
  EXPECT_EQ(stats.attempts, cfg.retry_bound);
}

TEST(Batch, SplitStreamsAndDistinctDigests) {
  const Rng root(2024);
  const auto a = sample_batch(root, {}, 32);
  const auto b = sample_batch(root, {}, 32);
  ASSERT_EQ(a.size(), 32u);
  EXPECT_EQ(a, b);
  std::set<std::uint64_t> digests;
  for (const auto& l : a) digests.insert(level_digest(l).value);
  EXPECT_EQ(digests.size(), 32u);

  Rng slot0 = root.split(0);
  EXPECT_EQ(sample_batch(root, {}, 1).front(), sample_level(slot0));
  EXPECT_THROW(sample_batch(root, {}, 0), std::invalid_argument);
}

TEST(Batch, DigestCollisionsAcrossTrials) {
  int collisions = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::set<std::uint64_t> digests;
    for (const auto& l : sample_batch(Rng(seed), {}, 32)) digests.insert(level_digest(l).value);
    collisions += 32 - static_cast<int>(digests.size());
  }
  EXPECT_EQ(collisions, 0);
}

TEST(Generator, WallFrequencyNearUniform) {
  // Each of the 28 interior cells should be a wall with frequency
  // E[walls] / 28 = 7.5 / 28 (wall count uniform on [0, 15]).
  Rng rng(99);
  const int n = 10000;
  std::vector<int> hits(54, 0);
  for (int i = 0; i < n; ++i) {
    const Level l = sample_level(rng);
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (!l.on_border(l.cell(k)) && l.grid[k] == Tile::Wall) ++hits[k];
    }
  }
  const double expected = n * 7.5 / 28.0;
  const Level shape(6, 9);
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (shape.on_border(shape.cell(k))) continue;
    EXPECT_NEAR(hits[k], expected, 0.2 * expected) << "cell " << k;
  }
}
