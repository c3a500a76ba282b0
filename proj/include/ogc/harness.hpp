#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ogc/agents.hpp"
#include "ogc/env.hpp"
#include "ogc/generator.hpp"
#include "ogc/layouts.hpp"
#include "ogc/level.hpp"
#include "ogc/rng.hpp"

namespace ogc {

struct HarnessConfig {
  int horizon = 400;
  int n_envs = 32;
  std::uint64_t seed = 0;
  double shaping_initial = 1.0;
  long long anneal_steps = 1;
  double gamma = 0.999;     // carried for downstream learners; rollouts do not discount
  int solved_threshold = 2;  // deliveries needed for "solved"
  EnvParams env;
  unsigned threads = 0;  // 0: hardware concurrency

  void check() const {
    if (horizon <= 0) throw std::invalid_argument("harness horizon must be positive");
    if (solved_threshold < 1) throw std::invalid_argument("solved threshold must be at least 1");
  }
  EnvParams env_params() const {
    EnvParams p = env;
    p.horizon = horizon;
    return p;
  }
};

struct EpisodeStats {
  LevelDigest digest;
  double shared_return = 0.0;
  std::array<double, 2> shaped_return{};
  int deliveries = 0;
  bool solved = false;
  int height = 0;
  int width = 0;
  std::vector<int> visits;  // row-major h*w, both agents

  friend bool operator==(const EpisodeStats&, const EpisodeStats&) = default;
};

inline bool is_solved(int deliveries, int threshold = 2) { return deliveries >= threshold; }

struct TrajectoryStep {
  int t = 0;
  JointAction actions{};
  double reward = 0.0;
  std::array<double, 2> shaped{};
  std::vector<Event> events;
  std::array<Cell, 2> agent_pos{};  // after the step

  friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

struct Trajectory {
  Level level;
  std::uint64_t seed = 0;
  std::vector<TrajectoryStep> steps;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

inline void require_policies(const PolicyPtr& a, const PolicyPtr& b) {
  if (!a || !b) throw std::invalid_argument("rollout needs two non-null policies");
}

// One episode of config.horizon steps. Masked policies see only their own
// observation; privileged ones also get the state.
inline EpisodeStats rollout(const Level& level, const PolicyPtr& policy_a, const PolicyPtr& policy_b,
                            const HarnessConfig& config, std::uint64_t seed, Trajectory* trace = nullptr) {
  require_policies(policy_a, policy_b);
  config.check();
  EnvState state = reset(level, seed, config.env_params());
  const std::array<const Policy*, 2> policies{policy_a.get(), policy_b.get()};
  std::array<PolicyMemory, 2> memory{policies[0]->reset_memory(seed, 0), policies[1]->reset_memory(seed, 1)};

  EpisodeStats stats;
  stats.digest = level_digest(level);
  stats.height = level.height;
  stats.width = level.width;
  stats.visits.assign(level.size(), 0);
  if (trace) {
    trace->level = level;
    trace->seed = seed;
    trace->steps.clear();
    trace->steps.reserve(static_cast<std::size_t>(config.horizon));
  }

  while (!state.done()) {
    JointAction joint{};
    for (int a = 0; a < 2; ++a) {
      const auto i = static_cast<std::size_t>(a);
      const Observation obs = observe(state, a);
      PolicyView view{&obs, nullptr};
      if (policies[i]->observability() == Observability::Privileged) view.state = &state;
      joint[i] = policies[i]->act(view, a, memory[i]);
    }
    const int t = state.t;
    const StepInfo info = step_in_place(state, joint);
    stats.shared_return += info.reward;
    stats.shaped_return[0] += info.shaped[0];
    stats.shaped_return[1] += info.shaped[1];
    for (const Cell& c : state.pos) ++stats.visits[level.index(c)];
    if (trace) {
      TrajectoryStep step{t, joint, info.reward, info.shaped, {}, state.pos};
      step.events.assign(info.event_span().begin(), info.event_span().end());
      trace->steps.push_back(std::move(step));
    }
  }
  stats.deliveries = state.deliveries;
  stats.solved = is_solved(stats.deliveries, config.solved_threshold);
  return stats;
}

inline unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(i) for i in [0, n) over contiguous chunks, one thread per chunk.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = worker_count(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::uint64_t slot_seed(std::uint64_t seed, std::size_t slot) { return Rng::mix(seed, slot); }

// Slot i runs levels[i] with seed slot_seed(config.seed, i); same result as
// the sequential loop regardless of thread count.
inline std::vector<EpisodeStats> rollout_batch(const std::vector<Level>& levels, const PolicyPtr& policy_a,
                                               const PolicyPtr& policy_b, const HarnessConfig& config) {
  require_policies(policy_a, policy_b);
  if (levels.empty()) throw std::invalid_argument("rollout_batch needs at least one level");
  for (const auto& level : levels) require_valid(level);
  std::vector<EpisodeStats> out(levels.size());
  parallel_for(levels.size(), config.threads, [&](std::size_t i) {
    out[i] = rollout(levels[i], policy_a, policy_b, config, slot_seed(config.seed, i));
  });
  return out;
}

struct Metrics {
  double mean_return = 0.0;
  double solved_rate = 0.0;
  double std_return = 0.0;  // population std of shared returns
  int n_episodes = 0;
};

inline Metrics metrics(const std::vector<EpisodeStats>& stats) {
  if (stats.empty()) throw std::invalid_argument("metrics of an empty episode list");
  Metrics m;
  m.n_episodes = static_cast<int>(stats.size());
  double solved = 0.0;
  for (const auto& s : stats) {
    m.mean_return += s.shared_return;
    solved += s.solved ? 1.0 : 0.0;
  }
  m.mean_return /= m.n_episodes;
  m.solved_rate = solved / m.n_episodes;
  double var = 0.0;
  for (const auto& s : stats) var += (s.shared_return - m.mean_return) * (s.shared_return - m.mean_return);
  m.std_return = std::sqrt(var / m.n_episodes);
  return m;
}

struct LevelMetrics {
  std::string name;
  LevelDigest digest;
  Metrics metrics;
};

struct SuiteReport {
  Metrics overall;
  std::vector<LevelMetrics> per_level;
};

// `episodes` rollouts per level; episode e of level l uses seed
// slot_seed(config.seed, l * episodes + e).
inline SuiteReport evaluate_suite(const std::vector<NamedLevel>& suite, const PolicyPtr& policy_a,
                                  const PolicyPtr& policy_b, int episodes, const HarnessConfig& config) {
  require_policies(policy_a, policy_b);
  if (suite.empty()) throw std::invalid_argument("evaluation suite is empty");
  if (episodes < 1) throw std::invalid_argument("episodes per level must be at least 1");
  const auto per = static_cast<std::size_t>(episodes);
  std::vector<EpisodeStats> all(suite.size() * per);
  parallel_for(all.size(), config.threads, [&](std::size_t i) {
    all[i] = rollout(suite[i / per].level, policy_a, policy_b, config, slot_seed(config.seed, i));
  });
  SuiteReport report;
  report.overall = metrics(all);
  for (std::size_t l = 0; l < suite.size(); ++l) {
    const std::vector<EpisodeStats> mine(all.begin() + static_cast<std::ptrdiff_t>(l * per),
                                         all.begin() + static_cast<std::ptrdiff_t>((l + 1) * per));
    report.per_level.push_back({suite[l].name, level_digest(suite[l].level), metrics(mine)});
  }
  return report;
}

// Cell (i, j): policy i as agent 1 with policy j as agent 2, pooled over all
// levels and episodes.
inline std::vector<std::vector<Metrics>> crossplay_matrix(const std::vector<PolicyPtr>& policies,
                                                          const std::vector<NamedLevel>& levels, int episodes,
                                                          const HarnessConfig& config) {
  if (policies.empty()) throw std::invalid_argument("crossplay needs at least one policy");
  std::vector<std::vector<Metrics>> m(policies.size(), std::vector<Metrics>(policies.size()));
  for (std::size_t i = 0; i < policies.size(); ++i) {
    for (std::size_t j = 0; j < policies.size(); ++j) {
      m[i][j] = evaluate_suite(levels, policies[i], policies[j], episodes, config).overall;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Solvability by region analysis. Ignores time: a certificate says the items
// can reach the pot and the goal, not that it happens within the horizon.

struct Handover {
  Cell counter;
  int from_region = -1;
  int to_region = -1;

  friend bool operator==(const Handover&, const Handover&) = default;
};

struct SolvabilityCertificate {
  Cell pot;
  int load_region = -1;   // region that puts onions into the pot
  int serve_region = -1;  // region that plates the soup
  int onion_region = -1;  // region that takes onions from a pile
  int plate_region = -1;
  int goal_region = -1;
  std::vector<Handover> handovers;  // counters used, in chain order
};

struct SolvabilityReport {
  bool solvable = false;
  std::vector<int> agent_regions;  // distinct, ascending
  std::optional<SolvabilityCertificate> certificate;
};

inline SolvabilityReport solvability_check(const Level& level) {
  require_valid(level);
  const auto region = floor_regions(level);
  auto region_at = [&](Cell c) { return level.contains(c) ? region[level.index(c)] : -1; };

  std::set<int> agent_set{region_at(level.agents[0].cell), region_at(level.agents[1].cell)};
  SolvabilityReport report;
  report.agent_regions.assign(agent_set.begin(), agent_set.end());
  const auto& regs = report.agent_regions;
  const std::size_t n = regs.size();
  auto slot = [&](int r) { return static_cast<std::size_t>(std::find(regs.begin(), regs.end(), r) - regs.begin()); };

  auto touching = [&](Cell c) {
    std::vector<int> out;
    for (Direction d : kDirections) {
      const int r = region_at(c.step(d));
      if (r >= 0 && agent_set.count(r) && std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    }
    return out;
  };

  // Transfer edges through plain walls, first counter in row-major order.
  std::map<std::pair<int, int>, Cell> counter;
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level.grid[i] != Tile::Wall) continue;
    const auto rs = touching(level.cell(i));
    for (std::size_t x = 0; x < rs.size(); ++x) {
      for (std::size_t y = x + 1; y < rs.size(); ++y) {
        counter.try_emplace({std::min(rs[x], rs[y]), std::max(rs[x], rs[y])}, level.cell(i));
      }
    }
  }
  // All-pairs hop distances with parent pointers (n <= 2 in practice).
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  std::vector<std::vector<int>> parent(n, std::vector<int>(n, -1));
  for (std::size_t src = 0; src < n; ++src) {
    std::vector<std::size_t> queue{src};
    dist[src][src] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t u = queue[q];
      for (std::size_t v = 0; v < n; ++v) {
        if (dist[src][v] >= 0) continue;
        if (!counter.count({std::min(regs[u], regs[v]), std::max(regs[u], regs[v])})) continue;
        dist[src][v] = dist[src][u] + 1;
        parent[src][v] = static_cast<int>(u);
        queue.push_back(v);
      }
    }
  }
  auto chain = [&](std::size_t from, std::size_t to, std::vector<Handover>& out) {
    std::vector<std::size_t> path{to};
    while (path.back() != from) path.push_back(static_cast<std::size_t>(parent[from][path.back()]));
    std::reverse(path.begin(), path.end());
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const int a = regs[path[k]], b = regs[path[k + 1]];
      out.push_back({counter.at({std::min(a, b), std::max(a, b)}), a, b});
    }
  };

  auto access = [&](Tile t) {
    std::vector<int> out;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (level.grid[i] != t) continue;
      for (int r : touching(level.cell(i))) {
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto onion_access = access(Tile::OnionPile);
  const auto plate_access = access(Tile::PlatePile);
  const auto goal_access = access(Tile::Goal);

  // Nearest source region (fewest hops, then lowest id) that can feed `to`.
  auto best_source = [&](const std::vector<int>& sources, std::size_t to) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (int r : sources) {
      const auto s = slot(r);
      if (dist[s][to] < 0) continue;
      if (!best || dist[s][to] < dist[*best][to]) best = s;
    }
    return best;
  };

  int best_cost = -1;
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level.grid[i] != Tile::Pot) continue;
    const Cell pot = level.cell(i);
    const auto at_pot = touching(pot);
    for (int load : at_pot) {
      const auto l = slot(load);
      const auto onion_src = best_source(onion_access, l);
      if (!onion_src) continue;
      for (int serve : at_pot) {
        const auto sv = slot(serve);
        const auto plate_src = best_source(plate_access, sv);
        if (!plate_src) continue;
        // Goal: nearest goal-touching region from serve.
        std::optional<std::size_t> goal_dst;
        for (int r : goal_access) {
          const auto g = slot(r);
          if (dist[sv][g] < 0) continue;
          if (!goal_dst || dist[sv][g] < dist[sv][*goal_dst]) goal_dst = g;
        }
        if (!goal_dst) continue;
        const int cost = dist[*onion_src][l] + dist[*plate_src][sv] + dist[sv][*goal_dst];
        if (best_cost >= 0 && cost >= best_cost) continue;
        best_cost = cost;
        SolvabilityCertificate cert;
        cert.pot = pot;
        cert.load_region = load;
        cert.serve_region = serve;
        cert.onion_region = regs[*onion_src];
        cert.plate_region = regs[*plate_src];
        cert.goal_region = regs[*goal_dst];
        chain(*onion_src, l, cert.handovers);
        chain(*plate_src, sv, cert.handovers);
        chain(sv, *goal_dst, cert.handovers);
        report.certificate = std::move(cert);
      }
    }
  }
  report.solvable = report.certificate.has_value();
  return report;
}

// ---------------------------------------------------------------------------

// Linear anneal of the shaped-reward weight.
inline double shaping_coefficient(long long step, const HarnessConfig& config) {
  if (step < 0) throw std::invalid_argument("shaping step must be non-negative");
  if (config.anneal_steps <= 0) throw std::invalid_argument("anneal_steps must be positive");
  const double frac = static_cast<double>(step) / static_cast<double>(config.anneal_steps);
  return config.shaping_initial * std::max(0.0, 1.0 - frac);
}

// ---------------------------------------------------------------------------
// Throughput benchmark: random actions, in-place stepping, reset at the
// horizon. Levels come from the generator; at most kBenchLevelPool distinct
// layouts are shared across environments.

inline constexpr int kBenchLevelPool = 256;
inline const std::vector<int> kDefaultBenchEnvCounts = {1, 32, 256, 1024, 4096, 16384};

struct BenchRow {
  std::string env = "overcooked";
  int n_envs = 0;
  int steps = 0;
  double seconds = 0.0;
  double sps = 0.0;
};

inline BenchRow bench_once(int n_envs, int steps, std::uint64_t seed, unsigned threads = 0,
                           const GeneratorConfig& gen = {}) {
  if (n_envs < 1 || steps < 1) throw std::invalid_argument("bench needs n_envs >= 1 and steps >= 1");
  const int pool = std::min(n_envs, kBenchLevelPool);
  const auto levels = sample_batch(Rng(seed), gen, pool);
  std::vector<std::shared_ptr<const Kitchen>> kitchens;
  for (const auto& l : levels) kitchens.push_back(std::make_shared<const Kitchen>(l, EnvParams{}));

  std::vector<EnvState> envs;
  std::vector<std::uint64_t> action_state(static_cast<std::size_t>(n_envs));
  envs.reserve(static_cast<std::size_t>(n_envs));
  for (int i = 0; i < n_envs; ++i) {
    envs.push_back(reset(kitchens[static_cast<std::size_t>(i % pool)], slot_seed(seed, static_cast<std::size_t>(i))));
    action_state[static_cast<std::size_t>(i)] = slot_seed(seed ^ 0xbe7cULL, static_cast<std::size_t>(i));
  }

  const unsigned workers = worker_count(threads, envs.size());
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> pool_threads;
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (int t = 0; t < steps; ++t) {
      for (std::size_t i = lo; i < hi; ++i) {
        std::uint64_t& r = action_state[i];
        r = Rng::mix(r, static_cast<std::uint64_t>(t));
        const JointAction joint{kActions[r % kNumActions], kActions[(r >> 32) % kNumActions]};
        EnvState& s = envs[i];
        step_in_place(s, joint);
        if (s.done()) s = reset(s.kitchen, r);
      }
    }
  };
  if (workers <= 1) {
    work(0, envs.size());
  } else {
    for (unsigned w = 0; w < workers; ++w) {
      pool_threads.emplace_back(work, envs.size() * w / workers, envs.size() * (w + 1) / workers);
    }
    for (auto& t : pool_threads) t.join();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  BenchRow row;
  row.n_envs = n_envs;
  row.steps = steps;
  row.seconds = seconds;
  row.sps = seconds > 0.0 ? static_cast<double>(n_envs) * steps / seconds : 0.0;
  return row;
}

inline std::vector<BenchRow> throughput_bench(const std::vector<int>& env_counts = kDefaultBenchEnvCounts,
                                              int steps = 1000, std::uint64_t seed = 0, unsigned threads = 0) {
  if (env_counts.empty()) throw std::invalid_argument("bench needs at least one env count");
  std::vector<BenchRow> rows;
  for (int n : env_counts) rows.push_back(bench_once(n, steps, seed, threads));
  return rows;
}

// ---------------------------------------------------------------------------

struct Heatmap {
  int height = 0;
  int width = 0;
  std::vector<long long> counts;

  long long total() const {
    long long s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  long long at(Cell c) const { return counts[static_cast<std::size_t>(c.row * width + c.col)]; }
};

inline Heatmap visit_heatmap(const std::vector<EpisodeStats>& stats) {
  if (stats.empty()) throw std::invalid_argument("heatmap needs at least one episode");
  Heatmap h{stats[0].height, stats[0].width, std::vector<long long>(stats[0].visits.size(), 0)};
  for (const auto& s : stats) {
    if (s.height != h.height || s.width != h.width) throw std::invalid_argument("heatmap episodes differ in size");
    for (std::size_t i = 0; i < s.visits.size(); ++i) h.counts[i] += s.visits[i];
  }
  return h;
}

inline Heatmap visit_heatmap(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("heatmap needs at least one trajectory");
  const Level& first = trajectories[0].level;
  Heatmap h{first.height, first.width, std::vector<long long>(first.size(), 0)};
  for (const auto& tr : trajectories) {
    if (tr.level.height != h.height || tr.level.width != h.width) {
      throw std::invalid_argument("heatmap trajectories differ in size");
    }
    for (const auto& st : tr.steps) {
      for (const Cell& c : st.agent_pos) ++h.counts[tr.level.index(c)];
    }
  }
  return h;
}

inline std::string heatmap_csv(const Heatmap& h) {
  std::string out;
  for (int r = 0; r < h.height; ++r) {
    for (int c = 0; c < h.width; ++c) {
      if (c) out += ',';
      out += std::to_string(h.counts[static_cast<std::size_t>(r * h.width + c)]);
    }
    out += '\n';
  }
  return out;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "env,n_envs,steps,seconds,sps\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6f,%.1f\n", r.env.c_str(), r.n_envs, r.steps, r.seconds, r.sps);
    out += buf;
  }
  return out;
}

}  // namespace ogc
