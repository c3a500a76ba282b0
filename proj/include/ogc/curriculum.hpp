#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ogc/level.hpp"
#include "ogc/mutator.hpp"
#include "ogc/rng.hpp"

namespace ogc {

struct AccelConfig {
  int n_mutations = 20;
  int subsample = 4;
};

struct PlrConfig {
  std::size_t capacity = 4000;
  double replay_prob = 0.5;
  double staleness_coef = 0.3;
  double temperature = 0.1;
  bool rank_prioritization = true;
  double min_fill_ratio = 0.5;
  bool force_unique = true;
  bool robust = true;
  bool clamp_maxmc = false;
  std::optional<AccelConfig> accel;

  void check() const {
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!unit(replay_prob) || !unit(staleness_coef) || !unit(min_fill_ratio)) {
      throw std::invalid_argument("PLR probabilities must lie in [0, 1]");
    }
    if (!(temperature > 0.0)) throw std::invalid_argument("PLR temperature must be positive");
  }

  static PlrConfig domain_randomisation() {
    PlrConfig c;
    c.capacity = 0;
    c.replay_prob = 0.0;
    c.robust = false;
    return c;
  }
  static PlrConfig plr(bool robust = true) {
    PlrConfig c;
    c.robust = robust;
    return c;
  }
  static PlrConfig accel_preset() {
    PlrConfig c;
    c.replay_prob = 0.8;
    c.accel = AccelConfig{};
    return c;
  }
};

struct LevelBufferEntry {
  Level level;
  LevelDigest digest;
  double score = 0.0;
  long last_sampled_episode = 0;
  long insert_episode = 0;
};

// Bounded set of levels keyed by digest. Single writer.
class LevelBuffer {
 public:
  explicit LevelBuffer(std::size_t capacity = 4000) : capacity_(capacity) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  double fill_ratio() const {
    return capacity_ == 0 ? 0.0 : static_cast<double>(entries_.size()) / static_cast<double>(capacity_);
  }

  const std::vector<LevelBufferEntry>& entries() const { return entries_; }
  LevelBufferEntry& entry(std::size_t i) { return entries_[i]; }
  const LevelBufferEntry& entry(std::size_t i) const { return entries_[i]; }

  std::optional<std::size_t> find(LevelDigest d) const {
    auto it = index_.find(d.value);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Raw insertion without capacity or uniqueness checks; used by reload.
  void push(LevelBufferEntry e) {
    index_.try_emplace(e.digest.value, entries_.size());
    ++copies_[e.digest.value];
    entries_.push_back(std::move(e));
  }

  void erase(std::size_t i) {
    const std::uint64_t gone = entries_[i].digest.value;
    const std::size_t last = entries_.size() - 1;
    if (i != last) {
      const std::uint64_t moved = entries_[last].digest.value;
      entries_[i] = std::move(entries_[last]);
      if (index_[moved] == last) index_[moved] = i;
    }
    entries_.pop_back();
    if (--copies_[gone] == 0) {
      copies_.erase(gone);
      index_.erase(gone);
    } else if (auto it = index_.find(gone); it != index_.end() && (it->second == i || it->second >= entries_.size())) {
      // The indexed copy was removed; point at a surviving duplicate.
      for (std::size_t j = 0; j < entries_.size(); ++j) {
        if (entries_[j].digest.value == gone) {
          it->second = j;
          break;
        }
      }
    }
  }

 private:
  std::size_t capacity_;
  std::vector<LevelBufferEntry> entries_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::unordered_map<std::uint64_t, int> copies_;
};

// ---------------------------------------------------------------------------
// Scores

struct EpisodeSummary {
  LevelDigest digest;
  std::vector<double> agent_returns;
  double shared_return = 0.0;
  std::vector<double> values;  // per-step value estimates of the evaluating policy
  double max_known_return = 0.0;
};

class CurriculumError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mean over steps of (max known return - value estimate). Signed unless
// `clamp` is set, in which case negative terms count as zero.
inline double maxmc_score(const EpisodeSummary& ep, bool clamp = false) {
  if (ep.values.empty()) throw CurriculumError("maxmc_score needs at least one value estimate");
  double total = 0.0;
  for (double v : ep.values) {
    const double gap = ep.max_known_return - v;
    total += clamp ? std::max(0.0, gap) : gap;
  }
  return total / static_cast<double>(ep.values.size());
}

// Best student's return minus the mean of the remaining students.
inline double relative_regret(const std::vector<double>& returns) {
  if (returns.size() < 2) throw CurriculumError("relative_regret needs at least two student returns");
  const auto best = std::max_element(returns.begin(), returns.end());
  const double rest = std::accumulate(returns.begin(), returns.end(), 0.0) - *best;
  return *best - rest / static_cast<double>(returns.size() - 1);
}

// Running maximum return per level, seeded with the first observation.
class MaxReturnTable {
 public:
  double observe(LevelDigest d, double ret) {
    auto [it, inserted] = max_.try_emplace(d.value, ret);
    if (!inserted) it->second = std::max(it->second, ret);
    return it->second;
  }
  std::optional<double> get(LevelDigest d) const {
    auto it = max_.find(d.value);
    if (it == max_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::uint64_t, double> max_;
};

// ---------------------------------------------------------------------------
// Replay decisions

enum class LevelSource : std::uint8_t { Replay, Generate };

struct Decision {
  LevelSource source = LevelSource::Generate;
  bool update_policy = true;
};

inline Decision decide_source(const LevelBuffer& buffer, const PlrConfig& config, Rng& rng) {
  const bool gate_open = config.capacity > 0 && !buffer.empty() && buffer.fill_ratio() >= config.min_fill_ratio;
  if (gate_open && rng.uniform() < config.replay_prob) return {LevelSource::Replay, true};
  return {LevelSource::Generate, !config.robust};
}

// Decisions for B parallel slots, slot i drawing from rng.split(i).
inline std::vector<Decision> decide_batch(const LevelBuffer& buffer, const PlrConfig& config, const Rng& rng,
                                          int slots) {
  std::vector<Decision> out;
  for (int i = 0; i < slots; ++i) {
    Rng slot = rng.split(static_cast<std::uint64_t>(i));
    out.push_back(decide_source(buffer, config, slot));
  }
  return out;
}

// Indices ordered best first: higher score, then older insertion, then lower index.
inline std::vector<std::size_t> rank_order(const LevelBuffer& buffer) {
  std::vector<std::size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = buffer.entry(a);
    const auto& eb = buffer.entry(b);
    if (ea.score != eb.score) return ea.score > eb.score;
    return ea.insert_episode < eb.insert_episode;
  });
  return order;
}

inline void normalize(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total > 0.0) {
    for (auto& x : w) x /= total;
  } else {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
  }
}

// P = (1 - c) * normalize(score weights) + c * normalize(staleness), with
// rank weights (1/rank)^(1/temperature).
inline std::vector<double> replay_distribution(const LevelBuffer& buffer, const PlrConfig& config,
                                               long episode_counter) {
  const std::size_t n = buffer.size();
  if (n == 0) throw CurriculumError("replay distribution of an empty buffer");
  std::vector<double> score_w(n, 0.0);
  if (config.rank_prioritization) {
    const auto order = rank_order(buffer);
    for (std::size_t rank = 0; rank < n; ++rank) {
      score_w[order[rank]] = std::pow(1.0 / static_cast<double>(rank + 1), 1.0 / config.temperature);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      score_w[i] = std::pow(std::max(0.0, buffer.entry(i).score), 1.0 / config.temperature);
    }
  }
  normalize(score_w);

  std::vector<double> stale(n);
  for (std::size_t i = 0; i < n; ++i) {
    stale[i] = static_cast<double>(std::max(0L, episode_counter - buffer.entry(i).last_sampled_episode));
  }
  normalize(stale);

  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = (1.0 - config.staleness_coef) * score_w[i] + config.staleness_coef * stale[i];
  }
  return p;
}

inline std::size_t sample_index(const std::vector<double>& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Rounding left u above the final partial sum: take the last positive entry.
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return i;
  }
  return p.size() - 1;
}

inline LevelBufferEntry sample_from_buffer(LevelBuffer& buffer, const PlrConfig& config, long episode_counter,
                                           Rng& rng) {
  if (buffer.empty()) throw CurriculumError("sample_from_buffer on an empty buffer");
  const auto p = replay_distribution(buffer, config, episode_counter);
  auto& entry = buffer.entry(sample_index(p, rng));
  entry.last_sampled_episode = episode_counter;
  return entry;
}

enum class InsertOutcome : std::uint8_t { Inserted, Updated, Replaced, Rejected };

inline const char* insert_outcome_name(InsertOutcome o) {
  switch (o) {
    case InsertOutcome::Inserted: return "inserted";
    case InsertOutcome::Updated: return "updated";
    case InsertOutcome::Replaced: return "replaced";
    case InsertOutcome::Rejected: return "rejected";
  }
  return "?";
}

inline InsertOutcome insert_or_update(LevelBuffer& buffer, const Level& level, double score, long episode_counter,
                                      const PlrConfig& config = {}) {
  if (!std::isfinite(score)) throw CurriculumError("buffer scores must be finite");
  if (buffer.capacity() == 0) return InsertOutcome::Rejected;
  const LevelDigest digest = level_digest(level);
  if (config.force_unique) {
    if (auto i = buffer.find(digest)) {
      auto& e = buffer.entry(*i);
      e.score = score;
      e.last_sampled_episode = episode_counter;
      return InsertOutcome::Updated;
    }
  }
  LevelBufferEntry fresh{level, digest, score, episode_counter, episode_counter};
  if (buffer.size() < buffer.capacity()) {
    buffer.push(std::move(fresh));
    return InsertOutcome::Inserted;
  }
  std::size_t worst = 0;
  for (std::size_t i = 1; i < buffer.size(); ++i) {
    const auto& e = buffer.entry(i);
    const auto& w = buffer.entry(worst);
    if (e.score < w.score || (e.score == w.score && e.insert_episode < w.insert_episode)) worst = i;
  }
  if (!(score > buffer.entry(worst).score)) return InsertOutcome::Rejected;
  buffer.erase(worst);
  buffer.push(std::move(fresh));
  return InsertOutcome::Replaced;
}

// ---------------------------------------------------------------------------
// ACCEL editing

using Evaluator = std::function<EpisodeSummary(const Level&)>;

// Fills in max_known_return from the table and returns the MaxMC score.
inline double score_episode(EpisodeSummary& ep, MaxReturnTable& table, bool clamp = false) {
  ep.max_known_return = table.observe(ep.digest, ep.shared_return);
  return maxmc_score(ep, clamp);
}

struct ChildReport {
  LevelDigest parent;
  LevelDigest child;
  double score = 0.0;
  InsertOutcome outcome = InsertOutcome::Rejected;
  bool update_policy = false;
  int ops_applied = 0;
};

// Replays `batch_size` levels, mutates the `subsample` best of them and
// scores and inserts each child. Children are never trained on directly.
inline std::vector<ChildReport> accel_edit_cycle(LevelBuffer& buffer, const PlrConfig& config, long episode_counter,
                                                 Rng& rng, const Evaluator& evaluator, MaxReturnTable& table,
                                                 int batch_size = 0) {
  if (buffer.empty()) throw CurriculumError("accel_edit_cycle on an empty buffer");
  if (!evaluator) throw CurriculumError("accel_edit_cycle needs an evaluator");
  const AccelConfig accel = config.accel.value_or(AccelConfig{});
  if (batch_size <= 0) batch_size = accel.subsample;

  std::vector<LevelBufferEntry> batch;
  for (int i = 0; i < batch_size; ++i) batch.push_back(sample_from_buffer(buffer, config, episode_counter, rng));
  std::stable_sort(batch.begin(), batch.end(), [](const LevelBufferEntry& a, const LevelBufferEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.insert_episode < b.insert_episode;
  });
  batch.resize(std::min<std::size_t>(batch.size(), static_cast<std::size_t>(accel.subsample)));

  std::vector<ChildReport> reports;
  for (const auto& parent : batch) {
    auto edit = mutate_logged(parent.level, accel.n_mutations, rng);
    EpisodeSummary ep = evaluator(edit.level);
    ep.digest = level_digest(edit.level);
    const double score = score_episode(ep, table, config.clamp_maxmc);
    ChildReport r;
    r.parent = parent.digest;
    r.child = ep.digest;
    r.score = score;
    r.outcome = insert_or_update(buffer, edit.level, score, episode_counter, config);
    r.update_policy = !config.robust;
    r.ops_applied = static_cast<int>(edit.ops.size());
    reports.push_back(r);
  }
  return reports;
}

}  // namespace ogc
