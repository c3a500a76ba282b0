#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ogc/ogc.hpp"

namespace ogc::cli {

using nlohmann::json;

// Input problems (bad flags, missing seed, malformed files) exit with 2;
// everything else that goes wrong exits with 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Canvas {
  int height = kCanvasHeight;
  int width = kCanvasWidth;
};

inline Canvas parse_canvas(const std::string& text) {
  const auto x = text.find('x');
  Canvas c;
  try {
    std::size_t used = 0;
    if (x == std::string::npos) throw std::invalid_argument("no x");
    c.height = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("trailing");
    c.width = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("--canvas must look like HxW, got '" + text + "'");
  }
  if (c.height < 3 || c.width < 3) throw UsageError("--canvas must be at least 3x3");
  return c;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument("bad");
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("expected a comma-separated list of positive integers, got '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty integer list");
  return out;
}

struct Globals {
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string canvas = "6x9";
  std::string out;
  std::string format;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Overcooked level design, curriculum and evaluation toolkit", "ogc"};
    app.require_subcommand(1);
    auto* seed_opt = app.add_option("--seed", g_.seed, "RNG seed; required by every stochastic subcommand");
    app.add_option("--canvas", g_.canvas, "canvas size HxW")->capture_default_str();
    app.add_option("--out", g_.out, "write the main artifact to this path instead of stdout");
    app.add_option("--format", g_.format, "ascii|jsonl|json|csv (subcommand-dependent)");

    std::function<void()> action;
    add_generate(app, action);
    add_mutate(app, action);
    add_design(app, action);
    add_rollout(app, action);
    add_eval(app, action);
    add_curriculum(app, action);
    add_solve(app, action);
    add_heatmap(app, action);
    add_bench(app, action);
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      return fail("usage", e.what(), 2);
    }
    g_.has_seed = seed_opt->count() > 0;

    try {
      action();
    } catch (const UsageError& e) {
      return fail("usage", e.what(), 2);
    } catch (const PolicyNameError& e) {
      return fail("policy", e.what(), 2);
    } catch (const io::FormatError& e) {
      return fail("format", e.what(), 2);
    } catch (const LevelError& e) {
      return fail("level", e.what(), 2);
    } catch (const std::exception& e) {
      return fail("runtime", e.what(), 1);
    }
    return 0;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  Globals g_;

  int fail(const std::string& kind, const std::string& message, int code) {
    err_ << json{{"error", kind}, {"message", message}}.dump() << "\n";
    return code;
  }

  std::uint64_t seed() const {
    if (!g_.has_seed) throw UsageError("this subcommand is stochastic and needs an explicit --seed");
    return g_.seed;
  }
  Canvas canvas() const { return parse_canvas(g_.canvas); }

  std::string format_or(const std::string& fallback, std::initializer_list<const char*> allowed) const {
    const std::string f = g_.format.empty() ? fallback : g_.format;
    for (const char* a : allowed) {
      if (f == a) return f;
    }
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw UsageError("--format '" + f + "' not supported here (choose " + list + ")");
  }

  void emit(const std::string& text) const {
    if (g_.out.empty()) {
      out_ << text;
    } else {
      io::write_file(g_.out, text);
    }
  }

  static std::string pretty(const json& j) { return j.dump(2) + "\n"; }

  // -------------------------------------------------------------------------

  void add_generate(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("generate", "sample random levels (walls, 1-2 of each station, two agents)");
    auto count = std::make_shared<int>(1);
    auto max_walls = std::make_shared<int>(15);
    sub->add_option("--count", *count, "number of levels")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--max-walls", *max_walls, "upper end of the interior wall range")
        ->check(CLI::Range(0, 15))
        ->capture_default_str();
    sub->callback([this, &action, count, max_walls] {
      action = [this, count, max_walls] {
        const auto fmt = format_or("jsonl", {"jsonl", "ascii"});
        GeneratorConfig cfg;
        cfg.canvas_h = canvas().height;
        cfg.canvas_w = canvas().width;
        cfg.max_walls = *max_walls;
        const auto levels = sample_batch(Rng(seed()), cfg, *count);
        emit(fmt == "ascii" ? io::levels_ascii(levels) : io::levels_jsonl(levels));
      };
    });
  }

  void add_mutate(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("mutate", "apply N random edits to each level in a file");
    auto in = std::make_shared<std::string>();
    auto n_ops = std::make_shared<int>(20);
    sub->add_option("--in", *in, "level file (ASCII or JSONL)")->required();
    sub->add_option("--n-ops", *n_ops, "edits per level")->check(CLI::NonNegativeNumber)->capture_default_str();
    sub->callback([this, &action, in, n_ops] {
      action = [this, in, n_ops] {
        format_or("jsonl", {"jsonl"});
        const auto levels = io::load_levels(*in);
        const Rng root(seed());
        std::string text;
        for (std::size_t i = 0; i < levels.size(); ++i) {
          Rng rng = root.split(i);
          const auto result = mutate_logged(levels[i], *n_ops, rng);
          json ops = json::array();
          for (const auto& op : result.ops) ops.push_back(io::op_to_json(op));
          text += json{{"parent_digest", level_digest(levels[i]).hex()},
                       {"level", io::level_to_json(result.level)},
                       {"digest", level_digest(result.level).hex()},
                       {"ops", ops},
                       {"skipped", result.skipped}}
                      .dump() +
                  "\n";
        }
        emit(text);
      };
    });
  }

  void add_design(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("design", "run a teacher design episode");
    auto teacher = std::make_shared<std::string>("random");
    auto count = std::make_shared<int>(1);
    sub->add_option("--teacher", *teacher, "teacher policy (random)")
        ->check(CLI::IsMember({"random"}))
        ->capture_default_str();
    sub->add_option("--count", *count, "number of episodes")->check(CLI::PositiveNumber)->capture_default_str();
    sub->callback([this, &action, teacher, count] {
      action = [this, count] {
        format_or("jsonl", {"jsonl"});
        TeacherConfig cfg;
        cfg.height = canvas().height;
        cfg.width = canvas().width;
        const Rng root(seed());
        std::string text;
        for (int i = 0; i < *count; ++i) {
          const auto ep = random_teacher_episode(root.split(static_cast<std::uint64_t>(i)), cfg);
          text += json{{"level", io::level_to_json(ep.level)},
                       {"digest", level_digest(ep.level).hex()},
                       {"actions", ep.actions}}
                      .dump() +
                  "\n";
        }
        emit(text);
      };
    });
  }

  void add_rollout(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("rollout", "play one episode on a level");
    auto level = std::make_shared<std::string>();
    auto a = std::make_shared<std::string>("greedy");
    auto b = std::make_shared<std::string>("greedy");
    auto horizon = std::make_shared<int>(400);
    auto trace = std::make_shared<std::string>();
    sub->add_option("--level", *level, "level file, or builtin:<name>")->required();
    sub->add_option("--policy-a", *a, "stay | random:<seed> | greedy")->capture_default_str();
    sub->add_option("--policy-b", *b, "stay | random:<seed> | greedy")->capture_default_str();
    sub->add_option("--horizon", *horizon, "episode length")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--trace", *trace, "write the trajectory JSONL here");
    sub->callback([this, &action, level, a, b, horizon, trace] {
      action = [this, level, a, b, horizon, trace] {
        format_or("json", {"json"});
        const Level lv = load_one(*level);
        HarnessConfig hc;
        hc.horizon = *horizon;
        Trajectory tr;
        const auto pa = make_policy(*a);
        const auto pb = make_policy(*b);
        const auto stats = rollout(lv, pa, pb, hc, seed(), trace->empty() ? nullptr : &tr);
        if (!trace->empty()) io::write_file(*trace, io::trajectory_jsonl(tr));
        json j = io::stats_to_json(stats);
        j["policy_a"] = pa->name();
        j["policy_b"] = pb->name();
        j["seed"] = std::to_string(seed());
        emit(pretty(j));
      };
    });
  }

  Level load_one(const std::string& spec) const {
    if (spec.rfind("builtin:", 0) == 0) {
      const auto c = canvas();
      return pad(builtin_level(spec.substr(8)), std::max(c.height, 0), std::max(c.width, 0));
    }
    const auto levels = io::load_levels(spec);
    if (levels.size() != 1) throw UsageError("'" + spec + "' holds " + std::to_string(levels.size()) + " levels, expected 1");
    return levels[0];
  }

  std::vector<NamedLevel> load_suite(const std::string& suite) const {
    const auto c = canvas();
    if (suite == "builtin5") return builtin_eval_suite(c.height, c.width);
    if (suite == "symmetry24") {
      SymmetrySuiteParams p;
      p.canvas_h = c.height;
      p.canvas_w = c.width;
      return symmetry_suite(p);
    }
    namespace fs = std::filesystem;
    if (!fs::is_directory(suite)) {
      throw UsageError("--suite must be builtin5, symmetry24 or a directory of level files");
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(suite)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<NamedLevel> out;
    for (const auto& f : files) {
      const auto levels = io::load_levels(f.string());
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const std::string name = f.stem().string() + (levels.size() > 1 ? "#" + std::to_string(i) : "");
        out.push_back({name, levels[i]});
      }
    }
    if (out.empty()) throw UsageError("no level files in '" + suite + "'");
    return out;
  }

  void add_eval(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("eval", "evaluate a policy pair on a level suite");
    auto suite = std::make_shared<std::string>("builtin5");
    auto a = std::make_shared<std::string>("greedy");
    auto b = std::make_shared<std::string>("greedy");
    auto episodes = std::make_shared<int>(1);
    auto horizon = std::make_shared<int>(400);
    sub->add_option("--suite", *suite, "builtin5 | symmetry24 | DIR")->capture_default_str();
    sub->add_option("--policy-a", *a, "stay | random:<seed> | greedy")->capture_default_str();
    sub->add_option("--policy-b", *b, "stay | random:<seed> | greedy")->capture_default_str();
    sub->add_option("--episodes", *episodes, "episodes per level")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--horizon", *horizon, "episode length")->check(CLI::PositiveNumber)->capture_default_str();
    sub->callback([this, &action, suite, a, b, episodes, horizon] {
      action = [this, suite, a, b, episodes, horizon] {
        format_or("json", {"json"});
        HarnessConfig hc;
        hc.horizon = *horizon;
        hc.seed = seed();
        const auto levels = load_suite(*suite);
        const auto pa = make_policy(*a);
        const auto pb = make_policy(*b);
        json j = io::suite_to_json(evaluate_suite(levels, pa, pb, *episodes, hc));
        j["suite"] = *suite;
        j["policy_a"] = pa->name();
        j["policy_b"] = pb->name();
        emit(pretty(j));
      };
    });
  }

  void add_curriculum(CLI::App& app, std::function<void()>& action);

  void add_solve(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("solve", "region-based solvability verdict with certificate");
    auto level = std::make_shared<std::string>();
    sub->add_option("--level", *level, "level file (every level in it is checked), or builtin:<name>")->required();
    sub->callback([this, &action, level] {
      action = [this, level] {
        const auto fmt = format_or("jsonl", {"jsonl", "json"});
        std::vector<Level> levels;
        if (level->rfind("builtin:", 0) == 0) {
          levels.push_back(load_one(*level));
        } else {
          levels = io::load_levels(*level);
        }
        std::string text;
        for (const auto& lv : levels) {
          json j = io::certificate_to_json(solvability_check(lv));
          j["digest"] = level_digest(lv).hex();
          text += (fmt == "json" ? j.dump(2) : j.dump()) + "\n";
        }
        emit(text);
      };
    });
  }

  void add_heatmap(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("heatmap", "cell visit counts from trajectory files, as CSV");
    auto files = std::make_shared<std::vector<std::string>>();
    sub->add_option("--traj", *files, "trajectory JSONL file(s) written by rollout --trace")->required();
    sub->callback([this, &action, files] {
      action = [this, files] {
        format_or("csv", {"csv"});
        std::vector<Trajectory> trs;
        for (const auto& f : *files) trs.push_back(io::parse_trajectory(io::read_file(f)));
        emit(heatmap_csv(visit_heatmap(trs)));
      };
    });
  }

  void add_bench(CLI::App& app, std::function<void()>& action) {
    auto* sub = app.add_subcommand("bench", "random-action stepping throughput per parallel env count");
    auto envs = std::make_shared<std::string>("1,32,256,1024,4096,16384");
    auto steps = std::make_shared<int>(1000);
    auto threads = std::make_shared<unsigned>(0);
    sub->add_option("--envs", *envs, "comma-separated env counts")->capture_default_str();
    sub->add_option("--steps", *steps, "steps per env")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--threads", *threads, "worker threads, 0 = all cores")->capture_default_str();
    sub->callback([this, &action, envs, steps, threads] {
      action = [this, envs, steps, threads] {
        format_or("csv", {"csv"});
        emit(bench_csv(throughput_bench(parse_int_list(*envs), *steps, seed(), *threads)));
      };
    });
  }
};

// ---------------------------------------------------------------------------
// Simulated curriculum. Scripted agents stand in for learners, so this
// exercises the decide / generate-or-replay / evaluate / score / insert loop;
// it does not train anything.

struct CurriculumRunConfig {
  std::string method = "accel";
  int iters = 50;
  int batch = 4;
  std::string evaluator = "greedy";
  int horizon = 400;
  std::size_t capacity = 4000;
  int checkpoint_every = 0;
  std::string checkpoint;
};

// Value estimates for MaxMC: discounted return-to-go of the evaluating rollout.
inline std::vector<double> return_to_go(const Trajectory& tr, double gamma) {
  std::vector<double> v(tr.steps.size());
  double acc = 0.0;
  for (std::size_t i = tr.steps.size(); i-- > 0;) {
    acc = tr.steps[i].reward + gamma * acc;
    v[i] = acc;
  }
  return v;
}

inline Evaluator scripted_evaluator(PolicyPtr a, PolicyPtr b, HarnessConfig hc, std::uint64_t seed, long* counter) {
  return [a, b, hc, seed, counter](const Level& level) {
    Trajectory tr;
    const auto stats = rollout(level, a, b, hc, slot_seed(seed, static_cast<std::size_t>((*counter)++)), &tr);
    EpisodeSummary ep;
    ep.digest = stats.digest;
    ep.shared_return = stats.shared_return;
    ep.agent_returns = {stats.shared_return, stats.shared_return};
    ep.values = return_to_go(tr, hc.gamma);
    return ep;
  };
}

inline json run_curriculum(const CurriculumRunConfig& rc, std::uint64_t seed, Canvas canvas,
                           std::string* checkpoint_text = nullptr,
                           const std::function<void(const std::string&)>& on_checkpoint = {}) {
  const std::string& m = rc.method;
  PlrConfig cfg;
  if (m == "dr") {
    cfg = PlrConfig::domain_randomisation();
  } else if (m == "plr") {
    cfg = PlrConfig::plr(false);
  } else if (m == "robust-plr") {
    cfg = PlrConfig::plr(true);
  } else if (m == "accel") {
    cfg = PlrConfig::accel_preset();
  } else if (m != "paired") {
    throw UsageError("unknown curriculum method '" + m + "'");
  }
  if (m != "dr") cfg.capacity = rc.capacity;
  cfg.check();

  HarnessConfig hc;
  hc.horizon = rc.horizon;
  GeneratorConfig gen;
  gen.canvas_h = canvas.height;
  gen.canvas_w = canvas.width;

  const Rng root(seed);
  long episodes = 0;
  long eval_counter = 0;
  const auto student = make_policy(rc.evaluator);
  const Evaluator evaluate = scripted_evaluator(student, student, hc, Rng::mix(seed, 0xe7a1ULL), &eval_counter);
  MaxReturnTable table;
  LevelBuffer buffer(cfg.capacity);
  json log = json::array();
  std::map<std::string, long> outcomes;
  double score_sum = 0.0;
  long scored = 0;
  long solved = 0;

  if (m == "paired") {
    // Two scripted students of different skill; regret is the teacher's score.
    const PolicyPtr weak = make_policy("random:" + std::to_string(Rng::mix(seed, 0x57ULL) & 0xffffffffULL));
    TeacherConfig tc;
    tc.height = canvas.height;
    tc.width = canvas.width;
    for (int it = 0; it < rc.iters; ++it) {
      const auto design = random_teacher_episode(root.split(static_cast<std::uint64_t>(it)), tc);
      const auto s1 = rollout(design.level, student, student, hc, slot_seed(seed, static_cast<std::size_t>(2 * it)));
      const auto s2 = rollout(design.level, weak, weak, hc, slot_seed(seed, static_cast<std::size_t>(2 * it + 1)));
      const double regret = relative_regret({s1.shared_return, s2.shared_return});
      score_sum += regret;
      ++scored;
      solved += s1.solved ? 1 : 0;
      ++episodes;
      log.push_back({{"iter", it}, {"digest", s1.digest.hex()}, {"regret", regret}, {"deliveries", s1.deliveries}});
    }
    return {{"method", m},         {"iters", rc.iters},        {"episodes", episodes},
            {"mean_score", scored ? score_sum / scored : 0.0}, {"solved_rate", episodes ? double(solved) / episodes : 0.0},
            {"log", log}};
  }

  for (int it = 0; it < rc.iters; ++it) {
    Rng iter_rng = root.split(static_cast<std::uint64_t>(it));
    const auto decisions = decide_batch(buffer, cfg, iter_rng.split(0), rc.batch);
    Rng work = iter_rng.split(1);
    bool replayed = false;
    json slots = json::array();
    for (const auto& d : decisions) {
      ++episodes;
      Level level;
      if (d.source == LevelSource::Replay) {
        level = sample_from_buffer(buffer, cfg, episodes, work).level;
        replayed = true;
      } else {
        level = sample_level(work, gen);
      }
      EpisodeSummary ep = evaluate(level);
      const double score = score_episode(ep, table, cfg.clamp_maxmc);
      const auto outcome = insert_or_update(buffer, level, score, episodes, cfg);
      ++outcomes[insert_outcome_name(outcome)];
      score_sum += score;
      ++scored;
      solved += is_solved(static_cast<int>(std::lround(ep.shared_return / hc.env.delivery_reward))) ? 1 : 0;
      slots.push_back({{"source", d.source == LevelSource::Replay ? "replay" : "generate"},
                       {"update_policy", d.update_policy},
                       {"digest", ep.digest.hex()},
                       {"score", score},
                       {"outcome", insert_outcome_name(outcome)}});
    }
    json entry{{"iter", it}, {"slots", slots}, {"buffer_size", buffer.size()}};
    if (cfg.accel && replayed && !buffer.empty()) {
      json children = json::array();
      for (const auto& c : accel_edit_cycle(buffer, cfg, episodes, work, evaluate, table)) {
        ++outcomes[std::string("edit_") + insert_outcome_name(c.outcome)];
        children.push_back({{"parent", c.parent.hex()},
                            {"child", c.child.hex()},
                            {"score", c.score},
                            {"outcome", insert_outcome_name(c.outcome)},
                            {"ops", c.ops_applied}});
      }
      entry["edits"] = children;
    }
    log.push_back(entry);
    if (rc.checkpoint_every > 0 && (it + 1) % rc.checkpoint_every == 0 && on_checkpoint) {
      on_checkpoint(io::buffer_checkpoint(buffer));
    }
  }
  if (checkpoint_text) *checkpoint_text = io::buffer_checkpoint(buffer);
  return {{"method", m},
          {"iters", rc.iters},
          {"episodes", episodes},
          {"buffer_size", buffer.size()},
          {"buffer_capacity", buffer.capacity()},
          {"mean_score", scored ? score_sum / scored : 0.0},
          {"solved_rate", episodes ? double(solved) / episodes : 0.0},
          {"outcomes", outcomes},
          {"log", log}};
}

inline void Runner::add_curriculum(CLI::App& app, std::function<void()>& action) {
  auto* sub = app.add_subcommand("curriculum", "simulated curriculum loop with scripted students");
  auto rc = std::make_shared<CurriculumRunConfig>();
  sub->add_option("--method", rc->method, "dr | plr | robust-plr | accel | paired")
      ->check(CLI::IsMember({"dr", "plr", "robust-plr", "accel", "paired"}))
      ->capture_default_str();
  sub->add_option("--iters", rc->iters, "iterations")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--batch", rc->batch, "parallel slots per iteration")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--evaluator", rc->evaluator, "student policy: greedy | stay | random:<seed>")->capture_default_str();
  sub->add_option("--horizon", rc->horizon, "episode length")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--capacity", rc->capacity, "replay buffer capacity")->capture_default_str();
  sub->add_option("--checkpoint", rc->checkpoint, "write buffer checkpoints (JSONL) here");
  sub->add_option("--checkpoint-every", rc->checkpoint_every, "iterations between checkpoints, 0 = only at the end")
      ->capture_default_str();
  sub->callback([this, &action, rc] {
    action = [this, rc] {
      format_or("json", {"json"});
      std::string final_checkpoint;
      auto write = [rc](const std::string& text) {
        if (!rc->checkpoint.empty()) io::write_file(rc->checkpoint, text);
      };
      const json result = run_curriculum(*rc, seed(), canvas(), &final_checkpoint, write);
      write(final_checkpoint);
      emit(pretty(result));
    };
  });
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace ogc::cli
