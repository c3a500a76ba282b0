// Generate a level, check it, and let two greedy cooks play it and the
// bundled Cramped Room.
#include <iostream>

#include "ogc/ogc.hpp"

int main() {
  using namespace ogc;

  Rng rng(2024);
  const Level level = sample_level(rng);
  std::cout << render_ascii(level) << "digest " << level_digest(level).hex() << "\n";

  const auto verdict = solvability_check(level);
  std::cout << "solvable: " << (verdict.solvable ? "yes" : "no") << "\n";

  HarnessConfig config;
  const auto cook = greedy_policy();
  for (const auto& [name, lv] : {NamedLevel{"generated", level}, NamedLevel{"cramped_room", builtin_level("cramped_room")}}) {
    const auto stats = rollout(lv, cook, cook, config, 7);
    std::cout << name << ": deliveries " << stats.deliveries << ", return " << stats.shared_return
              << (stats.solved ? " (solved)" : "") << "\n";
  }
  return 0;
}
