#include "solab/weights.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "solab/dynamics.hpp"
#include "solab/errors.hpp"

namespace solab {

void ModularSpec::validate() const {
  if (n == 0) throw ConfigError("network size must be positive");
  if (k == 0) throw ConfigError("module size must be positive");
  if (n % k != 0) {
    throw ConfigError("module size k=" + std::to_string(k) + " does not divide N=" +
                      std::to_string(n));
  }
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("inter-module strength p must lie in (0, 1)");
}

WeightMatrix modular_weights(const ModularSpec& spec, RngStream& rng) {
  spec.validate();
  WeightMatrix w(spec.n, WeightRole::initial);
  std::uint64_t word = 0;
  unsigned used = 64;
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = i + 1; j < spec.n; ++j) {
      if (used == 64) {
        word = rng.next_u64();
        used = 0;
      }
      const bool positive = (word >> used++) & 1U;
      const double magnitude = (i / spec.k == j / spec.k) ? 1.0 : spec.p;
      w.set_pair(i, j, positive ? magnitude : -magnitude);
    }
  }
  return w;
}

WeightMatrix modular_weights(const ModularSpec& spec) {
  RngStream rng(spec.seed);
  return modular_weights(spec, rng);
}

WeightMatrix hebbian_store(const PatternSet& patterns) {
  if (patterns.patterns.empty()) throw ConfigError("pattern set is empty");
  const std::size_t n = patterns.width();
  for (const auto& z : patterns.patterns) {
    if (z.size() != n) throw ConfigError("patterns differ in length");
  }
  std::vector<long> sums(n * n, 0);
  for (const auto& z : patterns.patterns) {
    const auto s = z.spins();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) sums[i * n + j] += s[i] * s[j];
    }
  }
  WeightMatrix w(n, WeightRole::learned);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) w.set_pair(i, j, static_cast<double>(sums[i * n + j]));
  }
  return w;
}

PatternSet random_patterns(std::size_t count, std::size_t n, RngStream& rng) {
  PatternSet set;
  set.patterns.reserve(count);
  for (std::size_t k = 0; k < count; ++k) set.patterns.push_back(random_state(n, rng));
  return set;
}

StateVector corrupt(const StateVector& pattern, double fraction, RngStream& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("corruption fraction must be in [0, 1]");
  const std::size_t n = pattern.size();
  const auto flips = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  StateVector probe = pattern;
  // Partial Fisher-Yates: the first `flips` slots become a uniform subset.
  for (std::size_t k = 0; k < flips; ++k) {
    const std::size_t pick = k + rng.uniform_index(n - k);
    std::swap(order[k], order[pick]);
    probe.flip(order[k]);
  }
  return probe;
}

RecallReport recall_experiment(const RecallConfig& config) {
  if (config.n == 0) throw ConfigError("network size must be positive");
  if (config.patterns == 0) throw ConfigError("need at least one pattern");
  if (config.trials == 0) throw ConfigError("need at least one trial");
  RngStream root(config.seed);
  RngStream pattern_rng = root.split(1);
  RngStream probe_rng = root.split(2);

  const PatternSet set = random_patterns(config.patterns, config.n, pattern_rng);
  const WeightMatrix w = hebbian_store(set);
  const std::size_t steps = config.steps == 0 ? default_steps(config.n) : config.steps;

  RecallReport report;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const StateVector& target = set.patterns[t % set.size()];
    StateVector probe = corrupt(target, config.corruption, probe_rng);
    const RelaxResult out = relax(std::move(probe), w, {}, steps, probe_rng);
    ++report.trials;
    if (out.state == target) ++report.exact;
  }
  return report;
}

}  // namespace solab
