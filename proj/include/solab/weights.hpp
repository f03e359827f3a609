#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "solab/network.hpp"
#include "solab/rng.hpp"

namespace solab {

/// Block-modular couplings: magnitude 1 inside a module of k consecutive
/// nodes, magnitude p between modules, random sign per unordered pair.
struct ModularSpec {
  std::size_t n = 100;
  std::size_t k = 5;
  double p = 0.1;
  std::uint64_t seed = 0;

  std::size_t module_count() const noexcept { return k == 0 ? 0 : n / k; }
  /// Throws ConfigError on n == 0, k == 0, n % k != 0 or p outside (0, 1).
  void validate() const;
};

/// Signs are drawn for pairs (i, j), i < j, in row-major order, one bit per
/// pair from successive 64-bit words (bit set = positive).
WeightMatrix modular_weights(const ModularSpec& spec, RngStream& rng);
/// Same, with the stream seeded from spec.seed.
WeightMatrix modular_weights(const ModularSpec& spec);

struct PatternSet {
  std::vector<StateVector> patterns;

  std::size_t size() const noexcept { return patterns.size(); }
  std::size_t width() const noexcept { return patterns.empty() ? 0 : patterns.front().size(); }
};

/// Outer-product storage w_ij = sum_k z_k^i z_k^j (i != j).
WeightMatrix hebbian_store(const PatternSet& patterns);

/// Nominal storage capacity of an N-node network, 0.14 N.
constexpr double hebbian_capacity(std::size_t n) noexcept { return 0.14 * static_cast<double>(n); }

PatternSet random_patterns(std::size_t count, std::size_t n, RngStream& rng);

/// Flips exactly round(fraction * N) distinct nodes chosen uniformly.
StateVector corrupt(const StateVector& pattern, double fraction, RngStream& rng);

struct RecallReport {
  std::size_t trials = 0;
  std::size_t exact = 0;
  double rate() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(exact) / static_cast<double>(trials);
  }
};

struct RecallConfig {
  std::size_t n = 100;
  std::size_t patterns = 5;
  double corruption = 0.1;
  std::size_t trials = 200;
  /// Relaxation steps per probe; 0 selects default_steps(n).
  std::size_t steps = 0;
  std::uint64_t seed = 0;
};

/// Stores random patterns, relaxes corrupted probes, and counts probes that
/// end exactly on the pattern they were derived from.
RecallReport recall_experiment(const RecallConfig& config);

}  // namespace solab
