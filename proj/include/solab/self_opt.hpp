#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "solab/network.hpp"

namespace solab {

enum class Stage : std::uint8_t { before_learning = 0, learning = 1, after_learning = 2 };

/// "BL", "L", "AL".
std::string_view stage_label(Stage stage) noexcept;
/// Inverse of stage_label; throws ConfigError on anything else.
Stage parse_stage(std::string_view label);

/// A fixed point up to global sign: stored as whichever of s, -s is
/// lexicographically smaller with -1 < +1 (that is, the one with s_0 = -1),
/// packed one bit per node (set = +1).
class AttractorFingerprint {
 public:
  AttractorFingerprint() = default;
  explicit AttractorFingerprint(const StateVector& state);

  std::size_t size() const noexcept { return n_; }
  std::string to_hex() const;
  static AttractorFingerprint from_hex(std::string_view hex, std::size_t n);
  std::size_t hash() const noexcept;

  friend bool operator==(const AttractorFingerprint&, const AttractorFingerprint&) = default;
  friend auto operator<=>(const AttractorFingerprint&, const AttractorFingerprint&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct FingerprintHash {
  std::size_t operator()(const AttractorFingerprint& f) const noexcept { return f.hash(); }
};
using FingerprintSet = std::unordered_set<AttractorFingerprint, FingerprintHash>;

struct SoConfig {
  double alpha = 5e-7;
  std::size_t steps = 1000;
  std::size_t resets = 1000;
  std::vector<Stage> stages = {Stage::before_learning, Stage::learning, Stage::after_learning};
  /// Keep each reset's final state (and audit a sample of record energies).
  bool record_states = false;
  /// Keep the per-step energy (w.r.t. the initial weights) of every reset.
  bool record_traces = false;

  /// Throws ConfigError on alpha < 0, zero steps/resets, empty or repeated stages.
  void validate() const;
};

/// One independent stream seed per stage.
struct StageSeeds {
  std::uint64_t before_learning = 0;
  std::uint64_t learning = 0;
  std::uint64_t after_learning = 0;

  static StageSeeds from_run_seed(std::uint64_t seed) noexcept;
  std::uint64_t for_stage(Stage stage) const noexcept;
  friend bool operator==(const StageSeeds&, const StageSeeds&) = default;
};

struct SoRunRecord {
  Stage stage = Stage::before_learning;
  std::size_t reset = 0;
  /// Energy under the initial weights W0, never the learned ones.
  double energy = 0.0;
  /// Whether the final state is a fixed point of the learned dynamics.
  bool fixed_point = false;
  AttractorFingerprint fingerprint;
  std::optional<StateVector> state;
  std::vector<double> trace;

  /// Compares the outcome fields (stage, reset, energy bits, flag, fingerprint).
  bool same_outcome(const SoRunRecord& other) const noexcept;
};

struct SoResult {
  std::vector<SoRunRecord> records;
  WeightMatrix learned;
  SoConfig config;
  StageSeeds seeds;

  std::vector<double> energies(Stage stage) const;
};

/// Adds alpha * s_i s_j to every off-diagonal entry.
void hebbian_update(WeightMatrix& learned, const StateVector& state, double alpha);

/// Learned couplings kept as W0 + alpha * H with integer pair counts H.
///
/// Repeated Hebbian increments with an unchanged state collapse into one
/// rank-1 count update, which is exact in integer arithmetic.
class LearnedWeights {
 public:
  LearnedWeights(const WeightMatrix& initial, double alpha);

  std::size_t size() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }
  /// H += repetitions * (s s^T - I)
  void accumulate(const StateVector& state, std::int64_t repetitions = 1);
  std::int32_t count(std::size_t i, std::size_t j) const noexcept { return counts_[i * n_ + j]; }
  std::span<const std::int32_t> counts() const noexcept { return counts_; }
  /// Allocates the N x N counters on first use.
  std::span<std::int32_t> mutable_counts();
  bool any() const noexcept { return any_; }
  void mark_nonzero() noexcept { any_ = true; }

  WeightMatrix materialize() const;

 private:
  const WeightMatrix* initial_;
  std::size_t n_;
  double alpha_;
  std::vector<std::int32_t> counts_;
  bool any_ = false;
};

/// Repeated relax-and-reset with Hebbian learning in the Learning stage.
///
/// Each reset draws a uniform bipolar state, then performs `steps`
/// asynchronous updates under the learned couplings (zero bias). In the
/// Learning stage every update is followed by one Hebbian increment with the
/// post-update state. W_L starts at W0 and carries over between resets and
/// stages; BL and AL keep it frozen.
///
/// Local fields are maintained incrementally. Between flips the state is
/// constant, so successive increments only shift field_i by alpha (N-1) s_i
/// and are counted rather than applied; the pending rank-1 block of each reset
/// is folded into the count matrix once, at the end of the reset.
SoResult run_so(const WeightMatrix& initial, const SoConfig& config, const StageSeeds& seeds);
SoResult run_so(const WeightMatrix& initial, const SoConfig& config, std::uint64_t seed);

/// Literal O(N^2)-per-step implementation: fields summed from a dense learned
/// matrix that receives every increment elementwise. Same random draws as run_so.
SoResult run_so_reference(const WeightMatrix& initial, const SoConfig& config,
                          const StageSeeds& seeds);

/// Fingerprints of fixed-point finals of one stage.
FingerprintSet attractor_set(std::span<const SoRunRecord> records, Stage stage);

/// Most frequent fixed-point fingerprint of a stage (ties: smallest fingerprint).
std::optional<AttractorFingerprint> dominant_attractor(std::span<const SoRunRecord> records,
                                                       Stage stage);

/// Recomputes energy(state, W0) for every `stride`-th record that carries a
/// state and returns how many disagree with the stored energy.
std::size_t audit_record_energies(const SoResult& result, const WeightMatrix& initial,
                                  std::size_t stride = 100);

}  // namespace solab
