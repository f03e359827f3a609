#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solab/io.hpp"
#include "solab/metrics.hpp"
#include "solab/rng.hpp"
#include "solab/self_opt.hpp"
#include "solab/weights.hpp"

namespace solab {

/// Version string written into manifests.
std::string_view code_version() noexcept;

/// alpha_index value for streams that do not depend on the learning rate
/// (the shared before-learning runs and the initial weights).
inline constexpr std::uint32_t kSharedAlpha = 0xFFFFFF;
/// stage value of the stream that draws the initial weights.
inline constexpr std::uint8_t kWeightStream = 0xFF;

/// Seed for one (alpha, seed, stage) stream of a master seed. The indices are
/// packed into one 64-bit key (24 + 32 + 8 bits), so distinct tuples give
/// distinct keys, and the key is mixed with the master through a bijection.
/// Throws ContractError if alpha_index does not fit in 24 bits.
std::uint64_t derive_seed(std::uint64_t master, std::uint32_t alpha_index,
                          std::uint32_t seed_index, std::uint8_t stage);
RngStream derive_stream(std::uint64_t master, std::uint32_t alpha_index, std::uint32_t seed_index,
                        std::uint8_t stage);
StageSeeds derive_stage_seeds(std::uint64_t master, std::uint32_t alpha_index,
                              std::uint32_t seed_index);

/// Initial weights of every run under `master`: the network seed comes from
/// the master, spec.seed is ignored.
WeightMatrix master_weights(const ModularSpec& spec, std::uint64_t master);

/// `count` points log-spaced over [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct SweepPlan {
  std::vector<double> alphas = log_grid(1e-9, 1e-4, 12);
  std::size_t seeds = 25;
  std::size_t resets = 500;
  /// Steps per reset; 0 selects 10 N.
  std::size_t steps = 0;
  ModularSpec network;
  std::uint64_t master_seed = 1;
  /// Empty: keep everything in memory and write nothing.
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  MetricOptions metrics;
  /// Compute at most this many new cells, then stop with the directory
  /// resumable (0: no limit).
  std::size_t max_new_cells = 0;

  std::size_t effective_steps() const noexcept;
  /// Throws ConfigError.
  void validate() const;
  /// Cells are the shared BL runs (one per seed) and one learning run per
  /// (alpha, seed).
  std::size_t cell_count() const noexcept { return seeds * (alphas.size() + 1); }
};

/// The full plan as JSON (the manifest's plan echo) and back.
std::string plan_to_json(const SweepPlan& plan);
SweepPlan plan_from_json(std::string_view text);

struct SweepDataset {
  SweepPlan plan;
  /// BL rows (alpha 0) per seed, then per alpha and seed the L and AL rows.
  std::vector<EnergySample> samples;
  BaselineFit baseline;
  /// BL energies against their own fit at 1, 2 and 3 sigma.
  std::array<double, 3> baseline_above_chance{};
  std::vector<CreativityScores> scores;
  std::size_t cells_done = 0;
  bool complete = false;
  double wall_seconds = 0.0;
};

/// Progress callback: (cells finished, cells total).
using SweepProgress = std::function<void(std::size_t, std::size_t)>;

/// Runs every cell of the plan. With an output directory each finished cell
/// is written under cells/ as it completes and existing cells are reused, so
/// an interrupted sweep resumes where it stopped; when all cells exist the
/// merged runs.csv, scores.csv, baseline.json and manifest.json are written.
/// Results are merged in key order, so `jobs` never changes the output.
SweepDataset run_sweep(const SweepPlan& plan, const SweepProgress& progress = {});

/// Reads a finished sweep directory back.
SweepDataset load_sweep(const std::filesystem::path& dir);

/// Baseline and per-alpha scores from runs.csv rows: BL rows are pooled, AL
/// rows are grouped by alpha (first-appearance order) and seed.
struct ScoredSamples {
  BaselineFit baseline;
  std::array<double, 3> baseline_above_chance{};
  std::vector<CreativityScores> scores;
};
ScoredSamples score_samples(const std::vector<EnergySample>& samples,
                            const MetricOptions& options = {});

struct EffortPlan {
  ModularSpec network;
  double alpha = 3e-8;
  std::vector<std::size_t> resets = {1000, 17000};
  std::size_t steps = 0;
  std::uint64_t master_seed = 1;
  std::uint32_t seed_index = 0;
  MetricOptions metrics;

  std::size_t effective_steps() const noexcept;
  void validate() const;
};

struct EffortPoint {
  std::size_t resets = 0;
  BaselineFit baseline;
  CreativityScores scores;
  /// c >= threshold and mean AL energy below mu_BL.
  bool converged_below_mean = false;
};

struct EffortReport {
  EffortPlan plan;
  std::vector<EffortPoint> points;
  /// Records of every budget, in plan order.
  std::vector<std::vector<EnergySample>> samples;
};

/// One long SO run per reset budget, all from the same stage seeds.
EffortReport effort_tradeoff(const EffortPlan& plan);
std::string effort_json(const EffortReport& report);

enum class Artifact { energy_scatter, distributions, scores_curve, pareto, weights_heatmap };
std::string_view artifact_label(Artifact artifact) noexcept;
Artifact parse_artifact(std::string_view label);

struct ExportOptions {
  /// Run shown by energy_scatter and weights_heatmap.
  std::size_t alpha_index = 0;
  std::size_t seed_index = 0;
  /// Points of the baseline curve in the pareto export.
  std::size_t curve_points = 201;
};

/// Writes one figure family into `dir` and returns the files written.
std::vector<std::filesystem::path> export_artifact(const SweepDataset& dataset, Artifact artifact,
                                                   const std::filesystem::path& dir,
                                                   const ExportOptions& options = {});

/// Records of one SO run as runs.csv rows.
std::vector<EnergySample> to_samples(const SoResult& result, double alpha, std::size_t seed);

}  // namespace solab
