#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "solab/self_opt.hpp"

namespace solab {

/// Before-learning energy statistics and the shifted-Poisson model built on
/// them: E ~ mu + (X - lambda) with X ~ Poisson(lambda), lambda = sigma^2.
struct BaselineFit {
  double mu = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  std::size_t sample_count = 0;
  double min = 0.0;
  double max = 0.0;
};

/// Sample mean, standard deviation (n - 1 denominator) and range.
/// Throws FitError with fewer than two distinct values.
BaselineFit fit_baseline(std::span<const double> energies);

/// How an energy is mapped onto the Poisson count axis, k(E) = E - mu + offset.
enum class CountShift {
  /// offset = lambda - 1/2: the mean lands halfway between the two integer
  /// counts around the Poisson median, so v(mu) ~ 0.5 and eta is the peak of
  /// the gamma-generalized pmf.
  continuity,
  /// offset = lambda
  variance,
  /// offset = sigma, the literal printed form
  sigma,
};

/// How classify_regime decides whether learning produced something new.
enum class NoveltyRule {
  /// Mean novelty n(alpha) at or above MetricOptions::novelty_threshold.
  score,
  /// Dominant attractor absent from the baseline set (energy band without fingerprints).
  fingerprint,
  /// Mean after-learning energy outside the baseline range [min, max].
  energy_band,
};

/// Which score multiplies convergence to form appropriateness.
enum class AppropriatenessForm { value_times_convergence, novelty_times_convergence };

struct MetricOptions {
  CountShift shift = CountShift::continuity;
  AppropriatenessForm appropriateness = AppropriatenessForm::value_times_convergence;
  NoveltyRule novelty = NoveltyRule::score;
  /// Convergence required for an outcome to count as appropriate.
  double convergence_threshold = 0.9;
  /// n(alpha) needed to count as novel under NoveltyRule::score.
  double novelty_threshold = 0.5;
};

/// "continuity" / "variance" / "sigma", "value" / "novelty", "score" /
/// "fingerprint" / "energy_band". Parsers throw ConfigError.
std::string_view count_shift_label(CountShift shift) noexcept;
CountShift parse_count_shift(std::string_view label);
std::string_view appropriateness_label(AppropriatenessForm form) noexcept;
AppropriatenessForm parse_appropriateness(std::string_view label);
std::string_view novelty_rule_label(NoveltyRule rule) noexcept;
NoveltyRule parse_novelty_rule(std::string_view label);

double count_offset(const BaselineFit& fit, CountShift shift) noexcept;
double count_of_energy(double energy, const BaselineFit& fit, CountShift shift) noexcept;

/// lambda^k e^-lambda / Gamma(k + 1) for real k > -1; zero otherwise.
double poisson_pmf(double k, double lambda) noexcept;
/// P(X > floor(k)) for X ~ Poisson(lambda); 1 for k < 0.
double poisson_tail_above(double k, double lambda);

/// 1 - pmf(k(E)) / pmf(k(mu)), clamped to [0, 1].
double novelty_of_energy(double energy, const BaselineFit& fit, const MetricOptions& options = {});
/// P(X > floor(k(E))): the share of baseline outcomes the energy beats.
double value_of_energy(double energy, const BaselineFit& fit, const MetricOptions& options = {});

/// A clamped score and whether clamping changed it.
struct Clamped {
  double value = 0.0;
  bool clamped = false;
};

struct NoveltyValue {
  double novelty = 0.0;
  double value = 0.0;
};

/// Mean novelty and value over after-learning energies; throws on empty input.
NoveltyValue aggregate_scores(std::span<const double> energies, const BaselineFit& fit,
                              const MetricOptions& options = {});

/// 1 - mean(per-seed stdev) / sigma_BL, clamped to [0, 1]. Groups with a
/// single sample contribute zero spread; throws on an empty group.
Clamped convergence_score(std::span<const std::vector<double>> per_seed, const BaselineFit& fit);

double appropriateness_score(const NoveltyValue& nv, double convergence,
                             const MetricOptions& options = {});

/// Fraction of energies strictly below mu - epsilon; throws on empty input.
double above_chance(std::span<const double> energies, const BaselineFit& fit, double epsilon);

enum class Regime {
  not_novel_not_appropriate,
  novel_not_appropriate,
  appropriate_not_novel,
  novel_and_appropriate,
};

std::string_view regime_label(Regime regime) noexcept;
Regime parse_regime(std::string_view label);

struct RegimeEvidence {
  double novelty = 0.0;
  double convergence = 0.0;
  double mean_energy = 0.0;
  /// Most frequent after-learning attractor, when fingerprints are known.
  std::optional<AttractorFingerprint> dominant;
  /// Attractors reached before learning; null when fingerprints are unknown.
  const FingerprintSet* baseline_attractors = nullptr;
};

/// appropriate: convergence >= threshold and mean energy below mu.
/// novel, by options.novelty:
///   score        n(alpha) >= options.novelty_threshold
///   fingerprint  dominant attractor not in the baseline set; falls back to
///                energy_band when either side is missing
///   energy_band  mean energy outside [min, max]
Regime classify_regime(const RegimeEvidence& evidence, const BaselineFit& fit,
                       const MetricOptions& options = {});

struct CreativityScores {
  double alpha = 0.0;
  double novelty = 0.0;
  double value = 0.0;
  double convergence = 0.0;
  double appropriateness = 0.0;
  /// Fractions below mu - 1, 2, 3 sigma.
  double p_1sigma = 0.0;
  double p_2sigma = 0.0;
  double p_3sigma = 0.0;
  double mean_energy = 0.0;
  double sigma_al = 0.0;
  Regime regime = Regime::not_novel_not_appropriate;
  std::size_t clamp_events = 0;
};

/// After-learning outcomes of one learning rate, grouped by seed.
struct AlphaOutcomes {
  double alpha = 0.0;
  std::vector<std::vector<double>> energies_by_seed;
  std::optional<AttractorFingerprint> dominant;
};

CreativityScores score_alpha(const AlphaOutcomes& outcomes, const BaselineFit& fit,
                             const FingerprintSet* baseline_attractors,
                             const MetricOptions& options = {});

struct NoveltyValuePoint {
  double parameter = 0.0;
  double novelty = 0.0;
  double value = 0.0;
};

/// Novelty and value traced over energies in [mu - span*sigma, mu + span*sigma].
std::vector<NoveltyValuePoint> baseline_curve(const BaselineFit& fit, std::size_t points = 201,
                                              double span = 5.0, const MetricOptions& options = {});

}  // namespace solab
