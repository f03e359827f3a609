#include "solab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "solab/errors.hpp"

namespace solab {

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stdev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

Clamped clamp_unit(double x) {
  if (x < 0.0) return {0.0, true};
  if (x > 1.0) return {1.0, true};
  return {x, false};
}

}  // namespace

BaselineFit fit_baseline(std::span<const double> energies) {
  if (energies.size() < 2) throw FitError("baseline fit needs at least two energies");
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  if (*lo == *hi) throw FitError("baseline energies have zero variance");
  BaselineFit fit;
  fit.mu = mean_of(energies);
  fit.sigma = sample_stdev(energies);
  fit.lambda = fit.sigma * fit.sigma;
  fit.sample_count = energies.size();
  fit.min = *lo;
  fit.max = *hi;
  return fit;
}

std::string_view count_shift_label(CountShift shift) noexcept {
  switch (shift) {
    case CountShift::continuity:
      return "continuity";
    case CountShift::variance:
      return "variance";
    case CountShift::sigma:
      return "sigma";
  }
  return "?";
}

CountShift parse_count_shift(std::string_view label) {
  for (auto s : {CountShift::continuity, CountShift::variance, CountShift::sigma}) {
    if (count_shift_label(s) == label) return s;
  }
  throw ConfigError("unknown count shift '" + std::string(label) + "'");
}

std::string_view appropriateness_label(AppropriatenessForm form) noexcept {
  return form == AppropriatenessForm::value_times_convergence ? "value" : "novelty";
}

AppropriatenessForm parse_appropriateness(std::string_view label) {
  if (label == "value") return AppropriatenessForm::value_times_convergence;
  if (label == "novelty") return AppropriatenessForm::novelty_times_convergence;
  throw ConfigError("unknown appropriateness form '" + std::string(label) + "'");
}

std::string_view novelty_rule_label(NoveltyRule rule) noexcept {
  switch (rule) {
    case NoveltyRule::score:
      return "score";
    case NoveltyRule::fingerprint:
      return "fingerprint";
    case NoveltyRule::energy_band:
      return "energy_band";
  }
  return "?";
}

NoveltyRule parse_novelty_rule(std::string_view label) {
  for (auto r : {NoveltyRule::score, NoveltyRule::fingerprint, NoveltyRule::energy_band}) {
    if (novelty_rule_label(r) == label) return r;
  }
  throw ConfigError("unknown novelty rule '" + std::string(label) + "'");
}

double count_offset(const BaselineFit& fit, CountShift shift) noexcept {
  switch (shift) {
    case CountShift::continuity:
      return fit.lambda - 0.5;
    case CountShift::variance:
      return fit.lambda;
    case CountShift::sigma:
      return fit.sigma;
  }
  return fit.lambda;
}

double count_of_energy(double energy, const BaselineFit& fit, CountShift shift) noexcept {
  return (energy - fit.mu) + count_offset(fit, shift);
}

double poisson_pmf(double k, double lambda) noexcept {
  if (!(k > -1.0)) return 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double poisson_tail_above(double k, double lambda) {
  if (k < 0.0) return 1.0;
  const double m = std::floor(k);
  // P(X > m) = 1 - Gamma(m + 1, lambda) / m! = regularized lower gamma P(m + 1, lambda)
  return boost::math::gamma_p(m + 1.0, lambda);
}

double novelty_of_energy(double energy, const BaselineFit& fit, const MetricOptions& options) {
  const double eta = poisson_pmf(count_of_energy(fit.mu, fit, options.shift), fit.lambda);
  const double ratio = poisson_pmf(count_of_energy(energy, fit, options.shift), fit.lambda) / eta;
  return clamp_unit(1.0 - ratio).value;
}

double value_of_energy(double energy, const BaselineFit& fit, const MetricOptions& options) {
  return clamp_unit(poisson_tail_above(count_of_energy(energy, fit, options.shift), fit.lambda))
      .value;
}

NoveltyValue aggregate_scores(std::span<const double> energies, const BaselineFit& fit,
                              const MetricOptions& options) {
  if (energies.empty()) throw ContractError("no after-learning energies to score");
  NoveltyValue out;
  for (double e : energies) {
    out.novelty += novelty_of_energy(e, fit, options);
    out.value += value_of_energy(e, fit, options);
  }
  const auto count = static_cast<double>(energies.size());
  out.novelty /= count;
  out.value /= count;
  return out;
}

Clamped convergence_score(std::span<const std::vector<double>> per_seed, const BaselineFit& fit) {
  if (per_seed.empty()) throw ContractError("no seed groups to score");
  double spread = 0.0;
  for (const auto& group : per_seed) {
    if (group.empty()) throw ContractError("empty seed group");
    spread += sample_stdev(group);
  }
  spread /= static_cast<double>(per_seed.size());
  return clamp_unit(1.0 - spread / fit.sigma);
}

double appropriateness_score(const NoveltyValue& nv, double convergence,
                             const MetricOptions& options) {
  const double base = options.appropriateness == AppropriatenessForm::value_times_convergence
                          ? nv.value
                          : nv.novelty;
  return base * convergence;
}

double above_chance(std::span<const double> energies, const BaselineFit& fit, double epsilon) {
  if (energies.empty()) throw ContractError("no energies to compare against the baseline");
  const double cut = fit.mu - epsilon;
  const auto below = std::count_if(energies.begin(), energies.end(), [&](double e) { return e < cut; });
  return static_cast<double>(below) / static_cast<double>(energies.size());
}

std::string_view regime_label(Regime regime) noexcept {
  switch (regime) {
    case Regime::not_novel_not_appropriate:
      return "NotNovelNotAppropriate";
    case Regime::novel_not_appropriate:
      return "NovelNotAppropriate";
    case Regime::appropriate_not_novel:
      return "AppropriateNotNovel";
    case Regime::novel_and_appropriate:
      return "NovelAndAppropriate";
  }
  return "?";
}

Regime parse_regime(std::string_view label) {
  for (Regime r : {Regime::not_novel_not_appropriate, Regime::novel_not_appropriate,
                   Regime::appropriate_not_novel, Regime::novel_and_appropriate}) {
    if (regime_label(r) == label) return r;
  }
  throw ConfigError("unknown regime label '" + std::string(label) + "'");
}

Regime classify_regime(const RegimeEvidence& evidence, const BaselineFit& fit,
                       const MetricOptions& options) {
  const bool appropriate =
      evidence.convergence >= options.convergence_threshold && evidence.mean_energy < fit.mu;
  bool novel = evidence.mean_energy < fit.min || evidence.mean_energy > fit.max;
  if (options.novelty == NoveltyRule::score) {
    novel = evidence.novelty >= options.novelty_threshold;
  } else if (options.novelty == NoveltyRule::fingerprint && evidence.dominant &&
             evidence.baseline_attractors != nullptr) {
    novel = !evidence.baseline_attractors->contains(*evidence.dominant);
  }
  if (novel) return appropriate ? Regime::novel_and_appropriate : Regime::novel_not_appropriate;
  return appropriate ? Regime::appropriate_not_novel : Regime::not_novel_not_appropriate;
}

CreativityScores score_alpha(const AlphaOutcomes& outcomes, const BaselineFit& fit,
                             const FingerprintSet* baseline_attractors,
                             const MetricOptions& options) {
  std::vector<double> all;
  for (const auto& group : outcomes.energies_by_seed) all.insert(all.end(), group.begin(), group.end());
  if (all.empty()) throw ContractError("no after-learning energies to score");

  CreativityScores s;
  s.alpha = outcomes.alpha;
  const NoveltyValue nv = aggregate_scores(all, fit, options);
  s.novelty = nv.novelty;
  s.value = nv.value;
  const Clamped c = convergence_score(outcomes.energies_by_seed, fit);
  s.convergence = c.value;
  s.clamp_events += c.clamped ? 1 : 0;
  s.appropriateness = appropriateness_score(nv, s.convergence, options);
  s.p_1sigma = above_chance(all, fit, fit.sigma);
  s.p_2sigma = above_chance(all, fit, 2.0 * fit.sigma);
  s.p_3sigma = above_chance(all, fit, 3.0 * fit.sigma);
  s.mean_energy = mean_of(all);
  double spread = 0.0;
  for (const auto& group : outcomes.energies_by_seed) spread += sample_stdev(group);
  s.sigma_al = spread / static_cast<double>(outcomes.energies_by_seed.size());

  RegimeEvidence ev;
  ev.novelty = s.novelty;
  ev.convergence = s.convergence;
  ev.mean_energy = s.mean_energy;
  ev.dominant = outcomes.dominant;
  ev.baseline_attractors = baseline_attractors;
  s.regime = classify_regime(ev, fit, options);
  return s;
}

std::vector<NoveltyValuePoint> baseline_curve(const BaselineFit& fit, std::size_t points,
                                              double span, const MetricOptions& options) {
  std::vector<NoveltyValuePoint> out;
  if (points < 2) points = 2;
  out.reserve(points);
  const double lo = fit.mu - span * fit.sigma;
  const double step = 2.0 * span * fit.sigma / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    const double e = lo + step * static_cast<double>(k);
    out.push_back({e, novelty_of_energy(e, fit, options), value_of_energy(e, fit, options)});
  }
  return out;
}

}  // namespace solab
