#include "solab/self_opt.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "solab/dynamics.hpp"
#include "solab/errors.hpp"
#include "solab/rng.hpp"

namespace solab {

std::string_view stage_label(Stage stage) noexcept {
  switch (stage) {
    case Stage::before_learning:
      return "BL";
    case Stage::learning:
      return "L";
    case Stage::after_learning:
      return "AL";
  }
  return "?";
}

Stage parse_stage(std::string_view label) {
  if (label == "BL") return Stage::before_learning;
  if (label == "L") return Stage::learning;
  if (label == "AL") return Stage::after_learning;
  throw ConfigError("unknown stage '" + std::string(label) + "' (expected BL, L or AL)");
}

// ---------------------------------------------------------------------------
// Fingerprints

AttractorFingerprint::AttractorFingerprint(const StateVector& state)
    : n_(state.size()), words_((state.size() + 63) / 64, 0) {
  const int orient = (n_ > 0 && state[0] > 0) ? -1 : 1;
  for (std::size_t i = 0; i < n_; ++i) {
    if (state[i] * orient > 0) words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

std::string AttractorFingerprint::to_hex() const {
  std::string out;
  out.reserve(words_.size() * 16);
  char buf[17];
  for (auto w : words_) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(w));
    out += buf;
  }
  return out;
}

AttractorFingerprint AttractorFingerprint::from_hex(std::string_view hex, std::size_t n) {
  AttractorFingerprint f;
  f.n_ = n;
  const std::size_t words = (n + 63) / 64;
  if (hex.size() != words * 16) throw ConfigError("fingerprint has wrong length for N");
  f.words_.resize(words);
  for (std::size_t w = 0; w < words; ++w) {
    const char* first = hex.data() + 16 * w;
    auto [ptr, ec] = std::from_chars(first, first + 16, f.words_[w], 16);
    if (ec != std::errc{} || ptr != first + 16) throw ConfigError("malformed fingerprint");
  }
  return f;
}

std::size_t AttractorFingerprint::hash() const noexcept {
  std::uint64_t h = mix64(n_);
  for (auto w : words_) h = mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// Configuration

void SoConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (steps == 0) throw ConfigError("steps per reset must be at least 1");
  if (resets == 0) throw ConfigError("resets per stage must be at least 1");
  if (stages.empty()) throw ConfigError("at least one stage is required");
  for (std::size_t a = 0; a < stages.size(); ++a) {
    for (std::size_t b = a + 1; b < stages.size(); ++b) {
      if (stages[a] == stages[b]) throw ConfigError("stages must not repeat");
    }
  }
  const bool learns = std::find(stages.begin(), stages.end(), Stage::learning) != stages.end();
  if (learns && static_cast<double>(steps) * static_cast<double>(resets) >
                    static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    throw ConfigError("steps x resets of the learning stage overflows the pair counters");
  }
}

StageSeeds StageSeeds::from_run_seed(std::uint64_t seed) noexcept {
  return {RngStream::derive(seed, 0), RngStream::derive(seed, 1), RngStream::derive(seed, 2)};
}

std::uint64_t StageSeeds::for_stage(Stage stage) const noexcept {
  switch (stage) {
    case Stage::before_learning:
      return before_learning;
    case Stage::learning:
      return learning;
    case Stage::after_learning:
      return after_learning;
  }
  return 0;
}

bool SoRunRecord::same_outcome(const SoRunRecord& other) const noexcept {
  return stage == other.stage && reset == other.reset &&
         std::bit_cast<std::uint64_t>(energy) == std::bit_cast<std::uint64_t>(other.energy) &&
         fixed_point == other.fixed_point && fingerprint == other.fingerprint;
}

std::vector<double> SoResult::energies(Stage stage) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.stage == stage) out.push_back(r.energy);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hebbian accumulation

void hebbian_update(WeightMatrix& learned, const StateVector& state, double alpha) {
  if (state.size() != learned.size()) throw ContractError("state and weights differ in size");
  if (!(alpha >= 0.0)) throw ContractError("learning rate must be non-negative");
  if (alpha == 0.0) return;
  const std::size_t n = state.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) learned.add_pair(i, j, alpha * state[i] * state[j]);
  }
  learned.set_role(WeightRole::learned);
}

LearnedWeights::LearnedWeights(const WeightMatrix& initial, double alpha)
    : initial_(&initial), n_(initial.size()), alpha_(alpha) {}

std::span<std::int32_t> LearnedWeights::mutable_counts() {
  if (counts_.empty()) counts_.assign(n_ * n_, 0);
  return counts_;
}

void LearnedWeights::accumulate(const StateVector& state, std::int64_t repetitions) {
  if (state.size() != n_) throw ContractError("state and weights differ in size");
  if (repetitions == 0) return;
  mutable_counts();
  const auto s = state.spins();
  for (std::size_t i = 0; i < n_; ++i) {
    const auto scale = static_cast<std::int32_t>(repetitions * s[i]);
    std::int32_t* row = counts_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) row[j] += scale * s[j];
    row[i] = 0;
  }
  any_ = true;
}

WeightMatrix LearnedWeights::materialize() const {
  WeightMatrix out = *initial_;
  out.set_role(WeightRole::learned);
  if (!any_) return out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      out.set_pair(i, j, (*initial_)(i, j) + alpha_ * counts_[i * n_ + j]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fast engine

namespace {

class FastEngine {
 public:
  FastEngine(const WeightMatrix& initial, const SoConfig& config)
      : w0_(initial),
        config_(config),
        n_(initial.size()),
        learned_(initial, config.alpha),
        spins_(n_),
        start_(n_),
        field0_(n_),
        coupled_(n_),
        flips_(n_) {}

  SoRunRecord reset(Stage stage, std::size_t index, RngStream& rng) {
    const bool learning = stage == Stage::learning && config_.alpha > 0.0;
    const bool coupled = learned_.any();
    const bool use_counts = coupled || learning;
    const double alpha = config_.alpha;
    const auto n = static_cast<std::int64_t>(n_);
    const std::size_t steps = config_.steps;

    StateVector state = random_state(n_, rng);
    std::copy(state.spins().begin(), state.spins().end(), spins_.begin());
    for (std::size_t i = 0; i < n_; ++i) {
      const auto row = w0_.row(i);
      double f = 0.0;
      for (std::size_t j = 0; j < n_; ++j) f += row[j] * spins_[j];
      field0_[i] = f;
    }
    if (coupled) {
      const auto counts = learned_.counts();
      for (std::size_t i = 0; i < n_; ++i) {
        const std::int32_t* row = counts.data() + i * n_;
        std::int64_t g = 0;
        for (std::size_t j = 0; j < n_; ++j) g += static_cast<std::int64_t>(row[j]) * spins_[j];
        coupled_[i] = g;
      }
    } else {
      std::fill(coupled_.begin(), coupled_.end(), 0);
    }
    if (learning) {
      start_ = spins_;
      for (auto node : touched_) flips_[node].clear();
      touched_.clear();
    }
    pending_ = 0;

    SoRunRecord rec;
    rec.stage = stage;
    rec.reset = index;
    double e = 0.0;
    if (config_.record_traces) {
      e = energy(state, w0_);
      rec.trace.reserve(steps);
    }

    const auto counts = learned_.counts();
    for (std::size_t t = 0; t < steps; ++t) {
      const std::size_t i = rng.uniform_index(n_);
      double h = field0_[i];
      if (use_counts) h += alpha * static_cast<double>(coupled_[i] + pending_ * (n - 1) * spins_[i]);
      const int next = threshold(h);
      if (next != spins_[i]) {
        if (config_.record_traces) e += 2.0 * spins_[i] * field0_[i];
        if (pending_ != 0) flush_pending();
        spins_[i] = static_cast<Spin>(next);
        const auto row = w0_.row(i);
        const double delta = 2.0 * next;
        for (std::size_t j = 0; j < n_; ++j) field0_[j] += delta * row[j];
        if (use_counts) apply_coupled_flip(i, next, t, coupled, learning, counts);
      }
      if (learning) ++pending_;
      if (config_.record_traces) rec.trace.push_back(e);
    }

    bool fixed = true;
    for (std::size_t i = 0; i < n_ && fixed; ++i) {
      double h = field0_[i];
      if (use_counts) h += alpha * static_cast<double>(coupled_[i] + pending_ * (n - 1) * spins_[i]);
      fixed = threshold(h) == spins_[i];
    }
    if (learning) fold_reset(steps);

    std::copy(spins_.begin(), spins_.end(), state.mutable_spins().begin());
    rec.energy = energy(state, w0_);
    rec.fixed_point = fixed;
    rec.fingerprint = AttractorFingerprint(state);
    if (config_.record_states) rec.state = std::move(state);
    return rec;
  }

  WeightMatrix learned() const { return learned_.materialize(); }

 private:
  void flush_pending() {
    const std::int64_t shift = pending_ * static_cast<std::int64_t>(n_ - 1);
    for (std::size_t j = 0; j < n_; ++j) coupled_[j] += shift * spins_[j];
    pending_ = 0;
  }

  // Node m has just flipped to `next` at step t: every other coupled field
  // moves by 2 next H_jm, where H is the count matrix at the start of the
  // reset plus the pair sums of the current reset up to step t.
  void apply_coupled_flip(std::size_t m, int next, std::size_t t, bool coupled, bool learning,
                          std::span<const std::int32_t> counts) {
    const std::int64_t dn = 2 * next;
    if (coupled) {
      const std::int32_t* row = counts.data() + m * n_;
      for (std::size_t j = 0; j < n_; ++j) coupled_[j] += dn * row[j];
    }
    if (!learning) return;
    const std::int64_t run = node_sum(m, t);
    for (std::size_t j = 0; j < n_; ++j) coupled_[j] += dn * start_[j] * run;
    coupled_[m] -= dn * start_[m] * run;
    for (auto j : touched_) {
      if (j == m) continue;
      coupled_[j] += dn * (pair_sum(j, m, t) - start_[j] * run);
    }
    if (flips_[m].empty()) touched_.push_back(m);
    flips_[m].push_back(static_cast<std::uint32_t>(t));
  }

  // sum over steps t' < upto of the post-update spin of node a
  std::int64_t node_sum(std::size_t a, std::size_t upto) const {
    std::int64_t sign = start_[a];
    std::int64_t sum = 0;
    std::size_t pos = 0;
    for (auto tau : flips_[a]) {
      sum += sign * static_cast<std::int64_t>(tau - pos);
      pos = tau;
      sign = -sign;
    }
    return sum + sign * static_cast<std::int64_t>(upto - pos);
  }

  // sum over steps t' < upto of s_a(t') s_b(t')
  std::int64_t pair_sum(std::size_t a, std::size_t b, std::size_t upto) const {
    const auto& fa = flips_[a];
    const auto& fb = flips_[b];
    std::int64_t sign = start_[a] * start_[b];
    std::int64_t sum = 0;
    std::size_t pos = 0, ia = 0, ib = 0;
    while (ia < fa.size() || ib < fb.size()) {
      std::size_t tau;
      if (ib == fb.size() || (ia < fa.size() && fa[ia] < fb[ib])) {
        tau = fa[ia++];
      } else {
        tau = fb[ib++];
      }
      sum += sign * static_cast<std::int64_t>(tau - pos);
      pos = tau;
      sign = -sign;
    }
    return sum + sign * static_cast<std::int64_t>(upto - pos);
  }

  // H += sum over the reset's steps of (s(t) s(t)^T - I).
  void fold_reset(std::size_t steps) {
    std::vector<std::int64_t> run(n_);
    for (std::size_t a = 0; a < n_; ++a) run[a] = node_sum(a, steps);
    auto counts = learned_.mutable_counts();
    for (std::size_t j = 0; j < n_; ++j) {
      std::int32_t* row = counts.data() + j * n_;
      if (flips_[j].empty()) {
        const std::int64_t sj = start_[j];
        for (std::size_t k = 0; k < n_; ++k) row[k] += static_cast<std::int32_t>(sj * run[k]);
      } else {
        for (std::size_t k = 0; k < n_; ++k) {
          const std::int64_t value =
              flips_[k].empty() ? start_[k] * run[j] : pair_sum(j, k, steps);
          row[k] += static_cast<std::int32_t>(value);
        }
      }
      row[j] = 0;
    }
    learned_.mark_nonzero();
  }

  const WeightMatrix& w0_;
  const SoConfig& config_;
  std::size_t n_;
  LearnedWeights learned_;
  std::vector<Spin> spins_;
  std::vector<Spin> start_;
  std::vector<double> field0_;
  std::vector<std::int64_t> coupled_;
  std::int64_t pending_ = 0;
  std::vector<std::vector<std::uint32_t>> flips_;
  std::vector<std::size_t> touched_;
};

void check_inputs(const WeightMatrix& initial, const SoConfig& config) {
  config.validate();
  if (initial.size() == 0) throw ConfigError("initial weight matrix is empty");
  initial.validate();
}

void audit_or_throw(const SoResult& result, const WeightMatrix& initial) {
  if (!result.config.record_states) return;
  if (audit_record_energies(result, initial) != 0) {
    throw std::logic_error("recorded energies disagree with the initial weights");
  }
}

}  // namespace

SoResult run_so(const WeightMatrix& initial, const SoConfig& config, const StageSeeds& seeds) {
  check_inputs(initial, config);
  SoResult result;
  result.config = config;
  result.seeds = seeds;
  result.records.reserve(config.resets * config.stages.size());
  FastEngine engine(initial, result.config);
  for (Stage stage : config.stages) {
    RngStream rng(seeds.for_stage(stage));
    for (std::size_t r = 0; r < config.resets; ++r) {
      result.records.push_back(engine.reset(stage, r, rng));
    }
  }
  result.learned = engine.learned();
  audit_or_throw(result, initial);
  return result;
}

SoResult run_so(const WeightMatrix& initial, const SoConfig& config, std::uint64_t seed) {
  return run_so(initial, config, StageSeeds::from_run_seed(seed));
}

SoResult run_so_reference(const WeightMatrix& initial, const SoConfig& config,
                          const StageSeeds& seeds) {
  check_inputs(initial, config);
  SoResult result;
  result.config = config;
  result.seeds = seeds;
  WeightMatrix learned = initial;
  learned.set_role(WeightRole::learned);
  for (Stage stage : config.stages) {
    const bool learning = stage == Stage::learning && config.alpha > 0.0;
    RngStream rng(seeds.for_stage(stage));
    for (std::size_t r = 0; r < config.resets; ++r) {
      StateVector state = random_state(initial.size(), rng);
      SoRunRecord rec;
      rec.stage = stage;
      rec.reset = r;
      for (std::size_t t = 0; t < config.steps; ++t) {
        const std::size_t i = rng.uniform_index(initial.size());
        async_step(state, learned, {}, i);
        if (learning) hebbian_update(learned, state, config.alpha);
        if (config.record_traces) rec.trace.push_back(energy(state, initial));
      }
      rec.energy = energy(state, initial);
      rec.fixed_point = is_fixed_point(state, learned);
      rec.fingerprint = AttractorFingerprint(state);
      if (config.record_states) rec.state = std::move(state);
      result.records.push_back(std::move(rec));
    }
  }
  result.learned = std::move(learned);
  audit_or_throw(result, initial);
  return result;
}

FingerprintSet attractor_set(std::span<const SoRunRecord> records, Stage stage) {
  FingerprintSet out;
  for (const auto& r : records) {
    if (r.stage == stage && r.fixed_point) out.insert(r.fingerprint);
  }
  return out;
}

std::optional<AttractorFingerprint> dominant_attractor(std::span<const SoRunRecord> records,
                                                       Stage stage) {
  std::map<AttractorFingerprint, std::size_t> counts;
  for (const auto& r : records) {
    if (r.stage == stage && r.fixed_point) ++counts[r.fingerprint];
  }
  std::optional<AttractorFingerprint> best;
  std::size_t best_count = 0;
  for (const auto& [fp, c] : counts) {
    if (c > best_count) {
      best = fp;
      best_count = c;
    }
  }
  return best;
}

std::size_t audit_record_energies(const SoResult& result, const WeightMatrix& initial,
                                  std::size_t stride) {
  if (stride == 0) stride = 1;
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < result.records.size(); k += stride) {
    const auto& r = result.records[k];
    if (!r.state) continue;
    if (energy(*r.state, initial) != r.energy) ++mismatches;
  }
  return mismatches;
}

}  // namespace solab
