#include "solab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "solab/dynamics.hpp"
#include "solab/errors.hpp"

#ifndef SO_LAB_VERSION
#define SO_LAB_VERSION "0.0.0"
#endif

namespace solab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view code_version() noexcept { return SO_LAB_VERSION; }

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t alpha_index,
                          std::uint32_t seed_index, std::uint8_t stage) {
  if (alpha_index > kSharedAlpha) throw ContractError("alpha index exceeds 24 bits");
  const std::uint64_t key = (static_cast<std::uint64_t>(alpha_index) << 40) |
                            (static_cast<std::uint64_t>(seed_index) << 8) | stage;
  return RngStream::derive(master, key);
}

RngStream derive_stream(std::uint64_t master, std::uint32_t alpha_index, std::uint32_t seed_index,
                        std::uint8_t stage) {
  return RngStream(derive_seed(master, alpha_index, seed_index, stage));
}

StageSeeds derive_stage_seeds(std::uint64_t master, std::uint32_t alpha_index,
                              std::uint32_t seed_index) {
  // BL never learns, so its stream ignores alpha: every alpha of a seed
  // starts from the same before-learning records.
  return {derive_seed(master, kSharedAlpha, seed_index, 0),
          derive_seed(master, alpha_index, seed_index, 1),
          derive_seed(master, alpha_index, seed_index, 2)};
}

WeightMatrix master_weights(const ModularSpec& spec, std::uint64_t master) {
  ModularSpec s = spec;
  s.seed = derive_seed(master, kSharedAlpha, 0, kWeightStream);
  return modular_weights(s);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (count == 0) throw ConfigError("grid needs at least one point");
  if (!(lo > 0.0 && hi >= lo)) throw ConfigError("log grid needs 0 < lo <= hi");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double span = std::log(hi / lo);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo * std::exp(span * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::size_t SweepPlan::effective_steps() const noexcept {
  return steps == 0 ? default_steps(network.n) : steps;
}

void SweepPlan::validate() const {
  network.validate();
  if (alphas.empty()) throw ConfigError("alpha grid is empty");
  if (alphas.size() >= kSharedAlpha) throw ConfigError("alpha grid too large");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("learning rates must be finite and >= 0");
  }
  if (seeds == 0) throw ConfigError("need at least one seed");
  if (seeds > 0xFFFFFFFFULL) throw ConfigError("seed count exceeds 32 bits");
  if (resets == 0) throw ConfigError("need at least one reset per stage");
  if (jobs == 0) throw ConfigError("jobs must be at least 1");
  SoConfig cfg;
  cfg.steps = effective_steps();
  cfg.resets = resets;
  cfg.validate();
}

namespace {

ojson network_json(const ModularSpec& spec) {
  ojson j;
  j["n"] = spec.n;
  j["k"] = spec.k;
  j["p"] = spec.p;
  return j;
}

ModularSpec network_from_json(const nlohmann::json& j) {
  ModularSpec spec;
  spec.n = j.at("n").get<std::size_t>();
  spec.k = j.at("k").get<std::size_t>();
  spec.p = j.at("p").get<double>();
  return spec;
}

ojson metrics_json(const MetricOptions& m) {
  ojson j;
  j["shift"] = count_shift_label(m.shift);
  j["appropriateness"] = appropriateness_label(m.appropriateness);
  j["novelty_rule"] = novelty_rule_label(m.novelty);
  j["convergence_threshold"] = m.convergence_threshold;
  j["novelty_threshold"] = m.novelty_threshold;
  return j;
}

MetricOptions metrics_from_json(const nlohmann::json& j) {
  MetricOptions m;
  m.shift = parse_count_shift(j.at("shift").get<std::string>());
  m.appropriateness = parse_appropriateness(j.at("appropriateness").get<std::string>());
  m.novelty = parse_novelty_rule(j.at("novelty_rule").get<std::string>());
  m.convergence_threshold = j.at("convergence_threshold").get<double>();
  m.novelty_threshold = j.at("novelty_threshold").get<double>();
  return m;
}

ojson plan_object(const SweepPlan& plan) {
  ojson j;
  j["alphas"] = plan.alphas;
  j["seeds"] = plan.seeds;
  j["resets"] = plan.resets;
  j["steps"] = plan.effective_steps();
  j["network"] = network_json(plan.network);
  j["master_seed"] = plan.master_seed;
  j["metrics"] = metrics_json(plan.metrics);
  return j;
}

}  // namespace

std::string plan_to_json(const SweepPlan& plan) { return plan_object(plan).dump(2) + "\n"; }

SweepPlan plan_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SweepPlan plan;
    plan.alphas = j.at("alphas").get<std::vector<double>>();
    plan.seeds = j.at("seeds").get<std::size_t>();
    plan.resets = j.at("resets").get<std::size_t>();
    plan.steps = j.at("steps").get<std::size_t>();
    plan.network = network_from_json(j.at("network"));
    plan.master_seed = j.at("master_seed").get<std::uint64_t>();
    plan.metrics = metrics_from_json(j.at("metrics"));
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("sweep plan: ") + e.what());
  }
}

std::vector<EnergySample> to_samples(const SoResult& result, double alpha, std::size_t seed) {
  std::vector<EnergySample> out;
  out.reserve(result.records.size());
  for (const auto& r : result.records) {
    out.push_back({r.stage, r.stage == Stage::before_learning ? 0.0 : alpha, seed, r.reset,
                   r.energy, r.fixed_point});
  }
  return out;
}

namespace {

// ---- scoring shared by sweeps, the metrics command and effort ----

struct AlphaGroup {
  double alpha = 0.0;
  std::vector<std::vector<double>> by_seed;
  std::optional<AttractorFingerprint> dominant;
};

ScoredSamples score_groups(const std::vector<double>& bl, const std::vector<AlphaGroup>& groups,
                           const FingerprintSet* bl_attractors, const MetricOptions& options) {
  ScoredSamples out;
  out.baseline = fit_baseline(bl);
  for (int k = 0; k < 3; ++k) {
    out.baseline_above_chance[k] = above_chance(bl, out.baseline, (k + 1) * out.baseline.sigma);
  }
  for (const auto& g : groups) {
    AlphaOutcomes o{g.alpha, g.by_seed, g.dominant};
    out.scores.push_back(score_alpha(o, out.baseline, bl_attractors, options));
  }
  return out;
}

}  // namespace

ScoredSamples score_samples(const std::vector<EnergySample>& samples, const MetricOptions& options) {
  std::vector<double> bl;
  std::vector<AlphaGroup> groups;
  std::map<double, std::size_t> group_of;
  std::vector<std::map<std::size_t, std::size_t>> seed_slot;
  for (const auto& s : samples) {
    if (s.stage == Stage::before_learning) {
      bl.push_back(s.energy);
      continue;
    }
    if (s.stage != Stage::after_learning) continue;
    auto [it, fresh] = group_of.try_emplace(s.alpha, groups.size());
    if (fresh) {
      groups.push_back({s.alpha, {}, std::nullopt});
      seed_slot.emplace_back();
    }
    auto& g = groups[it->second];
    auto [slot, new_seed] = seed_slot[it->second].try_emplace(s.seed, g.by_seed.size());
    if (new_seed) g.by_seed.emplace_back();
    g.by_seed[slot->second].push_back(s.energy);
  }
  if (bl.empty()) throw FitError("no BL rows to fit the baseline on");
  if (groups.empty()) throw FitError("no AL rows to score");
  return score_groups(bl, groups, nullptr, options);
}

namespace {

// ---- sweep cells ----

struct CellKey {
  bool baseline = false;
  std::size_t alpha_index = 0;
  std::size_t seed_index = 0;
};

std::string cell_name(const CellKey& key) {
  char buf[64];
  if (key.baseline) {
    std::snprintf(buf, sizeof buf, "bl_s%06zu", key.seed_index);
  } else {
    std::snprintf(buf, sizeof buf, "a%04zu_s%06zu", key.alpha_index, key.seed_index);
  }
  return buf;
}

struct CellRecord {
  Stage stage;
  std::size_t reset;
  double energy;
  bool fixed_point;
  AttractorFingerprint fingerprint;
};

using CellRecords = std::vector<CellRecord>;

constexpr std::string_view kCellHeader = "stage,reset,final_energy,fixed_point,fingerprint";

std::string cell_csv(const CellRecords& records) {
  std::string out(kCellHeader);
  out += '\n';
  for (const auto& r : records) {
    out += stage_label(r.stage);
    out += ',';
    out += std::to_string(r.reset);
    out += ',';
    out += format_real(r.energy);
    out += r.fixed_point ? ",1," : ",0,";
    out += r.fingerprint.to_hex();
    out += '\n';
  }
  return out;
}

// nullopt when the file is absent or was cut short.
std::optional<CellRecords> read_cell(const fs::path& path, std::size_t expected, std::size_t n) {
  if (!fs::exists(path)) return std::nullopt;
  const auto table = read_csv(path);
  if (table.rows.size() != expected) return std::nullopt;
  CellRecords out;
  out.reserve(expected);
  const auto c_stage = table.column("stage");
  const auto c_reset = table.column("reset");
  const auto c_energy = table.column("final_energy");
  const auto c_fixed = table.column("fixed_point");
  const auto c_fp = table.column("fingerprint");
  for (const auto& row : table.rows) {
    CellRecord r;
    try {
      r.stage = parse_stage(row[c_stage]);
      r.fingerprint = AttractorFingerprint::from_hex(row[c_fp], n);
    } catch (const std::invalid_argument& e) {
      throw IoError(path.string() + ": " + e.what());
    }
    r.reset = parse_u64(row[c_reset], path.string());
    r.energy = parse_real(row[c_energy], path.string());
    r.fixed_point = parse_u64(row[c_fixed], path.string()) != 0;
    out.push_back(std::move(r));
  }
  return out;
}

CellRecords run_cell(const SweepPlan& plan, const WeightMatrix& w0, const CellKey& key) {
  SoConfig cfg;
  cfg.steps = plan.effective_steps();
  cfg.resets = plan.resets;
  const auto ai = key.baseline ? kSharedAlpha : static_cast<std::uint32_t>(key.alpha_index);
  const StageSeeds seeds =
      derive_stage_seeds(plan.master_seed, ai, static_cast<std::uint32_t>(key.seed_index));
  if (key.baseline) {
    cfg.alpha = 0.0;
    cfg.stages = {Stage::before_learning};
  } else {
    cfg.alpha = plan.alphas[key.alpha_index];
    cfg.stages = {Stage::learning, Stage::after_learning};
  }
  const SoResult res = run_so(w0, cfg, seeds);
  CellRecords out;
  out.reserve(res.records.size());
  for (const auto& r : res.records) {
    out.push_back({r.stage, r.reset, r.energy, r.fixed_point, r.fingerprint});
  }
  return out;
}

std::vector<CellKey> all_cells(const SweepPlan& plan) {
  std::vector<CellKey> keys;
  keys.reserve(plan.cell_count());
  for (std::size_t s = 0; s < plan.seeds; ++s) keys.push_back({true, 0, s});
  for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
    for (std::size_t s = 0; s < plan.seeds; ++s) keys.push_back({false, a, s});
  }
  return keys;
}

std::string manifest_text(const SweepPlan& plan, const std::vector<CellKey>& keys,
                          const std::vector<bool>& done) {
  ojson j;
  j["format"] = "so-lab-sweep/1";
  j["code_version"] = code_version();
  j["rng"] = RngStream::kAlgorithm;
  j["master_seed"] = plan.master_seed;
  j["plan"] = plan_object(plan);
  std::size_t count = 0;
  ojson completion = ojson::object();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    completion[cell_name(keys[i])] = static_cast<bool>(done[i]);
    count += done[i] ? 1 : 0;
  }
  j["cells_total"] = keys.size();
  j["cells_done"] = count;
  j["complete"] = count == keys.size();
  j["completion"] = std::move(completion);
  return j.dump(2) + "\n";
}

std::optional<AttractorFingerprint> most_frequent(const std::map<AttractorFingerprint, std::size_t>& counts) {
  std::optional<AttractorFingerprint> best;
  std::size_t best_count = 0;
  for (const auto& [fp, c] : counts) {  // ascending order, so ties keep the smallest
    if (c > best_count) {
      best = fp;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

SweepDataset run_sweep(const SweepPlan& plan, const SweepProgress& progress) {
  plan.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const WeightMatrix w0 = master_weights(plan.network, plan.master_seed);
  const auto keys = all_cells(plan);
  const bool persist = !plan.out_dir.empty();
  const fs::path cell_dir = plan.out_dir / "cells";

  if (persist) {
    const fs::path manifest = plan.out_dir / "manifest.json";
    if (fs::exists(manifest)) {
      const auto old = nlohmann::json::parse(read_file(manifest), nullptr, false);
      if (old.is_discarded() || !old.contains("plan") ||
          old["plan"] != nlohmann::json::parse(plan_to_json(plan))) {
        throw ConfigError(plan.out_dir.string() + " holds a different sweep; use a new directory");
      }
    }
    std::error_code ec;
    fs::create_directories(cell_dir, ec);
    if (ec) throw IoError("cannot create " + cell_dir.string() + ": " + ec.message());
  }

  std::vector<std::optional<CellRecords>> results(keys.size());
  std::vector<bool> done(keys.size(), false);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (persist) {
      const std::size_t expected = keys[i].baseline ? plan.resets : 2 * plan.resets;
      results[i] = read_cell(cell_dir / (cell_name(keys[i]) + ".csv"), expected, plan.network.n);
    }
    if (results[i]) {
      done[i] = true;
    } else {
      pending.push_back(i);
    }
  }
  if (plan.max_new_cells > 0 && pending.size() > plan.max_new_cells) {
    pending.resize(plan.max_new_cells);
  }

  std::mutex mu;
  std::size_t finished = keys.size() - std::count(done.begin(), done.end(), false);
  if (persist) write_file_atomic(plan.out_dir / "manifest.json", manifest_text(plan, keys, done));
  if (progress) progress(finished, keys.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  auto worker = [&] {
    while (!failed) {
      const std::size_t p = next.fetch_add(1);
      if (p >= pending.size()) return;
      const std::size_t i = pending[p];
      try {
        CellRecords recs = run_cell(plan, w0, keys[i]);
        if (persist) write_file_atomic(cell_dir / (cell_name(keys[i]) + ".csv"), cell_csv(recs));
        std::lock_guard lock(mu);
        results[i] = std::move(recs);
        done[i] = true;
        ++finished;
        if (persist) {
          write_file_atomic(plan.out_dir / "manifest.json", manifest_text(plan, keys, done));
        }
        if (progress) progress(finished, keys.size());
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  {
    const std::size_t width = std::min(plan.jobs, std::max<std::size_t>(pending.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < width; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  SweepDataset ds;
  ds.plan = plan;
  ds.cells_done = finished;
  ds.complete = finished == keys.size();
  if (!ds.complete) {
    ds.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ds;
  }

  // Merge in key order.
  std::vector<double> bl;
  FingerprintSet bl_attractors;
  std::vector<AlphaGroup> groups(plan.alphas.size());
  std::vector<std::map<AttractorFingerprint, std::size_t>> al_counts(plan.alphas.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& key = keys[i];
    const double alpha = key.baseline ? 0.0 : plan.alphas[key.alpha_index];
    if (!key.baseline) groups[key.alpha_index].by_seed.emplace_back();
    for (const auto& r : *results[i]) {
      ds.samples.push_back({r.stage, alpha, key.seed_index, r.reset, r.energy, r.fixed_point});
      if (r.stage == Stage::before_learning) {
        bl.push_back(r.energy);
        if (r.fixed_point) bl_attractors.insert(r.fingerprint);
      } else if (r.stage == Stage::after_learning) {
        groups[key.alpha_index].by_seed.back().push_back(r.energy);
        if (r.fixed_point) ++al_counts[key.alpha_index][r.fingerprint];
      }
    }
  }
  for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
    groups[a].alpha = plan.alphas[a];
    groups[a].dominant = most_frequent(al_counts[a]);
  }
  auto scored = score_groups(bl, groups, &bl_attractors, plan.metrics);
  ds.baseline = scored.baseline;
  ds.baseline_above_chance = scored.baseline_above_chance;
  ds.scores = std::move(scored.scores);
  ds.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (persist) {
    write_file_atomic(plan.out_dir / "runs.csv", runs_csv(ds.samples));
    write_file_atomic(plan.out_dir / "scores.csv", scores_csv(ds.scores));
    write_file_atomic(plan.out_dir / "baseline.json", baseline_json(ds.baseline));
  }
  return ds;
}

SweepDataset load_sweep(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.json";
  if (!fs::exists(manifest)) throw IoError("missing " + manifest.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest.string() + ": " + e.what());
  }
  if (!m.value("complete", false)) throw IoError(dir.string() + " holds an unfinished sweep");
  SweepDataset ds;
  ds.plan = plan_from_json(m.at("plan").dump());
  ds.plan.out_dir = dir;
  for (const char* name : {"runs.csv", "scores.csv", "baseline.json"}) {
    if (!fs::exists(dir / name)) throw IoError("missing " + (dir / name).string());
  }
  ds.samples = parse_runs_csv(read_csv(dir / "runs.csv"));
  ds.baseline = parse_baseline_json(read_file(dir / "baseline.json"));
  // Recompute the derived columns; regimes come from the file because the
  // fingerprint rule needs data that runs.csv does not carry.
  auto scored = score_samples(ds.samples, ds.plan.metrics);
  const auto stored = parse_scores_csv(read_csv(dir / "scores.csv"));
  if (stored.size() != scored.scores.size()) throw IoError("scores.csv does not match runs.csv");
  for (std::size_t i = 0; i < stored.size(); ++i) scored.scores[i].regime = stored[i].regime;
  ds.baseline_above_chance = scored.baseline_above_chance;
  ds.scores = std::move(scored.scores);
  ds.cells_done = ds.plan.cell_count();
  ds.complete = true;
  return ds;
}

// ---- effort ----

std::size_t EffortPlan::effective_steps() const noexcept {
  return steps == 0 ? default_steps(network.n) : steps;
}

void EffortPlan::validate() const {
  network.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("effort needs alpha > 0");
  if (resets.empty()) throw ConfigError("no reset budgets given");
  for (auto r : resets) {
    if (r < 2) throw ConfigError("reset budgets must be at least 2");
  }
}

EffortReport effort_tradeoff(const EffortPlan& plan) {
  plan.validate();
  const WeightMatrix w0 = master_weights(plan.network, plan.master_seed);
  const StageSeeds seeds = derive_stage_seeds(plan.master_seed, 0, plan.seed_index);
  EffortReport report;
  report.plan = plan;
  for (std::size_t budget : plan.resets) {
    SoConfig cfg;
    cfg.alpha = plan.alpha;
    cfg.steps = plan.effective_steps();
    cfg.resets = budget;
    cfg.validate();
    const SoResult res = run_so(w0, cfg, seeds);
    auto samples = to_samples(res, plan.alpha, plan.seed_index);
    auto scored = score_samples(samples, plan.metrics);
    EffortPoint pt;
    pt.resets = budget;
    pt.baseline = scored.baseline;
    pt.scores = scored.scores.front();
    pt.converged_below_mean = pt.scores.convergence >= plan.metrics.convergence_threshold &&
                              pt.scores.mean_energy < pt.baseline.mu;
    report.points.push_back(pt);
    report.samples.push_back(std::move(samples));
  }
  return report;
}

std::string effort_json(const EffortReport& report) {
  ojson j;
  j["code_version"] = code_version();
  j["alpha"] = report.plan.alpha;
  j["steps"] = report.plan.effective_steps();
  j["master_seed"] = report.plan.master_seed;
  j["seed_index"] = report.plan.seed_index;
  j["network"] = network_json(report.plan.network);
  ojson points = ojson::array();
  for (const auto& p : report.points) {
    ojson q;
    q["resets"] = p.resets;
    q["mu_BL"] = p.baseline.mu;
    q["sigma_BL"] = p.baseline.sigma;
    q["mean_AL"] = p.scores.mean_energy;
    q["sigma_AL"] = p.scores.sigma_al;
    q["convergence"] = p.scores.convergence;
    q["converged_below_mean"] = p.converged_below_mean;
    q["regime"] = regime_label(p.scores.regime);
    points.push_back(std::move(q));
  }
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

// ---- exports ----

std::string_view artifact_label(Artifact artifact) noexcept {
  switch (artifact) {
    case Artifact::energy_scatter:
      return "energy_scatter";
    case Artifact::distributions:
      return "distributions";
    case Artifact::scores_curve:
      return "scores_curve";
    case Artifact::pareto:
      return "pareto";
    case Artifact::weights_heatmap:
      return "weights_heatmap";
  }
  return "?";
}

Artifact parse_artifact(std::string_view label) {
  for (Artifact a : {Artifact::energy_scatter, Artifact::distributions, Artifact::scores_curve,
                     Artifact::pareto, Artifact::weights_heatmap}) {
    if (artifact_label(a) == label) return a;
  }
  throw ConfigError("unknown artifact '" + std::string(label) + "'");
}

namespace {

void check_run_index(const SweepDataset& ds, const ExportOptions& opt) {
  if (opt.alpha_index >= ds.plan.alphas.size()) {
    throw ConfigError("alpha index " + std::to_string(opt.alpha_index) + " outside the grid of " +
                      std::to_string(ds.plan.alphas.size()));
  }
  if (opt.seed_index >= ds.plan.seeds) {
    throw ConfigError("seed index " + std::to_string(opt.seed_index) + " outside " +
                      std::to_string(ds.plan.seeds) + " seeds");
  }
}

std::string distribution_rows(std::string_view stage, double alpha, std::vector<double> energies) {
  std::sort(energies.begin(), energies.end());
  std::string out;
  const double total = static_cast<double>(energies.size());
  for (std::size_t i = 0; i < energies.size();) {
    std::size_t j = i;
    while (j < energies.size() && energies[j] == energies[i]) ++j;
    out += stage;
    out += ',' + format_real(alpha) + ',' + format_real(energies[i]) + ',' +
           std::to_string(j - i) + ',' + format_real(static_cast<double>(j - i) / total) + '\n';
    i = j;
  }
  return out;
}

}  // namespace

std::vector<fs::path> export_artifact(const SweepDataset& ds, Artifact artifact, const fs::path& dir,
                                      const ExportOptions& opt) {
  if (!ds.complete) throw IoError("sweep is not complete; resume it before exporting");
  std::vector<fs::path> written;
  auto emit = [&](const char* name, const std::string& text) {
    write_file_atomic(dir / name, text);
    written.push_back(dir / name);
  };

  switch (artifact) {
    case Artifact::energy_scatter: {
      check_run_index(ds, opt);
      const double alpha = ds.plan.alphas[opt.alpha_index];
      const std::size_t r = ds.plan.resets;
      std::string out = "stage,reset,energy\n";
      for (const auto& s : ds.samples) {
        if (s.seed != opt.seed_index) continue;
        if (s.stage != Stage::before_learning && s.alpha != alpha) continue;
        const std::size_t global = static_cast<std::size_t>(s.stage) * r + s.reset;
        out += std::string(stage_label(s.stage)) + ',' + std::to_string(global) + ',' +
               format_real(s.energy) + '\n';
      }
      emit("energy_scatter.csv", out);
      break;
    }
    case Artifact::distributions: {
      std::vector<double> bl;
      std::map<double, std::vector<double>> al;
      for (const auto& s : ds.samples) {
        if (s.stage == Stage::before_learning) bl.push_back(s.energy);
        if (s.stage == Stage::after_learning) al[s.alpha].push_back(s.energy);
      }
      std::string out = "stage,alpha,energy,count,probability\n";
      out += distribution_rows("BL", 0.0, bl);
      for (double a : ds.plan.alphas) out += distribution_rows("AL", a, al[a]);
      emit("distributions.csv", out);
      std::string widths = "alpha,mean_energy,sigma_al,convergence,p_1sigma,p_2sigma,p_3sigma\n";
      for (const auto& s : ds.scores) {
        widths += format_real(s.alpha) + ',' + format_real(s.mean_energy) + ',' +
                  format_real(s.sigma_al) + ',' + format_real(s.convergence) + ',' +
                  format_real(s.p_1sigma) + ',' + format_real(s.p_2sigma) + ',' +
                  format_real(s.p_3sigma) + '\n';
      }
      emit("sigma_al.csv", widths);
      emit("baseline.json", baseline_json(ds.baseline));
      break;
    }
    case Artifact::scores_curve: {
      std::string out =
          "alpha,novelty,value,convergence,appropriateness,mean_energy,sigma_al,regime\n";
      for (const auto& s : ds.scores) {
        out += format_real(s.alpha) + ',' + format_real(s.novelty) + ',' + format_real(s.value) +
               ',' + format_real(s.convergence) + ',' + format_real(s.appropriateness) + ',' +
               format_real(s.mean_energy) + ',' + format_real(s.sigma_al) + ',' +
               std::string(regime_label(s.regime)) + '\n';
      }
      emit("scores_curve.csv", out);
      break;
    }
    case Artifact::pareto: {
      std::string out = "curve,parameter,novelty,value\n";
      for (const auto& p : baseline_curve(ds.baseline, opt.curve_points, 5.0, ds.plan.metrics)) {
        out += "BL," + format_real(p.parameter) + ',' + format_real(p.novelty) + ',' +
               format_real(p.value) + '\n';
      }
      for (const auto& s : ds.scores) {
        out += "AL," + format_real(s.alpha) + ',' + format_real(s.novelty) + ',' +
               format_real(s.value) + '\n';
      }
      emit("pareto.csv", out);
      break;
    }
    case Artifact::weights_heatmap: {
      check_run_index(ds, opt);
      // The learned matrix is not stored; replaying the cell reproduces it exactly.
      const WeightMatrix w0 = master_weights(ds.plan.network, ds.plan.master_seed);
      SoConfig cfg;
      cfg.alpha = ds.plan.alphas[opt.alpha_index];
      cfg.steps = ds.plan.effective_steps();
      cfg.resets = ds.plan.resets;
      cfg.stages = {Stage::learning};
      const auto res =
          run_so(w0, cfg,
                 derive_stage_seeds(ds.plan.master_seed, static_cast<std::uint32_t>(opt.alpha_index),
                                    static_cast<std::uint32_t>(opt.seed_index)));
      emit("weights_initial.csv", matrix_csv(w0));
      emit("weights_learned.csv", matrix_csv(res.learned));
      break;
    }
  }
  return written;
}

}  // namespace solab
