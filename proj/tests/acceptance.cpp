// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
//   so_lab_acceptance            run everything
//   so_lab_acceptance NAME...    run the named checks only
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "solab/dynamics.hpp"
#include "solab/experiment.hpp"
#include "solab/io.hpp"
#include "solab/metrics.hpp"
#include "solab/self_opt.hpp"
#include "solab/tsp.hpp"
#include "solab/weights.hpp"

using namespace solab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[768];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Weights and biases are multiples of 1/16, so every energy here is exact
// and descent can be checked without a tolerance.
WeightMatrix dyadic_weights(std::size_t n, RngStream& rng) {
  WeightMatrix w(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      w.set_pair(i, j, (static_cast<double>(rng.uniform_index(129)) - 64.0) / 16.0);
  return w;
}

BiasVector dyadic_bias(std::size_t n, RngStream& rng) {
  BiasVector b(n);
  for (auto& x : b) x = (static_cast<double>(rng.uniform_index(33)) - 16.0) / 16.0;
  return b;
}

double naive_energy(const StateVector& s, const WeightMatrix& w, const BiasVector& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) e -= 0.5 * w(i, j) * s[i] * s[j];
    if (!b.empty()) e -= b[i] * s[i];
  }
  return e;
}

Outcome energy_descent() {
  RngStream rng(0xD35C);
  std::size_t violations = 0, steps_checked = 0, mismatched = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 5 + rng.uniform_index(46);
    const WeightMatrix w = dyadic_weights(n, rng);
    const BiasVector b = inst % 2 ? dyadic_bias(n, rng) : BiasVector{};
    const StateVector start = random_state(n, rng);
    const std::size_t steps = 10 * n;
    RngStream walk(rng.next_u64());
    RngStream whole = walk;

    // one update per call, energy recomputed from scratch after each
    StateVector s = start;
    std::vector<double> energies;
    double prev = naive_energy(s, w, b);
    for (std::size_t t = 0; t < steps; ++t) {
      s = relax(std::move(s), w, b, 1, walk).state;
      const double e = naive_energy(s, w, b);
      if (e > prev) ++violations;
      energies.push_back(e);
      prev = e;
      ++steps_checked;
    }
    // the library's own trace of the same draws must agree
    const RelaxResult full = relax(start, w, b, steps, whole, true);
    if (full.state != s || full.trace != energies) ++mismatched;
  }
  return {violations == 0 && mismatched == 0,
          fmt("1000 instances, %zu steps, %zu increases, %zu trace mismatches", steps_checked,
              violations, mismatched)};
}

Outcome local_minimum() {
  RngStream rng(0x10CA1);
  std::size_t endpoints = 0, not_local = 0, below_global = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 4 + rng.uniform_index(9);  // 4..12
    const WeightMatrix w = dyadic_weights(n, rng);
    const BiasVector b = inst % 2 ? dyadic_bias(n, rng) : BiasVector{};

    double global = INFINITY;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      StateVector s(n);
      for (std::size_t i = 0; i < n; ++i) s.set(i, (mask >> i) & 1 ? 1 : -1);
      global = std::min(global, naive_energy(s, w, b));
    }

    for (int start = 0; start < 20; ++start) {
      const RelaxResult out = relax(random_state(n, rng), w, b, 50 * n, rng);
      const double e = naive_energy(out.state, w, b);
      ++endpoints;
      for (std::size_t i = 0; i < n; ++i) {
        StateVector f = out.state;
        f.flip(i);
        if (naive_energy(f, w, b) < e) {
          ++not_local;
          break;
        }
      }
      if (e < global) ++below_global;
    }
  }
  return {not_local == 0 && below_global == 0,
          fmt("50 instances, %zu endpoints, %zu not single-flip minima, %zu below the "
              "enumerated minimum",
              endpoints, not_local, below_global)};
}

Outcome recall() {
  RecallConfig low{100, 5, 0.1, 200, 0, 2024};
  RecallConfig high = low;
  high.patterns = 30;
  const double a = recall_experiment(low).rate();
  const double b = recall_experiment(high).rate();
  return {a >= 0.95 && b < 0.80, fmt("M=5: %.3f (need >= 0.95), M=30: %.3f (need < 0.80)", a, b)};
}

SweepPlan fig5_plan(std::uint64_t master, std::vector<double> alphas) {
  SweepPlan plan;
  plan.alphas = std::move(alphas);
  // regimes are judged on the per-alpha aggregate over five seeds
  plan.seeds = 5;
  plan.resets = 1000;
  plan.steps = 1000;
  plan.network = {100, 5, 0.1, 0};
  plan.master_seed = master;
  return plan;
}

Outcome four_regimes() {
  const std::vector<double> alphas = {3e-8,   1e-7, 1.5e-7, 2e-7,   3e-7, 4e-7,   5e-7,
                                      7e-7,   1e-6, 1.5e-6, 2e-6,   3e-6, 5e-6,   7e-6,
                                      1e-5,   5e-5};
  int passed = 0;
  std::string per_seed;
  for (std::uint64_t master = 1; master <= 10; ++master) {
    const SweepDataset d = run_sweep(fig5_plan(master, alphas));
    bool low = false, na = false, an = false, high = false;
    for (const auto& s : d.scores) {
      if (s.alpha == 3e-8) low = s.regime == Regime::not_novel_not_appropriate;
      if (s.alpha >= 1e-7 && s.alpha <= 1e-6 && s.regime == Regime::novel_and_appropriate)
        na = true;
      if (s.alpha >= 1e-6 && s.alpha <= 1e-5 && s.regime == Regime::appropriate_not_novel)
        an = true;
      if (s.alpha == 5e-5) high = s.regime == Regime::novel_not_appropriate;
    }
    const bool ok = low && na && an && high;
    passed += ok;
    per_seed += fmt(" %llu:%d%d%d%d", static_cast<unsigned long long>(master), low, na, an, high);
  }
  return {passed >= 7, fmt("%d/10 master seeds show all four regimes (need 7);%s", passed,
                           per_seed.c_str())};
}

Outcome above_chance_check() {
  SweepPlan plan;  // 12 alphas over [1e-9, 1e-4], 25 seeds, 500 resets
  plan.network = {100, 5, 0.1, 0};
  plan.steps = 1000;
  plan.master_seed = 1;
  const SweepDataset d = run_sweep(plan);
  const auto best = std::max_element(
      d.scores.begin(), d.scores.end(),
      [](const CreativityScores& a, const CreativityScores& b) { return a.p_3sigma < b.p_3sigma; });
  const auto& bl = d.baseline_above_chance;  // 1, 2, 3 sigma
  const bool bl_ok = std::abs(bl[2] - 0.001) <= 0.05 && std::abs(bl[1] - 0.018) <= 0.05 &&
                     std::abs(bl[0] - 0.155) <= 0.05;
  const bool al_ok = best->p_1sigma >= 0.90 && best->p_3sigma >= 0.40;
  return {al_ok && bl_ok,
          fmt("best alpha %g: p1=%.3f (need >= 0.90) p3=%.3f (need >= 0.40); BL mu=%.2f "
              "sigma=%.2f, self p3/p2/p1 = %.4f/%.4f/%.4f (need +-0.05 of 0.001/0.018/0.155)",
              best->alpha, best->p_1sigma, best->p_3sigma, d.baseline.mu, d.baseline.sigma, bl[2],
              bl[1], bl[0])};
}

// P(X > k) for X ~ Poisson(lambda) by direct summation of the pmf.
long double poisson_tail_oracle(int k, long double lambda) {
  long double term = std::exp(-lambda), below = 0.0L;
  for (int j = 0; j <= k; ++j) {
    below += term;
    term *= lambda / (j + 1);
  }
  if (k < lambda) return 1.0L - below;
  long double above = 0.0L;  // term is pmf(k + 1) here
  for (int j = k + 1; j < k + 2000; ++j) {
    above += term;
    term *= lambda / (j + 1);
  }
  return above;
}

Outcome metric_math() {
  double worst = 0.0;
  for (double lambda : {9.0, 49.0, 100.0}) {
    BaselineFit fit{0.0, std::sqrt(lambda), lambda, 1000, -100.0, 100.0};
    for (int k = 0; k <= 200; ++k) {
      const double expect = static_cast<double>(poisson_tail_oracle(k, lambda));
      // k(E) = E - mu + lambda - 1/2 lands at k + 1/4 here
      const double energy = k - lambda + 0.75;
      worst = std::max(worst, std::abs(value_of_energy(energy, fit) - expect));
      worst = std::max(worst, std::abs(poisson_tail_above(k, lambda) - expect));
    }
  }
  const BaselineFit fit49{-127.2, 7.0, 49.0, 1000, -150.0, -100.0};
  const double n_mu = novelty_of_energy(fit49.mu, fit49);
  const double v_mu = value_of_energy(fit49.mu, fit49);
  return {worst <= 1e-10 && n_mu == 0.0 && v_mu >= 0.47 && v_mu <= 0.53,
          fmt("max |v - summed tail| = %.2e (need <= 1e-10), n(mu) = %g, v(mu) = %.4f at "
              "lambda 49",
              worst, n_mu, v_mu)};
}

Outcome effort() {
  EffortPlan plan;
  plan.network = {100, 5, 0.1, 0};
  plan.alpha = 3e-8;
  plan.resets = {1000, 17000};
  plan.steps = 1000;
  plan.master_seed = 1;
  const EffortReport r = effort_tradeoff(plan);
  const auto& a = r.points[0];
  const auto& b = r.points[1];
  return {!a.converged_below_mean && b.converged_below_mean,
          fmt("R=1000: c=%.3f mean=%.2f mu=%.2f; R=17000: c=%.3f mean=%.2f mu=%.2f",
              a.scores.convergence, a.scores.mean_energy, a.baseline.mu, b.scores.convergence,
              b.scores.mean_energy, b.baseline.mu)};
}

Outcome fast_path() {
  std::size_t runs = 0, differing = 0;
  double drift = 0.0;
  // irregular rates so that no increment is a round binary number
  const double alphas[] = {3.7e-7, 2.3e-5, 1.1e-3};
  const std::size_t sizes[] = {12, 30, 50};
  for (std::size_t n : sizes) {
    const WeightMatrix w0 = master_weights({n, n == 12 ? 4u : 5u, 0.1, 0}, 0xFA57 + n);
    for (std::size_t ai = 0; ai < 3; ++ai) {
      for (std::uint32_t si = 0; si < 3; ++si) {
        SoConfig cfg;
        cfg.alpha = alphas[ai];
        cfg.steps = 10 * n;
        cfg.resets = 40;
        const StageSeeds seeds = derive_stage_seeds(0xFA57, static_cast<std::uint32_t>(ai), si);
        const SoResult fast = run_so(w0, cfg, seeds);
        const SoResult slow = run_so_reference(w0, cfg, seeds);
        bool same = fast.records.size() == slow.records.size();
        for (std::size_t r = 0; same && r < fast.records.size(); ++r)
          same = fast.records[r].same_outcome(slow.records[r]);
        ++runs;
        differing += !same;
        // W0 + alpha H against thousands of sequential += alpha: equal up to rounding
        for (std::size_t k = 0; k < n * n; ++k)
          drift = std::max(drift, std::abs(fast.learned.data()[k] - slow.learned.data()[k]));
      }
    }
  }
  return {differing == 0 && drift < 1e-9,
          fmt("%zu runs (N 12/30/50 x 3 alpha x 3 seeds), %zu with differing records; learned "
              "weights within %.1e",
              runs, differing, drift)};
}

Outcome scaling() {
  const std::size_t n = 10000;
  const WeightMatrix w0 = master_weights({n, 400, 0.1, 0}, 1);
  SoConfig cfg;
  cfg.alpha = 1e-9;
  cfg.steps = 20 * n;
  cfg.resets = 100;
  const SoResult res = run_so(w0, cfg, derive_stage_seeds(1, 0, 0));
  std::size_t bad = 0;
  const Stage order[] = {Stage::before_learning, Stage::learning, Stage::after_learning};
  if (res.records.size() != 300) ++bad;
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto& r = res.records[i];
    if (r.stage != order[i / 100] || r.reset != i % 100 || !std::isfinite(r.energy) ||
        r.fingerprint.size() != n)
      ++bad;
  }
  // the records survive a runs.csv round trip
  const auto samples = to_samples(res, cfg.alpha, 0);
  if (parse_runs_csv(parse_csv(runs_csv(samples), "runs.csv")) != samples) ++bad;
  const auto bl = res.energies(Stage::before_learning);
  const auto al = res.energies(Stage::after_learning);
  const double mb = std::accumulate(bl.begin(), bl.end(), 0.0) / bl.size();
  const double ma = std::accumulate(al.begin(), al.end(), 0.0) / al.size();
  return {bad == 0, fmt("300 records, %zu malformed; mean BL %.1f, mean AL %.1f", bad, mb, ma)};
}

double cycle_length(const std::vector<std::size_t>& tour, const TspInstance& inst) {
  double len = 0.0;
  for (std::size_t i = 0; i < tour.size(); ++i)
    len += inst.distance(tour[i], tour[(i + 1) % tour.size()]);
  return len;
}

Outcome tsp() {
  RngStream rng(0x75B);
  const std::size_t n = 5, restarts = 100, steps = 20 * n * n;
  std::size_t decodes = 0, invalid = 0, optimal = 0;
  for (int inst_no = 0; inst_no < 20; ++inst_no) {
    TspInstance inst = random_euclidean_instance(n, rng);
    inst.coefficients.d = stable_distance_coefficient(inst);
    const TspEncoding enc = tsp_weights(inst);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double opt = INFINITY;
    do opt = std::min(opt, cycle_length(perm, inst));
    while (std::next_permutation(perm.begin() + 1, perm.end()));

    double best = INFINITY;
    for (std::size_t r = 0; r < restarts; ++r) {
      const RelaxResult out =
          relax(random_state(n * n, rng), enc.weights, enc.bias, steps, rng);
      const TourDecode d = decode_tour(out.state, n);
      if (!d.valid()) continue;
      ++decodes;
      const auto& t = *d.tour;
      const std::set<std::size_t> cities(t.begin(), t.end());
      const bool perm_ok = t.size() == n && cities.size() == n && *cities.rbegin() < n;
      if (!perm_ok || encode_tour(t) != out.state) {
        ++invalid;
        continue;
      }
      best = std::min(best, cycle_length(t, inst));
    }
    if (best <= opt + 1e-12) ++optimal;
  }
  return {invalid == 0 && optimal >= 4,
          fmt("%zu accepted decodes, %zu not permutations; optimum found in %zu/20 (need 4)",
              decodes, invalid, optimal)};
}

struct Check {
  const char* name;
  std::function<Outcome()> run;
  double limit_seconds;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Check> checks = {
      {"energy-descent", energy_descent, 10},
      {"local-minimum", local_minimum, 60},
      {"recall", recall, 60},
      {"four-regimes", four_regimes, 0},
      {"above-chance", above_chance_check, 0},
      {"metric-math", metric_math, 1},
      {"effort", effort, 0},
      {"fast-path", fast_path, 60},
      {"scaling", scaling, 1800},
      {"tsp", tsp, 60},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    if (std::none_of(checks.begin(), checks.end(), [&](const Check& c) { return w == c.name; })) {
      std::fprintf(stderr, "unknown check %s\n", w.c_str());
      return 2;
    }
  }
  int failed = 0;
  for (const auto& c : checks) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.1f s", secs);
    if (c.limit_seconds > 0) {
      timing += fmt(" (limit %g s)", c.limit_seconds);
      if (secs > c.limit_seconds) o.pass = false;
    }
    std::printf("%s %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
