#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "solab/dynamics.hpp"
#include "solab/errors.hpp"
#include "solab/experiment.hpp"
#include "solab/self_opt.hpp"
#include "solab/weights.hpp"

using namespace solab;

namespace {

SoConfig small_config(double alpha, std::size_t steps = 200, std::size_t resets = 30) {
  SoConfig c;
  c.alpha = alpha;
  c.steps = steps;
  c.resets = resets;
  return c;
}

}  // namespace

TEST_CASE("hebbian_update adds alpha s_i s_j off the diagonal") {
  WeightMatrix w(4, WeightRole::learned);
  const StateVector s{1, -1, 1, 1};
  hebbian_update(w, s, 0.5);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(w(i, j) == (i == j ? 0.0 : 0.5 * s[i] * s[j]));
  const WeightMatrix before = w;
  hebbian_update(w, s, 0.0);
  CHECK(w == before);
}

TEST_CASE("batched counts equal elementwise passes exactly") {
  // dyadic weights and rate: every partial sum is representable
  RngStream rng(21);
  WeightMatrix w0(16);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = i + 1; j < 16; ++j)
      w0.set_pair(i, j, static_cast<double>(rng.uniform_index(9)) / 8.0 - 0.5);
  const double alpha = 0x1p-20;
  WeightMatrix naive = w0;
  LearnedWeights batched(w0, alpha);
  for (int pass = 0; pass < 1000; ++pass) {
    const auto s = random_state(16, rng);
    hebbian_update(naive, s, alpha);
    batched.accumulate(s);
  }
  CHECK(batched.materialize() == naive);

  // one state repeated: a single accumulate with repetitions
  WeightMatrix again = w0;
  LearnedWeights once(w0, alpha);
  const auto s = random_state(16, rng);
  for (int k = 0; k < 1000; ++k) hebbian_update(again, s, alpha);
  once.accumulate(s, 1000);
  CHECK(once.materialize() == again);
}

TEST_CASE("learned weights stay symmetric with zero diagonal") {
  const auto w0 = modular_weights({20, 5, 0.1, 2});
  const auto res = run_so(w0, small_config(1e-3, 400, 50), 7);
  CHECK(res.learned.is_symmetric());
  CHECK(res.learned.has_zero_diagonal());
  CHECK(res.learned.role() == WeightRole::learned);
}

TEST_CASE("records have stage order, reset index and W0 energies") {
  const auto w0 = modular_weights({20, 5, 0.1, 2});
  auto cfg = small_config(1e-4);
  cfg.record_states = true;
  const auto res = run_so(w0, cfg, 8);
  REQUIRE(res.records.size() == 90);
  for (std::size_t k = 0; k < 90; ++k) {
    const auto& r = res.records[k];
    CHECK(static_cast<int>(r.stage) == static_cast<int>(k / 30));
    CHECK(r.reset == k % 30);
    REQUIRE(r.state.has_value());
    CHECK(energy(*r.state, w0) == r.energy);
    CHECK(r.fingerprint == AttractorFingerprint(*r.state));
  }
  CHECK(audit_record_energies(res, w0, 1) == 0);
}

TEST_CASE("BL-only run is plain relaxation over W0") {
  const auto w0 = modular_weights({20, 5, 0.1, 4});
  auto cfg = small_config(0.3, 200, 500);
  cfg.stages = {Stage::before_learning};
  const StageSeeds seeds = StageSeeds::from_run_seed(12);
  const auto res = run_so(w0, cfg, seeds);
  RngStream rng(seeds.before_learning);
  for (std::size_t r = 0; r < 500; ++r) {
    const auto out = relax(random_state(20, rng), w0, {}, 200, rng);
    REQUIRE(res.records[r].energy == energy(out.state, w0));
  }
  CHECK(res.learned == w0);
}

TEST_CASE("alpha zero leaves the energy distribution of every stage equal") {
  const auto w0 = modular_weights({20, 5, 0.1, 4});
  auto cfg = small_config(0.0, 200, 100);
  const auto res = run_so(w0, cfg, 3);
  CHECK(res.learned == w0);
  // with a shared seed each stage replays the same draws
  StageSeeds same{5, 5, 5};
  const auto rep = run_so(w0, cfg, same);
  CHECK(rep.energies(Stage::before_learning) == rep.energies(Stage::learning));
  CHECK(rep.energies(Stage::learning) == rep.energies(Stage::after_learning));
}

TEST_CASE("fast engine matches the reference bit for bit") {
  const auto w0 = modular_weights({30, 5, 0.1, 6});
  for (double alpha : {0.0, 3.3e-6, 7.1e-4, 0.05}) {
    for (std::uint64_t seed : {1u, 2u}) {
      auto cfg = small_config(alpha, 300, 15);
      cfg.record_traces = true;
      const auto seeds = StageSeeds::from_run_seed(seed);
      const auto fast = run_so(w0, cfg, seeds);
      const auto slow = run_so_reference(w0, cfg, seeds);
      REQUIRE(fast.records.size() == slow.records.size());
      for (std::size_t k = 0; k < fast.records.size(); ++k) {
        CHECK(fast.records[k].same_outcome(slow.records[k]));
        // incremental against recomputed energies: equal up to rounding
        const auto& a = fast.records[k].trace;
        const auto& b = slow.records[k].trace;
        REQUIRE(a.size() == b.size());
        for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t] == doctest::Approx(b[t]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("run_so is deterministic") {
  const auto w0 = modular_weights({25, 5, 0.1, 1});
  const auto a = run_so(w0, small_config(1e-3), 44);
  const auto b = run_so(w0, small_config(1e-3), 44);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].same_outcome(b.records[k]));
  CHECK(a.learned == b.learned);
}

TEST_CASE("config validation") {
  const auto w0 = modular_weights({10, 5, 0.1, 1});
  auto bad = small_config(-1.0);
  CHECK_THROWS_AS(run_so(w0, bad, 1), ConfigError);
  bad = small_config(0.1, 0);
  CHECK_THROWS_AS(run_so(w0, bad, 1), ConfigError);
  bad = small_config(0.1);
  bad.stages = {};
  CHECK_THROWS_AS(run_so(w0, bad, 1), ConfigError);
  bad.stages = {Stage::learning, Stage::learning};
  CHECK_THROWS_AS(run_so(w0, bad, 1), ConfigError);
  CHECK(parse_stage("AL") == Stage::after_learning);
  CHECK(stage_label(Stage::learning) == "L");
  CHECK_THROWS_AS(parse_stage("XL"), ConfigError);
}

TEST_CASE("fingerprints identify s and -s") {
  const StateVector s{1, -1, -1, 1, 1};
  const AttractorFingerprint a(s), b(s.negated());
  CHECK(a == b);
  CHECK(AttractorFingerprint::from_hex(a.to_hex(), 5) == a);
  CHECK(a != AttractorFingerprint(StateVector{1, 1, -1, 1, 1}));
  StateVector big(130, 1);
  big.set(129, -1);
  const AttractorFingerprint f(big);
  CHECK(AttractorFingerprint::from_hex(f.to_hex(), 130) == f);
}

TEST_CASE("attractor sets and the dominant attractor") {
  std::vector<SoRunRecord> recs(5);
  const StateVector x{1, 1, -1}, y{1, -1, -1};
  for (std::size_t k = 0; k < 5; ++k) {
    recs[k].stage = Stage::after_learning;
    recs[k].fixed_point = true;
  }
  recs[0].fingerprint = AttractorFingerprint(x);
  recs[1].fingerprint = AttractorFingerprint(x.negated());
  recs[2].fingerprint = AttractorFingerprint(y);
  recs[3].fingerprint = AttractorFingerprint(y);
  recs[4].fingerprint = AttractorFingerprint(y);
  recs[4].fixed_point = false;
  CHECK(attractor_set(recs, Stage::after_learning).size() == 2);
  CHECK(attractor_set(recs, Stage::before_learning).empty());
  // x twice, y twice among fixed points: tie goes to the smaller fingerprint
  const auto d = dominant_attractor(recs, Stage::after_learning);
  REQUIRE(d);
  CHECK(*d == std::min(AttractorFingerprint(x), AttractorFingerprint(y)));
  CHECK_FALSE(dominant_attractor(recs, Stage::learning));
}

TEST_CASE("BL attractors are genuine local minima found by enumeration") {
  // N = 20: every state checked against all single flips
  const auto w0 = modular_weights({20, 5, 0.1, 9});
  FingerprintSet minima;
  std::vector<double> field(20);
  for (std::uint32_t mask = 0; mask < (1u << 20); ++mask) {
    if (mask & 1) continue;  // canonical half: s_0 = -1
    StateVector s(20);
    for (std::size_t i = 0; i < 20; ++i) s.set(i, (mask >> i) & 1 ? 1 : -1);
    bool stable = true;
    for (std::size_t i = 0; i < 20 && stable; ++i) {
      double h = 0.0;
      for (std::size_t j = 0; j < 20; ++j) h += w0(i, j) * s[j];
      stable = threshold(h) == s[i];
    }
    if (stable) minima.insert(AttractorFingerprint(s));
  }
  auto cfg = small_config(0.0, 400, 300);
  cfg.stages = {Stage::before_learning};
  const auto res = run_so(w0, cfg, 31);
  const auto reached = attractor_set(res.records, Stage::before_learning);
  CHECK(!reached.empty());
  for (const auto& f : reached) CHECK(minima.count(f) == 1);
  CHECK(reached.size() <= minima.size());
}
