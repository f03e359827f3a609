#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "solab/network.hpp"
#include "solab/rng.hpp"

namespace solab {

/// Heaviside threshold in bipolar form. A zero field maps to +1.
constexpr int threshold(double field) noexcept { return field >= 0.0 ? 1 : -1; }

/// sum_j w_ij s_j + I_i
double local_field(const StateVector& state, const WeightMatrix& weights,
                   std::span<const double> bias, std::size_t i);

/// Updates node i in place; returns true iff its sign changed.
bool async_step(StateVector& state, const WeightMatrix& weights,
                std::span<const double> bias, std::size_t i);

/// -1/2 sum_ij w_ij s_i s_j - sum_i s_i I_i
double energy(const StateVector& state, const WeightMatrix& weights,
              std::span<const double> bias = {});

bool is_fixed_point(const StateVector& state, const WeightMatrix& weights,
                    std::span<const double> bias = {});

/// Uniform bipolar state. Draws ceil(n/64) words; bit b of word w sets node
/// 64w+b, with a set bit meaning +1.
StateVector random_state(std::size_t n, RngStream& rng);

struct RelaxResult {
  StateVector state;
  /// Energy after each step; empty unless requested.
  std::vector<double> trace;
  std::size_t flips = 0;
};

/// Exactly `steps` asynchronous updates, each on a node drawn uniformly (with
/// replacement) from `rng`. Local fields are maintained incrementally, so a
/// step costs O(1) and a flip O(N).
RelaxResult relax(StateVector state, const WeightMatrix& weights, std::span<const double> bias,
                  std::size_t steps, RngStream& rng, bool record_trace = false);

/// Default relaxation length when none is given: 10 updates per node.
constexpr std::size_t default_steps(std::size_t n) noexcept { return 10 * n; }

}  // namespace solab
