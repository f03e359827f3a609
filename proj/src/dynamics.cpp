#include "solab/dynamics.hpp"

#include <string>

#include "solab/errors.hpp"

namespace solab {

namespace {

void check_index(const StateVector& state, std::size_t i) {
  if (i >= state.size()) {
    throw ContractError("node index " + std::to_string(i) + " out of range for N=" +
                        std::to_string(state.size()));
  }
}

double row_dot(std::span<const double> row, std::span<const Spin> spins) {
  double sum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) sum += row[j] * spins[j];
  return sum;
}

}  // namespace

double local_field(const StateVector& state, const WeightMatrix& weights,
                   std::span<const double> bias, std::size_t i) {
  check_dimensions(state, weights, bias);
  check_index(state, i);
  const double input = bias.empty() ? 0.0 : bias[i];
  return row_dot(weights.row(i), state.spins()) + input;
}

bool async_step(StateVector& state, const WeightMatrix& weights,
                std::span<const double> bias, std::size_t i) {
  const int next = threshold(local_field(state, weights, bias, i));
  if (next == state[i]) return false;
  state.flip(i);
  return true;
}

double energy(const StateVector& state, const WeightMatrix& weights,
              std::span<const double> bias) {
  check_dimensions(state, weights, bias);
  const auto spins = state.spins();
  double pair = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    pair += spins[i] * row_dot(weights.row(i), spins);
  }
  double external = 0.0;
  if (!bias.empty()) {
    for (std::size_t i = 0; i < state.size(); ++i) external += spins[i] * bias[i];
  }
  return -0.5 * pair - external;
}

bool is_fixed_point(const StateVector& state, const WeightMatrix& weights,
                    std::span<const double> bias) {
  check_dimensions(state, weights, bias);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double input = bias.empty() ? 0.0 : bias[i];
    if (threshold(row_dot(weights.row(i), state.spins()) + input) != state[i]) return false;
  }
  return true;
}

StateVector random_state(std::size_t n, RngStream& rng) {
  StateVector state(n);
  auto spins = state.mutable_spins();
  for (std::size_t base = 0; base < n; base += 64) {
    const std::uint64_t word = rng.next_u64();
    const std::size_t count = n - base < 64 ? n - base : 64;
    for (std::size_t b = 0; b < count; ++b) {
      spins[base + b] = ((word >> b) & 1U) ? Spin{1} : Spin{-1};
    }
  }
  return state;
}

RelaxResult relax(StateVector state, const WeightMatrix& weights, std::span<const double> bias,
                  std::size_t steps, RngStream& rng, bool record_trace) {
  check_dimensions(state, weights, bias);
  if (steps == 0) throw ContractError("relax needs at least one step");
  const std::size_t n = state.size();
  auto spins = state.mutable_spins();

  std::vector<double> field(n);
  for (std::size_t i = 0; i < n; ++i) {
    field[i] = row_dot(weights.row(i), spins) + (bias.empty() ? 0.0 : bias[i]);
  }

  RelaxResult result;
  double e = 0.0;
  if (record_trace) {
    e = energy(state, weights, bias);
    result.trace.reserve(steps);
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t i = rng.uniform_index(n);
    const int next = threshold(field[i]);
    if (next != spins[i]) {
      // Zero diagonal: flipping i leaves field[i] itself unchanged.
      if (record_trace) e += 2.0 * spins[i] * field[i];
      spins[i] = static_cast<Spin>(next);
      const auto column = weights.row(i);
      const double delta = 2.0 * next;
      for (std::size_t j = 0; j < n; ++j) field[j] += delta * column[j];
      ++result.flips;
    }
    if (record_trace) result.trace.push_back(e);
  }
  result.state = std::move(state);
  return result;
}

}  // namespace solab
