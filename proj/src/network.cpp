#include "solab/network.hpp"

#include <string>

#include "solab/errors.hpp"

namespace solab {

StateVector::StateVector(std::size_t n, Spin fill) : spins_(n, fill) {
  if (fill != 1 && fill != -1) throw ContractError("state entries must be -1 or +1");
}

StateVector::StateVector(std::initializer_list<int> values) {
  spins_.reserve(values.size());
  for (int v : values) {
    if (v != 1 && v != -1) throw ContractError("state entries must be -1 or +1");
    spins_.push_back(static_cast<Spin>(v));
  }
}

StateVector StateVector::from_values(std::span<const int> values) {
  StateVector s;
  s.spins_.reserve(values.size());
  for (int v : values) {
    if (v != 1 && v != -1) {
      throw ContractError("state entries must be -1 or +1, got " + std::to_string(v));
    }
    s.spins_.push_back(static_cast<Spin>(v));
  }
  return s;
}

StateVector StateVector::from_binary(std::span<const int> bits) {
  StateVector s;
  s.spins_.reserve(bits.size());
  for (int q : bits) {
    if (q != 0 && q != 1) throw ContractError("binary entries must be 0 or 1");
    s.spins_.push_back(static_cast<Spin>(2 * q - 1));
  }
  return s;
}

void StateVector::set(std::size_t i, int value) {
  if (value != 1 && value != -1) throw ContractError("state entries must be -1 or +1");
  spins_.at(i) = static_cast<Spin>(value);
}

StateVector StateVector::negated() const {
  StateVector out = *this;
  for (auto& s : out.spins_) s = static_cast<Spin>(-s);
  return out;
}

std::vector<int> StateVector::to_binary() const {
  std::vector<int> bits(spins_.size());
  for (std::size_t i = 0; i < spins_.size(); ++i) bits[i] = spins_[i] > 0 ? 1 : 0;
  return bits;
}

WeightMatrix::WeightMatrix(std::size_t n, WeightRole role) : n_(n), w_(n * n, 0.0), role_(role) {}

WeightMatrix WeightMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                     WeightRole role) {
  WeightMatrix m(rows.size(), role);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw ContractError("weight matrix row " + std::to_string(i) + " has " +
                          std::to_string(rows[i].size()) + " entries, expected " +
                          std::to_string(rows.size()));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m.w_[i * m.n_ + j] = rows[i][j];
  }
  m.validate();
  return m;
}

void WeightMatrix::set_pair(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) throw ContractError("weight index out of range");
  if (i == j && value != 0.0) throw ContractError("diagonal weights must stay zero");
  w_[i * n_ + j] = value;
  w_[j * n_ + i] = value;
}

void WeightMatrix::add_pair(std::size_t i, std::size_t j, double delta) {
  if (i >= n_ || j >= n_) throw ContractError("weight index out of range");
  if (i == j) throw ContractError("diagonal weights must stay zero");
  w_[i * n_ + j] += delta;
  w_[j * n_ + i] = w_[i * n_ + j];
}

bool WeightMatrix::is_symmetric() const noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (w_[i * n_ + j] != w_[j * n_ + i]) return false;
    }
  }
  return true;
}

bool WeightMatrix::has_zero_diagonal() const noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    if (w_[i * n_ + i] != 0.0) return false;
  }
  return true;
}

void WeightMatrix::validate() const {
  if (!is_symmetric()) throw ContractError("weight matrix is not symmetric");
  if (!has_zero_diagonal()) throw ContractError("weight matrix has a nonzero diagonal");
}

void check_dimensions(const StateVector& state, const WeightMatrix& weights,
                      std::span<const double> bias) {
  if (state.size() != weights.size()) {
    throw ContractError("state has " + std::to_string(state.size()) +
                        " nodes but weights are " + std::to_string(weights.size()) + "x" +
                        std::to_string(weights.size()));
  }
  if (!bias.empty() && bias.size() != state.size()) {
    throw ContractError("bias has " + std::to_string(bias.size()) + " entries, expected " +
                        std::to_string(state.size()));
  }
}

}  // namespace solab
