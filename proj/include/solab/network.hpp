#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace solab {

using Spin = std::int8_t;

/// Bipolar network configuration; every entry is -1 or +1.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t n, Spin fill = 1);
  StateVector(std::initializer_list<int> values);

  /// Throws ContractError unless every value is -1 or +1.
  static StateVector from_values(std::span<const int> values);
  /// Binary 0/1 layout mapped through s = 2q - 1.
  static StateVector from_binary(std::span<const int> bits);

  std::size_t size() const noexcept { return spins_.size(); }
  int operator[](std::size_t i) const noexcept { return spins_[i]; }
  void set(std::size_t i, int value);
  void flip(std::size_t i) noexcept { spins_[i] = static_cast<Spin>(-spins_[i]); }

  std::span<const Spin> spins() const noexcept { return spins_; }
  std::span<Spin> mutable_spins() noexcept { return spins_; }

  /// Global sign flip -s.
  StateVector negated() const;
  std::vector<int> to_binary() const;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<Spin> spins_;
};

enum class WeightRole { initial, learned };

/// Dense N x N couplings, row-major. Constructors in this library always emit
/// symmetric, zero-diagonal matrices; validate() checks both exactly.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t n, WeightRole role = WeightRole::initial);

  /// Throws ContractError if rows are ragged, asymmetric or have a nonzero diagonal.
  static WeightMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                WeightRole role = WeightRole::initial);

  std::size_t size() const noexcept { return n_; }
  WeightRole role() const noexcept { return role_; }
  void set_role(WeightRole role) noexcept { role_ = role; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return w_[i * n_ + j]; }
  /// Writes w_ij and w_ji together. Diagonal entries may only be set to zero.
  void set_pair(std::size_t i, std::size_t j, double value);
  void add_pair(std::size_t i, std::size_t j, double delta);

  std::span<const double> row(std::size_t i) const noexcept {
    return {w_.data() + i * n_, n_};
  }
  std::span<const double> data() const noexcept { return w_; }

  bool is_symmetric() const noexcept;
  bool has_zero_diagonal() const noexcept;
  void validate() const;

  friend bool operator==(const WeightMatrix& a, const WeightMatrix& b) {
    return a.n_ == b.n_ && a.w_ == b.w_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
  WeightRole role_ = WeightRole::initial;
};

/// External inputs I_i. An empty vector means all zeros.
using BiasVector = std::vector<double>;

/// Throws ContractError unless the state, weights and (non-empty) bias agree in size.
void check_dimensions(const StateVector& state, const WeightMatrix& weights,
                      std::span<const double> bias);

}  // namespace solab
