#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "solab/network.hpp"
#include "solab/rng.hpp"

namespace solab {

/// Penalty coefficients of the constrained tour energy.
struct TspCoefficients {
  double a = 500.0;  // one city in two positions (row)
  double b = 500.0;  // two cities in one position (column)
  double c = 200.0;  // total number of active units differs from n
  double d = 500.0;  // tour length
};

struct TspInstance {
  std::size_t n = 0;
  /// Row-major n x n, symmetric, zero diagonal, non-negative.
  std::vector<double> distances;
  TspCoefficients coefficients;

  double distance(std::size_t x, std::size_t y) const noexcept { return distances[x * n + y]; }
  void validate() const;
};

/// Cities uniform in [0, side]^2 with Euclidean distances.
TspInstance random_euclidean_instance(std::size_t n, RngStream& rng, double side = 1.0);

/// Largest D for which every valid tour is a fixed point of the encoded
/// network: switching off a unit of a valid tour changes the energy by
/// C/2 - D (d_prev + d_next), so D <= C / (4 max d) keeps all of them stable.
double stable_distance_coefficient(const TspInstance& instance);

/// Node index of "city x visited at position i": row = city, column = position.
constexpr std::size_t tsp_node(std::size_t n, std::size_t city, std::size_t position) noexcept {
  return city * n + position;
}

/// Bipolar couplings and inputs over n^2 nodes. For any state s with binary
/// image v = (s + 1) / 2, energy(s, weights, bias) + offset equals the tour
/// energy of v exactly (up to rounding).
///
/// The tour energy is quadratic in v. Writing it as
///   1/2 sum_{a != b} Q_ab v_a v_b + sum_a L_a v_a + C n^2 / 2
/// with L_a = C (1 - 2n) / 2 (from v_a^2 = v_a in the count penalty), the
/// substitution v = (s + 1) / 2 gives
///   w_ab = -Q_ab / 4,  I_a = -(sum_{b != a} Q_ab / 4 + L_a / 2),
/// and a constant that is reported as `offset` but plays no role in dynamics.
struct TspEncoding {
  WeightMatrix weights;
  BiasVector bias;
  double offset = 0.0;
};

TspEncoding tsp_weights(const TspInstance& instance);

/// City indices in visiting order.
using Tour = std::vector<std::size_t>;

struct TourDecode {
  std::optional<Tour> tour;
  /// Cities with no active unit / more than one active unit.
  std::vector<std::size_t> empty_rows;
  std::vector<std::size_t> overfull_rows;
  /// Positions with no active unit / more than one active unit.
  std::vector<std::size_t> empty_columns;
  std::vector<std::size_t> overfull_columns;

  bool valid() const noexcept { return tour.has_value(); }
  std::string describe() const;
};

TourDecode decode_tour(const StateVector& state, std::size_t n);
StateVector encode_tour(const Tour& tour);

/// Cyclic length including the closing edge.
double tour_length(const Tour& tour, const TspInstance& instance);

/// Shortest tour by enumerating every permutation that starts at city 0.
/// Factorial cost; intended for n <= 10.
Tour brute_force_tour(const TspInstance& instance);

/// The four-city example layout: A at position 3, B at 1, C at 4, D at 2.
StateVector four_city_example_state();

struct TspRunSummary {
  std::size_t restarts = 0;
  std::size_t valid = 0;
  std::optional<Tour> best;
  double best_length = 0.0;
};

/// Relaxes `restarts` random initial states under the encoded network and
/// keeps the shortest valid decoded tour.
TspRunSummary tsp_search(const TspInstance& instance, std::size_t restarts, std::size_t steps,
                         RngStream& rng);

}  // namespace solab
