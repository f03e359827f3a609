#include "solab/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "solab/dynamics.hpp"
#include "solab/errors.hpp"

namespace solab {

void TspInstance::validate() const {
  if (n < 2) throw ConfigError("a tour needs at least two cities");
  if (distances.size() != n * n) throw ConfigError("distance matrix must be n x n");
  for (std::size_t x = 0; x < n; ++x) {
    if (distance(x, x) != 0.0) throw ConfigError("distance matrix diagonal must be zero");
    for (std::size_t y = 0; y < n; ++y) {
      if (distance(x, y) != distance(y, x)) throw ConfigError("distance matrix must be symmetric");
      if (!(distance(x, y) >= 0.0)) throw ConfigError("distances must be non-negative");
    }
  }
  const auto& k = coefficients;
  if (!(k.a > 0 && k.b > 0 && k.c > 0 && k.d > 0)) {
    throw ConfigError("tour energy coefficients must be positive");
  }
}

TspInstance random_euclidean_instance(std::size_t n, RngStream& rng, double side) {
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = side * rng.uniform_real();
    ys[i] = side * rng.uniform_real();
  }
  TspInstance inst;
  inst.n = n;
  inst.distances.assign(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double d = std::hypot(xs[x] - xs[y], ys[x] - ys[y]);
      inst.distances[x * n + y] = d;
      inst.distances[y * n + x] = d;
    }
  }
  return inst;
}

double stable_distance_coefficient(const TspInstance& instance) {
  const double longest = *std::max_element(instance.distances.begin(), instance.distances.end());
  if (!(longest > 0.0)) throw ConfigError("all cities coincide");
  return instance.coefficients.c / (4.0 * longest);
}

TspEncoding tsp_weights(const TspInstance& instance) {
  instance.validate();
  const std::size_t n = instance.n;
  const std::size_t nodes = n * n;
  const auto& k = instance.coefficients;

  // Pairwise coefficient Q_ab of the binary energy, a = (x, i), b = (y, j).
  auto pair_coefficient = [&](std::size_t x, std::size_t i, std::size_t y, std::size_t j) {
    double q = k.c;
    if (x == y && i != j) q += k.a;
    if (i == j && x != y) q += k.b;
    if (x != y) {
      const std::size_t next = (i + 1) % n;
      const std::size_t prev = (i + n - 1) % n;
      const double adjacency = (j == next ? 1.0 : 0.0) + (j == prev ? 1.0 : 0.0);
      q += k.d * instance.distance(x, y) * adjacency;
    }
    return q;
  };

  const double linear = k.c * (1.0 - 2.0 * static_cast<double>(n)) / 2.0;
  TspEncoding enc{WeightMatrix(nodes, WeightRole::initial), BiasVector(nodes, 0.0), 0.0};
  std::vector<double> row_sums(nodes, 0.0);
  double q_total = 0.0;
  for (std::size_t a = 0; a < nodes; ++a) {
    for (std::size_t b = a + 1; b < nodes; ++b) {
      const double q = pair_coefficient(a / n, a % n, b / n, b % n);
      enc.weights.set_pair(a, b, -q / 4.0);
      row_sums[a] += q;
      row_sums[b] += q;
      q_total += 2.0 * q;
    }
  }
  for (std::size_t a = 0; a < nodes; ++a) enc.bias[a] = -(row_sums[a] / 4.0 + linear / 2.0);
  const double nn = static_cast<double>(n);
  enc.offset = q_total / 8.0 + linear * static_cast<double>(nodes) / 2.0 + k.c * nn * nn / 2.0;
  return enc;
}

std::string TourDecode::describe() const {
  if (tour) return "valid";
  std::ostringstream out;
  auto list = [&](const char* label, const std::vector<std::size_t>& v) {
    if (v.empty()) return;
    out << label << ":";
    for (auto x : v) out << ' ' << x;
    out << "; ";
  };
  list("empty rows", empty_rows);
  list("overfull rows", overfull_rows);
  list("empty columns", empty_columns);
  list("overfull columns", overfull_columns);
  auto text = out.str();
  if (text.size() >= 2) text.resize(text.size() - 2);
  return text;
}

TourDecode decode_tour(const StateVector& state, std::size_t n) {
  if (n == 0 || state.size() != n * n) {
    throw ContractError("state length " + std::to_string(state.size()) +
                        " is not the square of the city count " + std::to_string(n));
  }
  std::vector<std::size_t> row_count(n, 0), col_count(n, 0);
  Tour by_position(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      if (state[tsp_node(n, x, i)] > 0) {
        ++row_count[x];
        ++col_count[i];
        by_position[i] = x;
      }
    }
  }
  TourDecode out;
  for (std::size_t x = 0; x < n; ++x) {
    if (row_count[x] == 0) out.empty_rows.push_back(x);
    if (row_count[x] > 1) out.overfull_rows.push_back(x);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (col_count[i] == 0) out.empty_columns.push_back(i);
    if (col_count[i] > 1) out.overfull_columns.push_back(i);
  }
  if (out.empty_rows.empty() && out.overfull_rows.empty() && out.empty_columns.empty() &&
      out.overfull_columns.empty()) {
    out.tour = std::move(by_position);
  }
  return out;
}

StateVector encode_tour(const Tour& tour) {
  const std::size_t n = tour.size();
  std::vector<int> bits(n * n, 0);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (tour[i] >= n || seen[tour[i]]) throw ContractError("tour is not a permutation");
    seen[tour[i]] = true;
    bits[tsp_node(n, tour[i], i)] = 1;
  }
  return StateVector::from_binary(bits);
}

double tour_length(const Tour& tour, const TspInstance& instance) {
  const std::size_t n = tour.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += instance.distance(tour[i], tour[(i + 1) % n]);
  return total;
}

Tour brute_force_tour(const TspInstance& instance) {
  instance.validate();
  Tour perm(instance.n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Tour best = perm;
  double best_length = std::numeric_limits<double>::infinity();
  do {
    const double len = tour_length(perm, instance);
    if (len < best_length) {
      best_length = len;
      best = perm;
    }
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return best;
}

StateVector four_city_example_state() {
  const std::vector<int> bits = {0, 0, 1, 0,  //
                                 1, 0, 0, 0,  //
                                 0, 0, 0, 1,  //
                                 0, 1, 0, 0};
  return StateVector::from_binary(bits);
}

TspRunSummary tsp_search(const TspInstance& instance, std::size_t restarts, std::size_t steps,
                         RngStream& rng) {
  const TspEncoding enc = tsp_weights(instance);
  const std::size_t nodes = instance.n * instance.n;
  TspRunSummary summary;
  for (std::size_t r = 0; r < restarts; ++r) {
    StateVector start = random_state(nodes, rng);
    const RelaxResult out = relax(std::move(start), enc.weights, enc.bias, steps, rng);
    ++summary.restarts;
    const TourDecode decoded = decode_tour(out.state, instance.n);
    if (!decoded.valid()) continue;
    ++summary.valid;
    const double len = tour_length(*decoded.tour, instance);
    if (!summary.best || len < summary.best_length) {
      summary.best = decoded.tour;
      summary.best_length = len;
    }
  }
  return summary;
}

}  // namespace solab
