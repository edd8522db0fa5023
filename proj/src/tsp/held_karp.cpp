#include "lmpso/tsp/held_karp.hpp"

#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

namespace lmpso::tsp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint8_t kNoParent = 0xFF;

// City k (1..n-1) is bit k-1. cost[mask * m + j] is the shortest path that
// starts at city 0, visits exactly the cities in mask and ends at city j+1.
struct Table {
  std::size_t m;  // n - 1
  std::vector<double> cost;
  std::vector<std::uint8_t> parent;

  explicit Table(std::size_t n)
      : m(n - 1), cost((std::size_t{1} << m) * m, kInf), parent(cost.size(), kNoParent) {}
};

// Fills one state. Predecessors are scanned in ascending order with a strict
// comparison, so the result does not depend on the order states are visited.
inline void relax(Table& t, const DistanceMatrix& d, std::uint32_t mask, std::size_t j) {
  const std::uint32_t prev = mask & ~(1u << j);
  double best = kInf;
  std::uint8_t arg = kNoParent;
  for (std::size_t k = 0; k < t.m; ++k) {
    if (!(prev & (1u << k))) continue;
    const double c = t.cost[prev * t.m + k] + d(k + 1, j + 1);
    if (c < best) {
      best = c;
      arg = static_cast<std::uint8_t>(k);
    }
  }
  t.cost[mask * t.m + j] = best;
  t.parent[mask * t.m + j] = arg;
}

void seed(Table& t, const DistanceMatrix& d) {
  for (std::size_t j = 0; j < t.m; ++j) t.cost[(1u << j) * t.m + j] = d(0, j + 1);
}

ExactSolution close_tour(const Table& t, const DistanceMatrix& d) {
  const std::uint32_t full = (1u << t.m) - 1;
  double best = kInf;
  std::size_t last = 0;
  for (std::size_t j = 0; j < t.m; ++j) {
    const double c = t.cost[full * t.m + j] + d(j + 1, 0);
    if (c < best) {
      best = c;
      last = j;
    }
  }
  std::vector<std::size_t> reversed;
  std::uint32_t mask = full;
  std::size_t j = last;
  while (true) {
    reversed.push_back(j + 1);
    const auto p = t.parent[mask * t.m + j];
    mask &= ~(1u << j);
    if (p == kNoParent) break;
    j = p;
  }
  Tour tour;
  tour.order.push_back(0);
  tour.order.insert(tour.order.end(), reversed.rbegin(), reversed.rend());
  return {best, std::move(tour)};
}

void check_size(const TspInstance& instance) {
  if (instance.size() > kHeldKarpMaxCities) {
    throw TooLarge("Held-Karp is limited to " + std::to_string(kHeldKarpMaxCities) + " cities, got " +
                   std::to_string(instance.size()));
  }
  if (instance.size() < 2) throw std::invalid_argument("instance needs at least 2 cities");
}

}  // namespace

ExactSolution held_karp(const TspInstance& instance) {
  check_size(instance);
  const DistanceMatrix d(instance);
  Table t(instance.size());
  seed(t, d);

  std::vector<std::vector<std::uint32_t>> layers(t.m + 1);
  for (std::uint32_t mask = 1; mask < (1u << t.m); ++mask) {
    layers[static_cast<std::size_t>(std::popcount(mask))].push_back(mask);
  }
  for (std::size_t size = 2; size <= t.m; ++size) {
    const auto& layer = layers[size];
    const auto count = static_cast<long long>(layer.size());
#pragma omp parallel for schedule(static)
    for (long long idx = 0; idx < count; ++idx) {
      const std::uint32_t mask = layer[static_cast<std::size_t>(idx)];
      for (std::size_t j = 0; j < t.m; ++j) {
        if (mask & (1u << j)) relax(t, d, mask, j);
      }
    }
  }
  return close_tour(t, d);
}

ExactSolution held_karp_serial(const TspInstance& instance) {
  check_size(instance);
  const DistanceMatrix d(instance);
  Table t(instance.size());
  seed(t, d);
  for (std::uint32_t mask = 1; mask < (1u << t.m); ++mask) {
    if (std::popcount(mask) < 2) continue;
    for (std::size_t j = 0; j < t.m; ++j) {
      if (mask & (1u << j)) relax(t, d, mask, j);
    }
  }
  return close_tour(t, d);
}

double optimality_gap(double length, double optimum) {
  if (!(optimum > 0.0)) throw std::invalid_argument("optimum must be positive");
  return (length - optimum) / optimum;
}

double resolve_optimum(const TspInstance& instance) {
  if (instance.size() <= kHeldKarpMaxCities) return held_karp(instance).length;
  if (instance.reference_optimum) return *instance.reference_optimum;
  throw MissingOptimum("instance '" + instance.name + "' has " + std::to_string(instance.size()) +
                       " cities and no reference optimum (add an OPT line)");
}

}  // namespace lmpso::tsp
