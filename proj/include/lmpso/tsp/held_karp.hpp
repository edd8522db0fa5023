#pragma once

#include <stdexcept>

#include "lmpso/tsp/instance.hpp"

namespace lmpso::tsp {

inline constexpr std::size_t kHeldKarpMaxCities = 15;

class TooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingOptimum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactSolution {
  double length = 0.0;
  Tour tour;
};

/// Exact TSP by Held-Karp dynamic programming over subsets, tours anchored at
/// city 0. Subsets of equal size are solved in parallel (OpenMP). Throws
/// TooLarge above 15 cities.
ExactSolution held_karp(const TspInstance& instance);

/// Single-threaded reference; visits subsets in plain numeric order.
/// Produces bit-identical results to held_karp.
ExactSolution held_karp_serial(const TspInstance& instance);

/// Gap as a fraction: (length - optimum) / optimum.
double optimality_gap(double length, double optimum);
inline double gap_percent(double length, double optimum) { return 100.0 * optimality_gap(length, optimum); }

/// Held-Karp optimum for n <= 15, otherwise the instance's reference optimum.
/// Throws MissingOptimum when neither is available.
double resolve_optimum(const TspInstance& instance);

}  // namespace lmpso::tsp
