#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "lmpso/rng.hpp"
#include "lmpso/tsp/instance.hpp"

namespace lmpso::tsp {

/// Greedy tour from `start`: always move to the closest unvisited city,
/// ties to the lowest index.
Tour nearest_neighbor(const TspInstance& instance, std::size_t start = 0);

enum class InsertionMode { nearest, farthest, random };

std::string_view to_string(InsertionMode mode) noexcept;

/// Called once per insertion with the partial tour before the insertion, the
/// chosen city, and the position it is inserted at (index in the new tour).
using InsertionObserver =
    std::function<void(const std::vector<std::size_t>& partial, std::size_t city, std::size_t at)>;

/// Insertion construction (n >= 3).
///
/// Starts from the closest / farthest / a random pair of cities, then
/// repeatedly picks the unvisited city whose distance to the partial tour is
/// smallest / largest / random, and inserts it on the edge with the least
/// length increase. Distance to the tour is the minimum over tour cities.
/// Ties go to the lowest city index and the leftmost edge.
///
/// Random mode draws its picks from a SplitMix64 stream seeded with one value
/// taken from `rng`; see random_insertion.
Tour insertion_heuristic(const TspInstance& instance, InsertionMode mode, Rng& rng,
                         const InsertionObserver& observer = {});

/// Random insertion with an explicit pick seed. The pick sequence is:
/// first city = next() % n, second = next() % (n - 1) skipping the first,
/// then each step next() % remaining over unvisited cities in ascending order.
Tour random_insertion(const TspInstance& instance, std::uint64_t pick_seed,
                      const InsertionObserver& observer = {});

Tour nearest_insertion(const TspInstance& instance, const InsertionObserver& observer = {});
Tour farthest_insertion(const TspInstance& instance, const InsertionObserver& observer = {});

}  // namespace lmpso::tsp
