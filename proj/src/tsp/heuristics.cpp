#include "lmpso/tsp/heuristics.hpp"

#include <limits>

namespace lmpso::tsp {

std::string_view to_string(InsertionMode mode) noexcept {
  switch (mode) {
    case InsertionMode::nearest:
      return "nearest";
    case InsertionMode::farthest:
      return "farthest";
    case InsertionMode::random:
      return "random";
  }
  return "unknown";
}

Tour nearest_neighbor(const TspInstance& instance, std::size_t start) {
  const auto n = instance.size();
  if (start >= n) throw std::invalid_argument("start city out of range");
  const DistanceMatrix d(instance);
  std::vector<bool> visited(n, false);
  Tour tour;
  tour.order.reserve(n);
  std::size_t current = start;
  visited[current] = true;
  tour.order.push_back(current);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (!visited[c] && d(current, c) < best_d) {
        best_d = d(current, c);
        best = c;
      }
    }
    visited[best] = true;
    tour.order.push_back(best);
    current = best;
  }
  return tour;
}

namespace {

struct Picker {
  InsertionMode mode;
  SplitMix64 picks{0};
};

Tour insertion_impl(const TspInstance& instance, Picker picker, const InsertionObserver& observer) {
  const auto n = instance.size();
  if (n < 3) throw std::invalid_argument("insertion heuristics need at least 3 cities");
  const DistanceMatrix d(instance);

  std::size_t a = 0;
  std::size_t b = 1;
  if (picker.mode == InsertionMode::random) {
    a = picker.picks.index(n);
    b = picker.picks.index(n - 1);
    if (b >= a) ++b;
  } else {
    double best = d(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool better = picker.mode == InsertionMode::nearest ? d(i, j) < best : d(i, j) > best;
        if (better) {
          best = d(i, j);
          a = i;
          b = j;
        }
      }
    }
  }

  std::vector<std::size_t> tour{a, b};
  tour.reserve(n);
  std::vector<bool> in_tour(n, false);
  in_tour[a] = in_tour[b] = true;
  std::vector<double> to_tour(n);
  for (std::size_t c = 0; c < n; ++c) to_tour[c] = std::min(d(c, a), d(c, b));

  while (tour.size() < n) {
    std::size_t city = n;
    if (picker.mode == InsertionMode::random) {
      const std::size_t remaining = n - tour.size();
      std::size_t k = picker.picks.index(remaining);
      for (std::size_t c = 0; c < n; ++c) {
        if (in_tour[c]) continue;
        if (k == 0) {
          city = c;
          break;
        }
        --k;
      }
    } else {
      double best = picker.mode == InsertionMode::nearest ? std::numeric_limits<double>::infinity()
                                                          : -1.0;
      for (std::size_t c = 0; c < n; ++c) {
        if (in_tour[c]) continue;
        const bool better =
            picker.mode == InsertionMode::nearest ? to_tour[c] < best : to_tour[c] > best;
        if (better) {
          best = to_tour[c];
          city = c;
        }
      }
    }

    const std::size_t m = tour.size();
    std::size_t at = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t u = tour[k];
      const std::size_t v = tour[(k + 1) % m];
      const double cost = d(u, city) + d(city, v) - d(u, v);
      if (cost < best_cost) {
        best_cost = cost;
        at = k + 1;
      }
    }
    if (observer) observer(tour, city, at);
    tour.insert(tour.begin() + static_cast<std::ptrdiff_t>(at), city);
    in_tour[city] = true;
    for (std::size_t c = 0; c < n; ++c) to_tour[c] = std::min(to_tour[c], d(c, city));
  }
  return Tour{std::move(tour)};
}

}  // namespace

Tour random_insertion(const TspInstance& instance, std::uint64_t pick_seed,
                      const InsertionObserver& observer) {
  return insertion_impl(instance, Picker{InsertionMode::random, SplitMix64(pick_seed)}, observer);
}

Tour nearest_insertion(const TspInstance& instance, const InsertionObserver& observer) {
  return insertion_impl(instance, Picker{InsertionMode::nearest}, observer);
}

Tour farthest_insertion(const TspInstance& instance, const InsertionObserver& observer) {
  return insertion_impl(instance, Picker{InsertionMode::farthest}, observer);
}

Tour insertion_heuristic(const TspInstance& instance, InsertionMode mode, Rng& rng,
                         const InsertionObserver& observer) {
  switch (mode) {
    case InsertionMode::nearest:
      return nearest_insertion(instance, observer);
    case InsertionMode::farthest:
      return farthest_insertion(instance, observer);
    case InsertionMode::random:
      return random_insertion(instance, rng(), observer);
  }
  throw std::invalid_argument("unknown insertion mode");
}

}  // namespace lmpso::tsp
