#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lmpso/rng.hpp"
#include "lmpso/swarm/trace.hpp"
#include "lmpso/tsp/instance.hpp"

namespace lmpso::tsp {

/// Ordered list of position transpositions acting on a permutation.
struct SwapSequence {
  std::vector<std::pair<std::size_t, std::size_t>> swaps;

  std::size_t size() const noexcept { return swaps.size(); }
  bool operator==(const SwapSequence&) const = default;
};

/// Applies the swaps in order to a copy of `order`.
std::vector<std::size_t> apply_swaps(const SwapSequence& v, std::vector<std::size_t> order);

/// Swap sequence S with apply_swaps(S, from) == to. Both must be permutations of the
/// same set. At most n - 1 swaps.
SwapSequence diff(const std::vector<std::size_t>& to, const std::vector<std::size_t>& from);

struct SwapPsoConfig {
  std::size_t particles = 10;
  std::size_t iterations = 100;
  /// Probability of keeping each swap of diff(pbest, x).
  double alpha = 0.5;
  /// Probability of keeping each swap of diff(gbest, x).
  double beta = 0.5;
  /// Random swaps in each particle's starting velocity; nullopt means n.
  std::optional<std::size_t> initial_velocity_swaps;
  /// Cap on the carried-over velocity; nullopt means n.
  std::optional<std::size_t> velocity_cap;

  void validate() const;
};

struct SwapPsoResult {
  Tour best;
  double length = 0.0;
  swarm::RunTrace trace;
  /// Position of every particle after each iteration (index 0 = initial).
  std::vector<std::vector<Tour>> positions;
};

/// Classical discrete PSO over permutations:
///   v <- truncate(v) ++ keep(alpha, diff(pbest, x)) ++ keep(beta, diff(gbest, x))
///   x <- apply_swaps(v, x)
/// Bests update immediately after each particle moves; ties keep the incumbent.
SwapPsoResult swap_pso(const TspInstance& instance, const SwapPsoConfig& cfg, Rng& rng);

}  // namespace lmpso::tsp
