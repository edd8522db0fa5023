#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmpso/rng.hpp"

namespace lmpso::tsp {

inline constexpr int kCoordMin = 0;
inline constexpr int kCoordMax = 100;

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

struct TspInstance {
  std::string name;
  std::vector<Point> coords;
  std::optional<double> reference_optimum;

  std::size_t size() const noexcept { return coords.size(); }
  /// Throws std::invalid_argument unless n >= 2 and all coordinates are in [0, 100].
  void validate() const;
};

/// A closed tour: permutation of 0..n-1, the closing edge is implicit.
struct Tour {
  std::vector<std::size_t> order;

  std::size_t size() const noexcept { return order.size(); }
  bool operator==(const Tour&) const = default;
};

class InvalidTour : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense symmetric Euclidean distances, double precision, no rounding.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(const TspInstance& instance);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

double euclidean(Point a, Point b) noexcept;

/// n points drawn uniformly from the integer grid {0..100}^2.
TspInstance generate_instance(std::size_t n, Rng& rng, std::string name = {});

bool is_permutation(std::span<const std::size_t> order, std::size_t n);

/// Sum of edge lengths including the edge back to the start. Throws InvalidTour.
double tour_length(const TspInstance& instance, const Tour& tour);
double tour_length(const DistanceMatrix& dist, const Tour& tour);

/// "[c0, c1, ..., c(n-1)]", zero-based.
std::string format_route(const Tour& tour);

/// Uniformly random permutation (Fisher-Yates over uniform_index).
Tour random_tour(std::size_t n, Rng& rng);

// Plain-text form: line 1 "n", then n lines "x y", optional trailing "OPT <real>".
TspInstance read_instance_text(std::istream& in, std::string name = {});
void write_instance_text(std::ostream& out, const TspInstance& instance);

// JSON form: {"name": ..., "coords": [[x, y], ...], "opt": <real> | null}.
nlohmann::json instance_to_json(const TspInstance& instance);
TspInstance instance_from_json(const nlohmann::json& j);

/// Reads either form; ".json" selects the JSON form.
TspInstance load_instance(const std::filesystem::path& path);

}  // namespace lmpso::tsp
