#include "lmpso/tsp/instance.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lmpso::tsp {

void TspInstance::validate() const {
  if (coords.size() < 2) throw std::invalid_argument("instance needs at least 2 cities");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& p = coords[i];
    if (p.x < kCoordMin || p.x > kCoordMax || p.y < kCoordMin || p.y > kCoordMax) {
      throw std::invalid_argument("city " + std::to_string(i) + " outside [0,100]^2");
    }
  }
  if (reference_optimum && !(*reference_optimum > 0.0)) {
    throw std::invalid_argument("reference optimum must be positive");
  }
}

double euclidean(Point a, Point b) noexcept {
  const double dx = static_cast<double>(a.x - b.x);
  const double dy = static_cast<double>(a.y - b.y);
  return std::sqrt(dx * dx + dy * dy);
}

DistanceMatrix::DistanceMatrix(const TspInstance& instance)
    : n_(instance.size()), d_(n_ * n_, 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = euclidean(instance.coords[i], instance.coords[j]);
      d_[i * n_ + j] = d;
      d_[j * n_ + i] = d;
    }
  }
}

TspInstance generate_instance(std::size_t n, Rng& rng, std::string name) {
  if (n < 2) throw std::invalid_argument("instance needs at least 2 cities");
  TspInstance inst;
  inst.name = name.empty() ? "random" + std::to_string(n) : std::move(name);
  inst.coords.reserve(n);
  constexpr std::size_t span = kCoordMax - kCoordMin + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const int x = kCoordMin + static_cast<int>(uniform_index(rng, span));
    const int y = kCoordMin + static_cast<int>(uniform_index(rng, span));
    inst.coords.push_back({x, y});
  }
  return inst;
}

bool is_permutation(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto c : order) {
    if (c >= n || seen[c]) return false;
    seen[c] = true;
  }
  return true;
}

double tour_length(const DistanceMatrix& dist, const Tour& tour) {
  const auto n = dist.size();
  if (!is_permutation(tour.order, n)) {
    throw InvalidTour("tour is not a permutation of 0.." + std::to_string(n - 1));
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) total += dist(tour.order[k], tour.order[k + 1]);
  total += dist(tour.order[n - 1], tour.order[0]);
  return total;
}

double tour_length(const TspInstance& instance, const Tour& tour) {
  return tour_length(DistanceMatrix(instance), tour);
}

std::string format_route(const Tour& tour) {
  std::string out = "[";
  for (std::size_t k = 0; k < tour.order.size(); ++k) {
    if (k) out += ", ";
    out += std::to_string(tour.order[k]);
  }
  out += ']';
  return out;
}

Tour random_tour(std::size_t n, Rng& rng) {
  Tour t;
  t.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(t.order[i - 1], t.order[uniform_index(rng, i)]);
  return t;
}

TspInstance read_instance_text(std::istream& in, std::string name) {
  TspInstance inst;
  inst.name = std::move(name);
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw std::runtime_error("instance file is empty");
  long long n = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> n) || n < 2) throw std::runtime_error("line 1: expected city count >= 2");
  }
  for (long long i = 0; i < n; ++i) {
    if (!next_line()) throw std::runtime_error("expected " + std::to_string(n) + " coordinate lines");
    std::istringstream ls(line);
    Point p;
    if (!(ls >> p.x >> p.y)) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected \"x y\"");
    }
    inst.coords.push_back(p);
  }
  if (next_line()) {
    std::istringstream ls(line);
    std::string tag;
    double opt = 0.0;
    if (!(ls >> tag >> opt) || tag != "OPT") {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected \"OPT <real>\"");
    }
    inst.reference_optimum = opt;
  }
  inst.validate();
  return inst;
}

void write_instance_text(std::ostream& out, const TspInstance& instance) {
  out << instance.size() << '\n';
  for (const auto& p : instance.coords) out << p.x << ' ' << p.y << '\n';
  if (instance.reference_optimum) {
    std::ostringstream opt;
    opt.precision(17);
    opt << *instance.reference_optimum;
    out << "OPT " << opt.str() << '\n';
  }
}

nlohmann::json instance_to_json(const TspInstance& instance) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& p : instance.coords) coords.push_back({p.x, p.y});
  nlohmann::json j{{"name", instance.name}, {"coords", std::move(coords)}};
  j["opt"] = instance.reference_optimum ? nlohmann::json(*instance.reference_optimum)
                                        : nlohmann::json(nullptr);
  return j;
}

TspInstance instance_from_json(const nlohmann::json& j) {
  TspInstance inst;
  inst.name = j.value("name", std::string{});
  for (const auto& c : j.at("coords")) {
    if (!c.is_array() || c.size() != 2) throw std::invalid_argument("coords entries must be [x, y]");
    inst.coords.push_back({c[0].get<int>(), c[1].get<int>()});
  }
  if (j.contains("opt") && !j["opt"].is_null()) inst.reference_optimum = j["opt"].get<double>();
  inst.validate();
  return inst;
}

TspInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  if (path.extension() == ".json") {
    auto inst = instance_from_json(nlohmann::json::parse(in));
    if (inst.name.empty()) inst.name = path.stem().string();
    return inst;
  }
  return read_instance_text(in, path.stem().string());
}

}  // namespace lmpso::tsp
