#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmpso/swarm/types.hpp"

namespace lmpso::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BackendConfig {
  std::string type = "http";  // http | mock
  std::optional<std::filesystem::path> mock_script;
};

struct SwapPsoParams {
  std::size_t particles = 10;
  std::size_t iterations = 100;
  double alpha = 0.5;
  double beta = 0.5;
};

struct TspSettings {
  std::size_t cities = 10;
  std::size_t layouts = 5;
  /// Subset of nn, ni, fi, ri, swap_pso, lmpso, reported in this order.
  std::vector<std::string> methods{"nn", "ni", "fi", "ri", "swap_pso", "lmpso"};
  /// Instance files used instead of generated layouts when non-empty.
  std::vector<std::filesystem::path> instance_files;
  SwapPsoParams swap_pso;
};

struct SyntheticData {
  std::string expr;
  std::size_t dim = 2;
  std::size_t rows = 200;
  double low = 0.0;
  double high = 20.0;
};

struct SymregSettings {
  std::optional<std::filesystem::path> dataset;
  std::optional<SyntheticData> synthetic;
  std::size_t runs = 5;
  std::size_t sample_rows = 20;
  std::size_t probe_rows = 5;
  std::size_t max_depth = 30;
  std::size_t max_nodes = 500;
};

struct HeuristicSettings {
  std::vector<std::string> evaluator{"sandbox-evaluator"};
  std::optional<std::filesystem::path> policy;
  std::filesystem::path seeds_dir;
  std::size_t instances = 5;
  std::size_t cities = 100;
  double instance_timeout_s = 30.0;
  double probe_timeout_s = 5.0;
  /// Score the four seed programs and stop, without running the swarm.
  bool seed_only = false;
};

/// Everything one experiment needs. All randomness derives from `seed`
/// through named substreams.
struct RunConfig {
  std::string kind = "tsp10";  // tsp10 | tsp20 | tsp30 | heuristic | symreg
  std::uint64_t seed = 0;
  BackendConfig backend;
  swarm::SwarmConfig swarm;
  std::filesystem::path out = "out";
  bool no_gap = false;
  TspSettings tsp;
  SymregSettings symreg;
  HeuristicSettings heuristic;

  bool is_tsp() const { return kind.rfind("tsp", 0) == 0; }
  void validate() const;
};

/// Defaults for a problem kind: iterations, particles and max new tokens per
/// kind, temperature 0.9. Throws ConfigError for unknown kinds.
RunConfig defaults_for(const std::string& kind);

/// Defaults for j["kind"], then every key present in `j` overrides them.
/// Relative paths are resolved against `base_dir`. Unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Effective configuration, suitable for config_from_json.
nlohmann::json to_json(const RunConfig& cfg);

/// Command-line layer applied on top of a loaded config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<std::filesystem::path> mock_script;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> particles;
  std::optional<int> max_tokens;
  std::optional<double> temperature;
  std::optional<std::filesystem::path> out;
  bool no_gap = false;
};
void apply(RunConfig& cfg, const Overrides& o);

}  // namespace lmpso::app
