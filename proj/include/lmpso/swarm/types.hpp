#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "lmpso/llm/chat.hpp"

namespace lmpso::swarm {

/// Why a model reply could not become a position.
struct Violation {
  enum class Kind { parse_failure, constraint_violation, probe_failure, evaluation_error };
  Kind kind;
  std::string message;
};

std::string_view to_string(Violation::Kind kind) noexcept;

/// Result of decoding a reply: the solution, or the reason it was rejected.
template <class S>
using Parsed = std::variant<S, Violation>;

template <class S>
bool is_valid(const Parsed<S>& p) noexcept {
  return std::holds_alternative<S>(p);
}

/// A scored position. `score` is finite whenever `decoded` is present;
/// lower is better.
template <class S>
struct Candidate {
  std::string text;
  std::optional<S> decoded;
  double score = std::numeric_limits<double>::infinity();

  bool has_solution() const noexcept { return decoded.has_value() && std::isfinite(score); }
};

/// Natural-language instruction describing how the next position is generated.
struct VelocityPrompt {
  std::string text;
};

inline constexpr std::string_view kBootstrapVelocity = "Generate a position randomly";

struct SwarmConfig {
  std::size_t num_particles = 10;
  std::size_t max_iterations = 100;
  std::size_t retry_limit = 3;
  std::uint64_t rng_seed = 0;
  /// When false the engine negates adapter scores so it can always minimize.
  bool minimize = true;
  /// Query the model for all particles of an iteration in parallel.
  bool concurrent = false;
  std::string bootstrap_velocity{kBootstrapVelocity};
  llm::SamplingParams sampling;

  void validate() const {
    if (num_particles < 1) throw std::invalid_argument("num_particles must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (bootstrap_velocity.empty()) throw std::invalid_argument("bootstrap velocity must be non-empty");
    sampling.validate();
  }
};

/// Thrown by adapters when scoring fails for reasons other than the reply
/// itself (e.g. an external evaluator died). The engine treats the reply as
/// invalid and follows the retry/reinitialize rule.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AdapterInitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lmpso::swarm
