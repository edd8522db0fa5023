#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lmpso/heuristic/evaluator_client.hpp"
#include "lmpso/llm/chat.hpp"
#include "lmpso/swarm/engine.hpp"
#include "lmpso/tsp/instance.hpp"

namespace lmpso::heuristic {

/// Seed for the random-insertion seed program's pick generator. The shipped
/// ri.py hardcodes the same value.
inline constexpr std::uint64_t kSeedPickSeed = 12345;

/// Shipped starting programs, in the order nn, ni, fi, ri.
inline constexpr std::string_view kSeedNames[] = {"nn", "ni", "fi", "ri"};

struct SeedProgram {
  std::string name;
  std::string source;
};

/// Reads <dir>/{nn,ni,fi,ri}.py. Throws std::runtime_error when one is missing.
std::vector<SeedProgram> load_seeds(const std::filesystem::path& dir);

struct HeuristicProgram {
  std::string source;
  std::string language = "python";
  /// "seed:<name>" when the source is one of the seeds verbatim, else "generated".
  std::string origin = "generated";

  bool operator==(const HeuristicProgram&) const = default;
};

/// Largest fenced code block of the reply, or the whole trimmed reply when
/// there is no fence.
std::string extract_code(std::string_view reply);

/// Fixed 10-city instance used to reject broken programs cheaply.
tsp::TspInstance probe_instance();

/// Five 100-city instances from the "heuristic.instances" substream of `seed`.
std::vector<tsp::TspInstance> benchmark_instances(std::uint64_t seed, std::size_t count = 5,
                                                  std::size_t cities = 100);

struct HeuristicOptions {
  double instance_timeout_s = 30.0;
  double probe_timeout_s = 5.0;
};

/// Placeholders:
///   system     {count} {cities}
///   velocity   {pbest} {pbest_score} {gbest} {gbest_score}
struct HeuristicPrompts {
  std::string system =
      "You design construction heuristics for the Traveling Salesman Problem, written in Python. "
      "A program must define solve(coords), where coords is a list of (x, y) integer pairs, and "
      "return a list with every city index exactly once (the route returns to its start). "
      "A program is scored by running it on {count} instances of {cities} cities each; the score "
      "is the sum of the resulting route lengths, and lower is better. Only the Python standard "
      "library math module may be imported.";
  std::string velocity =
      "Your best program so far (total distance {pbest_score}):\n```python\n{pbest}\n```\n"
      "The best program found by the swarm (total distance {gbest_score}):\n```python\n{gbest}\n```\n"
      "Write an improved heuristic program that yields a lower total distance, drawing on both.";
  std::string output_format = "Reply with the complete program in a single ```python fenced block.";
};

class HeuristicAdapter {
 public:
  using Solution = HeuristicProgram;

  HeuristicAdapter(std::vector<tsp::TspInstance> instances, EvaluatorPool& evaluator,
                   std::vector<SeedProgram> seeds, HeuristicOptions options = {},
                   HeuristicPrompts prompts = {});

  const std::vector<tsp::TspInstance>& instances() const noexcept { return instances_; }
  const std::vector<SeedProgram>& seeds() const noexcept { return seeds_; }

  std::string describe(Rng& rng) const;
  /// One of the seed programs, uniformly. No model query.
  std::string initial_position(Rng& rng, llm::ChatBackend& backend,
                               const llm::SamplingParams& params) const;
  swarm::VelocityPrompt construct_velocity(const swarm::Candidate<HeuristicProgram>& pbest,
                                           const swarm::Candidate<HeuristicProgram>& gbest) const;
  llm::MetaPrompt render(const swarm::RenderInputs& in) const;
  /// Extracts the program and runs it on the probe instance. Evaluator
  /// failures surface as EvaluationError.
  swarm::Parsed<HeuristicProgram> parse_and_validate(std::string_view text) const;
  /// Sum of route lengths over all instances.
  double evaluate(const HeuristicProgram& program) const;

  std::size_t probe_calls() const noexcept { return probes_.load(); }
  std::size_t full_evaluations() const noexcept { return full_.load(); }

 private:
  std::vector<tsp::TspInstance> instances_;
  EvaluatorPool& evaluator_;
  std::vector<SeedProgram> seeds_;
  HeuristicOptions options_;
  HeuristicPrompts prompts_;
  tsp::TspInstance probe_;
  mutable std::atomic<std::size_t> probes_{0};
  mutable std::atomic<std::size_t> full_{0};
};

}  // namespace lmpso::heuristic
