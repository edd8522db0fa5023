#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmpso/llm/chat.hpp"
#include "lmpso/swarm/engine.hpp"
#include "lmpso/tsp/instance.hpp"

namespace lmpso::tsp {

/// Contents of the last "[...]" group in `text` that is a non-empty list of
/// integers separated by commas and/or whitespace. nullopt when there is none.
std::optional<std::vector<long long>> extract_last_int_list(std::string_view text);

/// Prompt wording. Placeholders:
///   system     {n} {cities}
///   velocity   {pbest} {pbest_length} {gbest} {gbest_length}
struct TspPrompts {
  std::string system =
      "You are an optimizer for the Traveling Salesman Problem. There are {n} cities, "
      "given as index: (x, y):\n{cities}\n"
      "Find a route that visits every city exactly once and returns to the start, with "
      "the minimal total Euclidean distance. A route is written as a list of city "
      "indices, for example [0, 1, 2, ...].";
  std::string velocity =
      "Your best route so far is {pbest} (length {pbest_length}). The best route found by "
      "the swarm is {gbest} (length {gbest_length}). Generate a new route that is influenced "
      "by both and shorter than your current route.";
  std::string output_format =
      "Reply with the route only, as one bracketed list containing each city index exactly once.";
};

class TspAdapter {
 public:
  using Solution = Tour;

  explicit TspAdapter(TspInstance instance, TspPrompts prompts = {});

  const TspInstance& instance() const noexcept { return instance_; }

  std::string describe(Rng& rng) const;
  /// Uniformly random permutation in the canonical route format. No model query.
  std::string initial_position(Rng& rng, llm::ChatBackend& backend,
                               const llm::SamplingParams& params) const;
  swarm::VelocityPrompt construct_velocity(const swarm::Candidate<Tour>& pbest,
                                           const swarm::Candidate<Tour>& gbest) const;
  llm::MetaPrompt render(const swarm::RenderInputs& in) const;
  swarm::Parsed<Tour> parse_and_validate(std::string_view text) const;
  double evaluate(const Tour& tour) const;

 private:
  TspInstance instance_;
  DistanceMatrix dist_;
  TspPrompts prompts_;
};

}  // namespace lmpso::tsp
