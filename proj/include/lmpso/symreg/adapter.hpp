#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmpso/llm/chat.hpp"
#include "lmpso/swarm/engine.hpp"
#include "lmpso/symreg/dataset.hpp"
#include "lmpso/symreg/expr.hpp"

namespace lmpso::symreg {

/// Operators named in the prompt. The parser accepts a few more.
inline constexpr std::string_view kAdvertisedOperators =
    "add (+), sub (-), mul (*), div (/), log, sqrt, abs, neg, inv, max, min";

/// Placeholders:
///   system     {dim} {variables} {operators} {samples}
///   velocity   {pbest} {pbest_mae} {gbest} {gbest_mae}
struct SymregPrompts {
  std::string system =
      "You are solving a symbolic regression task. Find a mathematical expression y = f({variables}) "
      "that fits the data points below as closely as possible, measured by mean absolute error.\n"
      "Use these operators if necessary: {operators}. Numeric constants are allowed.\n"
      "Try diverse forms of expressions. Shorter expressions are preferable.\n"
      "Data points:\n{samples}";
  std::string velocity =
      "Your best expression so far is {pbest} (MAE {pbest_mae}). The best expression found by the "
      "swarm is {gbest} (MAE {gbest_mae}). Generate a new, concise expression with a lower MAE, "
      "taking both into account.";
  std::string output_format =
      "Reply with a single expression on the last line, written with the variables {variables}.";
};

struct SymregOptions {
  std::size_t sample_rows = 20;
  std::size_t probe_rows = 5;
  std::size_t max_depth = 30;
  std::size_t max_nodes = 500;
};

/// Expression text found in a model reply: fenced code blocks are searched
/// first, then the whole reply; within each the last parseable line wins.
/// Common decorations ("y =", "f(x) =", labels ending in ':', backticks, '$',
/// a trailing period) are stripped.
struct Extraction {
  std::optional<Expr> expr;
  /// Set when no line parsed but some line was an expression over unknown
  /// variables or functions.
  std::optional<std::string> constraint_error;
  std::string parse_error;
};
Extraction extract_expression(std::string_view reply, std::size_t dim);

class SymregAdapter {
 public:
  using Solution = Expr;

  explicit SymregAdapter(Dataset data, SymregOptions options = {}, SymregPrompts prompts = {});

  const Dataset& dataset() const noexcept { return data_; }
  const SymregOptions& options() const noexcept { return options_; }

  /// Row indices of a fresh random sample (without replacement, in draw order).
  std::vector<std::size_t> sample_indices(Rng& rng) const;
  std::string format_samples(const std::vector<std::size_t>& rows) const;
  /// Rows used by the validation probe: evenly spaced over the dataset.
  const std::vector<std::size_t>& probe_indices() const noexcept { return probe_; }

  std::string describe(Rng& rng) const;
  /// One model query with the task description and the bootstrap instruction.
  std::string initial_position(Rng& rng, llm::ChatBackend& backend,
                               const llm::SamplingParams& params) const;
  swarm::VelocityPrompt construct_velocity(const swarm::Candidate<Expr>& pbest,
                                           const swarm::Candidate<Expr>& gbest) const;
  llm::MetaPrompt render(const swarm::RenderInputs& in) const;
  swarm::Parsed<Expr> parse_and_validate(std::string_view text) const;
  /// Mean absolute error over the full dataset.
  double evaluate(const Expr& expr) const;

 private:
  std::string output_format() const;

  Dataset data_;
  SymregOptions options_;
  SymregPrompts prompts_;
  std::vector<std::size_t> probe_;
  std::string variables_;
};

}  // namespace lmpso::symreg
