#include "lmpso/symreg/adapter.hpp"

#include <cctype>
#include <cstdio>
#include <numeric>

#include "lmpso/swarm/prompt_template.hpp"
#include "lmpso/symreg/eval.hpp"
#include "lmpso/symreg/metrics.hpp"

namespace lmpso::symreg {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> lines_of(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto nl = s.find('\n', pos);
    out.push_back(s.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string_view> fenced_blocks(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while ((pos = s.find("```", pos)) != std::string_view::npos) {
    auto body = s.find('\n', pos + 3);
    if (body == std::string_view::npos) break;
    const auto close = s.find("```", body + 1);
    if (close == std::string_view::npos) break;
    out.push_back(s.substr(body + 1, close - body - 1));
    pos = close + 3;
  }
  return out;
}

std::string clean_line(std::string_view line) {
  std::string s;
  for (char c : trim(line)) {
    if (c != '`' && c != '$') s += c;
  }
  std::string_view v = trim(s);
  // Label or left-hand side: keep what follows the last ':' or '='.
  for (char sep : {':', '='}) {
    if (const auto p = v.rfind(sep); p != std::string_view::npos) v = trim(v.substr(p + 1));
  }
  while (!v.empty() && (v.back() == '.' || v.back() == ';' || v.back() == ',')) {
    v.remove_suffix(1);
    v = trim(v);
  }
  // Markdown list bullets.
  if (v.size() > 2 && (v[0] == '*' || v[0] == '-') && v[1] == ' ') v = trim(v.substr(2));
  return std::string(v);
}

bool is_variable_name(std::string_view id) {
  if (id.empty() || (id[0] != 'x' && id[0] != 'X')) return false;
  id.remove_prefix(1);
  if (!id.empty() && id[0] == '_') id.remove_prefix(1);
  if (id.empty()) return false;
  for (char c : id) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string identifier_at(std::string_view s, std::size_t pos) {
  std::size_t end = pos;
  while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_')) ++end;
  return std::string(s.substr(pos, end - pos));
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Extraction extract_expression(std::string_view reply, std::size_t dim) {
  Extraction out;
  auto scan = [&](std::string_view region) {
    const auto lines = lines_of(region);
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
      const std::string line = clean_line(*it);
      if (line.empty()) continue;
      try {
        out.expr = parse_expr(line, dim);
        return true;
      } catch (const ExprError& e) {
        const bool expression_like =
            e.kind() == ExprError::Kind::unknown_function ||
            (e.kind() == ExprError::Kind::unknown_variable && is_variable_name(identifier_at(line, e.position())));
        if (expression_like) {
          if (!out.constraint_error) out.constraint_error = e.what();
        } else if (out.parse_error.empty()) {
          out.parse_error = e.what();
        }
      }
    }
    return false;
  };
  for (auto block : fenced_blocks(reply)) {
    if (scan(block)) return out;
  }
  if (scan(reply)) return out;
  if (out.parse_error.empty()) out.parse_error = "no expression found";
  return out;
}

SymregAdapter::SymregAdapter(Dataset data, SymregOptions options, SymregPrompts prompts)
    : data_((data.validate(), std::move(data))), options_(options), prompts_(std::move(prompts)) {
  if (options_.sample_rows == 0) throw std::invalid_argument("sample_rows must be >= 1");
  const std::size_t rows = data_.rows();
  const std::size_t k = std::min(options_.probe_rows, rows);
  for (std::size_t j = 0; j < k; ++j) {
    probe_.push_back(k == 1 ? 0 : j * (rows - 1) / (k - 1));
  }
  for (std::size_t c = 0; c < data_.dim; ++c) {
    if (c) variables_ += ", ";
    variables_ += "x" + std::to_string(c);
  }
}

std::vector<std::size_t> SymregAdapter::sample_indices(Rng& rng) const {
  std::vector<std::size_t> idx(data_.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t k = std::min(options_.sample_rows, idx.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
  }
  idx.resize(k);
  return idx;
}

std::string SymregAdapter::format_samples(const std::vector<std::size_t>& rows) const {
  std::string out;
  for (std::size_t r : rows) {
    out += "(";
    const auto x = data_.row(r);
    for (std::size_t c = 0; c < data_.dim; ++c) {
      if (c) out += ", ";
      out += "x" + std::to_string(c) + "=" + swarm::format_number(x[c]);
    }
    out += ") -> y=" + swarm::format_number(data_.y[r]) + "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string SymregAdapter::describe(Rng& rng) const {
  return swarm::fill_template(prompts_.system, {{"dim", std::to_string(data_.dim)},
                                                {"variables", variables_},
                                                {"operators", std::string(kAdvertisedOperators)},
                                                {"samples", format_samples(sample_indices(rng))}});
}

std::string SymregAdapter::output_format() const {
  return swarm::fill_template(prompts_.output_format, {{"variables", variables_}});
}

std::string SymregAdapter::initial_position(Rng& rng, llm::ChatBackend& backend,
                                            const llm::SamplingParams& params) const {
  llm::Conversation conv{{llm::Role::system, describe(rng)},
                         {llm::Role::user, std::string(swarm::kBootstrapVelocity) + "\n" + output_format()}};
  return backend.complete(conv, params);
}

swarm::VelocityPrompt SymregAdapter::construct_velocity(const swarm::Candidate<Expr>& pbest,
                                                        const swarm::Candidate<Expr>& gbest) const {
  return {swarm::fill_template(prompts_.velocity, {{"pbest", to_string(*pbest.decoded)},
                                                   {"pbest_mae", short_number(pbest.score)},
                                                   {"gbest", to_string(*gbest.decoded)},
                                                   {"gbest_mae", short_number(gbest.score)}})};
}

llm::MetaPrompt SymregAdapter::render(const swarm::RenderInputs& in) const {
  std::string position(in.position);
  if (auto parsed = extract_expression(in.position, data_.dim); parsed.expr) {
    position = to_string(*parsed.expr);
  }
  return llm::MetaPrompt::standard(describe(in.rng), std::string(in.inertia), std::move(position),
                                   std::string(in.direction) + "\n" + output_format());
}

swarm::Parsed<Expr> SymregAdapter::parse_and_validate(std::string_view text) const {
  using Kind = swarm::Violation::Kind;
  auto found = extract_expression(text, data_.dim);
  if (!found.expr) {
    if (found.constraint_error) return swarm::Violation{Kind::constraint_violation, *found.constraint_error};
    return swarm::Violation{Kind::parse_failure, found.parse_error};
  }
  Expr expr = std::move(*found.expr);
  if (expr.depth() > options_.max_depth) {
    return swarm::Violation{Kind::constraint_violation,
                            "expression deeper than " + std::to_string(options_.max_depth)};
  }
  if (expr.size() > options_.max_nodes) {
    return swarm::Violation{Kind::constraint_violation,
                            "expression longer than " + std::to_string(options_.max_nodes) + " nodes"};
  }
  const CompiledExpr f(expr);
  std::size_t clean = 0;
  for (std::size_t r : probe_) {
    EvalNotes notes;
    f(data_.row(r), &notes);
    if (notes.fallbacks() == 0) ++clean;
  }
  if (!probe_.empty() && clean == 0) {
    return swarm::Violation{Kind::probe_failure, "every probe row needed a protected-operator fallback"};
  }
  return expr;
}

double SymregAdapter::evaluate(const Expr& expr) const {
  return mean_absolute_error(CompiledExpr(expr), data_);
}

}  // namespace lmpso::symreg
