#include "lmpso/tsp/adapter.hpp"

#include <cctype>
#include <charconv>

#include "lmpso/swarm/prompt_template.hpp"

namespace lmpso::tsp {
namespace {

std::optional<std::vector<long long>> parse_int_list(std::string_view body) {
  std::vector<long long> out;
  std::size_t i = 0;
  auto skip_sep = [&](bool allow_comma) {
    bool comma = false;
    while (i < body.size()) {
      const char c = body[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == ',' && allow_comma && !comma) {
        comma = true;
        ++i;
      } else {
        break;
      }
    }
  };
  skip_sep(false);
  while (i < body.size()) {
    long long value = 0;
    const char* first = body.data() + i;
    const char* last = body.data() + body.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first) return std::nullopt;
    out.push_back(value);
    i = static_cast<std::size_t>(ptr - body.data());
    const std::size_t before = i;
    skip_sep(true);
    if (i == before && i < body.size()) return std::nullopt;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace

std::optional<std::vector<long long>> extract_last_int_list(std::string_view text) {
  std::optional<std::vector<long long>> last;
  std::size_t pos = 0;
  while ((pos = text.find('[', pos)) != std::string_view::npos) {
    const auto close = text.find(']', pos + 1);
    if (close == std::string_view::npos) break;
    const auto inner_open = text.find('[', pos + 1);
    if (inner_open != std::string_view::npos && inner_open < close) {
      pos = inner_open;
      continue;
    }
    if (auto list = parse_int_list(text.substr(pos + 1, close - pos - 1))) last = std::move(list);
    pos = close + 1;
  }
  return last;
}

TspAdapter::TspAdapter(TspInstance instance, TspPrompts prompts)
    : instance_((instance.validate(), std::move(instance))), dist_(instance_), prompts_(std::move(prompts)) {}

std::string TspAdapter::describe(Rng&) const {
  std::string cities;
  for (std::size_t i = 0; i < instance_.size(); ++i) {
    const auto& p = instance_.coords[i];
    if (i) cities += '\n';
    cities += std::to_string(i) + ": (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
  }
  return swarm::fill_template(prompts_.system,
                              {{"n", std::to_string(instance_.size())}, {"cities", cities}});
}

std::string TspAdapter::initial_position(Rng& rng, llm::ChatBackend&,
                                         const llm::SamplingParams&) const {
  return format_route(random_tour(instance_.size(), rng));
}

swarm::VelocityPrompt TspAdapter::construct_velocity(const swarm::Candidate<Tour>& pbest,
                                                     const swarm::Candidate<Tour>& gbest) const {
  return {swarm::fill_template(prompts_.velocity,
                               {{"pbest", format_route(*pbest.decoded)},
                                {"pbest_length", swarm::format_fixed(pbest.score, 2)},
                                {"gbest", format_route(*gbest.decoded)},
                                {"gbest_length", swarm::format_fixed(gbest.score, 2)}})};
}

llm::MetaPrompt TspAdapter::render(const swarm::RenderInputs& in) const {
  // The assistant turn shows the position in canonical form rather than the
  // raw reply it was decoded from.
  std::string position(in.position);
  if (auto parsed = parse_and_validate(in.position); swarm::is_valid(parsed)) {
    position = format_route(std::get<Tour>(parsed));
  }
  return llm::MetaPrompt::standard(describe(in.rng), std::string(in.inertia), std::move(position),
                                   std::string(in.direction) + "\n" + prompts_.output_format);
}

swarm::Parsed<Tour> TspAdapter::parse_and_validate(std::string_view text) const {
  auto list = extract_last_int_list(text);
  if (!list) return swarm::Violation{swarm::Violation::Kind::parse_failure, "no bracketed list of city indices"};
  const auto n = instance_.size();
  Tour tour;
  for (long long c : *list) {
    if (c < 0) {
      return swarm::Violation{swarm::Violation::Kind::constraint_violation, "negative city index"};
    }
    tour.order.push_back(static_cast<std::size_t>(c));
  }
  if (!is_permutation(tour.order, n)) {
    return swarm::Violation{swarm::Violation::Kind::constraint_violation,
                            "route must contain each of the " + std::to_string(n) +
                                " cities exactly once"};
  }
  return tour;
}

double TspAdapter::evaluate(const Tour& tour) const { return tour_length(dist_, tour); }

}  // namespace lmpso::tsp
