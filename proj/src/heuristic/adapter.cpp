#include "lmpso/heuristic/adapter.hpp"

#include <fstream>
#include <sstream>

#include "lmpso/swarm/prompt_template.hpp"

namespace lmpso::heuristic {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string fenced(const std::string& source) { return "```python\n" + source + "\n```"; }

std::string failure_text(const EvalFailure& f) {
  return f.message.empty() ? f.kind : f.kind + ": " + f.message;
}

}  // namespace

std::vector<SeedProgram> load_seeds(const std::filesystem::path& dir) {
  std::vector<SeedProgram> out;
  for (auto name : kSeedNames) {
    const auto path = dir / (std::string(name) + ".py");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read seed program " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    out.push_back({std::string(name), buf.str()});
  }
  return out;
}

std::string extract_code(std::string_view reply) {
  std::string_view best;
  bool found = false;
  std::size_t pos = 0;
  while ((pos = reply.find("```", pos)) != std::string_view::npos) {
    const auto body = reply.find('\n', pos + 3);
    if (body == std::string_view::npos) break;
    const auto close = reply.find("```", body + 1);
    if (close == std::string_view::npos) break;
    const auto block = reply.substr(body + 1, close - body - 1);
    if (!found || block.size() > best.size()) best = block;
    found = true;
    pos = close + 3;
  }
  // Keep indentation of the first line; only strip surrounding blank lines.
  std::string_view code = found ? best : reply;
  while (!code.empty() && (code.front() == '\n' || code.front() == '\r')) code.remove_prefix(1);
  const auto last = code.find_last_not_of(" \t\r\n");
  code = last == std::string_view::npos ? std::string_view{} : code.substr(0, last + 1);
  if (!found) code = trim(code);
  return std::string(code);
}

tsp::TspInstance probe_instance() {
  tsp::TspInstance inst;
  inst.name = "probe10";
  inst.coords = {{12, 85}, {47, 9}, {93, 61}, {5, 33}, {68, 74}, {30, 52}, {81, 18}, {55, 40}, {22, 7}, {74, 97}};
  return inst;
}

std::vector<tsp::TspInstance> benchmark_instances(std::uint64_t seed, std::size_t count, std::size_t cities) {
  std::vector<tsp::TspInstance> out;
  for (std::size_t k = 0; k < count; ++k) {
    auto rng = make_stream(seed, "heuristic.instances", k);
    out.push_back(tsp::generate_instance(cities, rng, "bench" + std::to_string(k)));
  }
  return out;
}

HeuristicAdapter::HeuristicAdapter(std::vector<tsp::TspInstance> instances, EvaluatorPool& evaluator,
                                   std::vector<SeedProgram> seeds, HeuristicOptions options,
                                   HeuristicPrompts prompts)
    : instances_(std::move(instances)),
      evaluator_(evaluator),
      seeds_(std::move(seeds)),
      options_(options),
      prompts_(std::move(prompts)),
      probe_(probe_instance()) {
  if (instances_.empty()) throw std::invalid_argument("heuristic adapter needs at least one instance");
  for (const auto& inst : instances_) inst.validate();
  if (seeds_.empty()) throw std::invalid_argument("heuristic adapter needs at least one seed program");
  if (!(options_.instance_timeout_s > 0.0) || !(options_.probe_timeout_s > 0.0)) {
    throw std::invalid_argument("timeouts must be positive");
  }
}

std::string HeuristicAdapter::describe(Rng&) const {
  return swarm::fill_template(prompts_.system, {{"count", std::to_string(instances_.size())},
                                                {"cities", std::to_string(instances_.front().size())}});
}

std::string HeuristicAdapter::initial_position(Rng& rng, llm::ChatBackend&, const llm::SamplingParams&) const {
  return seeds_[uniform_index(rng, seeds_.size())].source;
}

swarm::VelocityPrompt HeuristicAdapter::construct_velocity(
    const swarm::Candidate<HeuristicProgram>& pbest, const swarm::Candidate<HeuristicProgram>& gbest) const {
  return {swarm::fill_template(prompts_.velocity, {{"pbest", pbest.decoded->source},
                                                   {"pbest_score", swarm::format_fixed(pbest.score, 2)},
                                                   {"gbest", gbest.decoded->source},
                                                   {"gbest_score", swarm::format_fixed(gbest.score, 2)}})};
}

llm::MetaPrompt HeuristicAdapter::render(const swarm::RenderInputs& in) const {
  std::string code = extract_code(in.position);
  std::string position = code.empty() ? std::string(in.position) : fenced(code);
  return llm::MetaPrompt::standard(describe(in.rng), std::string(in.inertia), std::move(position),
                                   std::string(in.direction) + "\n" + prompts_.output_format);
}

swarm::Parsed<HeuristicProgram> HeuristicAdapter::parse_and_validate(std::string_view text) const {
  using Kind = swarm::Violation::Kind;
  HeuristicProgram program;
  program.source = extract_code(text);
  if (program.source.empty()) return swarm::Violation{Kind::parse_failure, "no program text"};
  for (const auto& seed : seeds_) {
    if (trim(seed.source) == trim(program.source)) {
      program.origin = "seed:" + seed.name;
      break;
    }
  }
  ++probes_;
  EvalRequest probe;
  probe.source = program.source;
  probe.instances = {probe_};
  probe.timeout_s = options_.probe_timeout_s;
  probe.return_tours = true;
  const auto response = evaluator_.call(std::move(probe));
  if (!response.ok()) return swarm::Violation{Kind::probe_failure, failure_text(*response.error)};
  return program;
}

double HeuristicAdapter::evaluate(const HeuristicProgram& program) const {
  ++full_;
  EvalRequest req;
  req.source = program.source;
  req.instances = instances_;
  req.timeout_s = options_.instance_timeout_s;
  req.return_tours = true;
  const auto response = evaluator_.call(std::move(req));
  if (!response.ok()) throw swarm::EvaluationError(failure_text(*response.error));
  double total = 0.0;
  for (double len : response.lengths) total += len;
  return total;
}

}  // namespace lmpso::heuristic
