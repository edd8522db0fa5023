#include "lmpso/swarm/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lmpso/swarm/types.hpp"

namespace lmpso::swarm {

std::string_view to_string(Violation::Kind kind) noexcept {
  switch (kind) {
    case Violation::Kind::parse_failure:
      return "parse_failure";
    case Violation::Kind::constraint_violation:
      return "constraint_violation";
    case Violation::Kind::probe_failure:
      return "probe_failure";
    case Violation::Kind::evaluation_error:
      return "evaluation_error";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::initialized:
      return "initialized";
    case EventKind::accepted:
      return "accepted";
    case EventKind::retried:
      return "retried";
    case EventKind::reinitialized:
      return "reinitialized";
    case EventKind::evaluation_error:
      return "evaluation_error";
  }
  return "unknown";
}

EventKind event_kind_from_string(std::string_view name) {
  for (auto k : {EventKind::initialized, EventKind::accepted, EventKind::retried,
                 EventKind::reinitialized, EventKind::evaluation_error}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown event kind: " + std::string(name));
}

namespace {

nlohmann::json record_to_json(const IterationRecord& rec) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : rec.events) {
    nlohmann::json je{{"particle", e.particle},
                      {"kind", std::string(to_string(e.kind))},
                      {"retries", e.retries}};
    je["score"] = e.score ? nlohmann::json(*e.score) : nlohmann::json(nullptr);
    je["position"] = e.position;
    events.push_back(std::move(je));
  }
  return {{"iter", rec.iter},
          {"gbest_score", rec.gbest_score},
          {"gbest_text", rec.gbest_text},
          {"events", std::move(events)}};
}

IterationRecord record_from_json(const nlohmann::json& j) {
  IterationRecord rec;
  rec.iter = j.at("iter").get<std::size_t>();
  rec.gbest_score = j.at("gbest_score").get<double>();
  rec.gbest_text = j.at("gbest_text").get<std::string>();
  for (const auto& je : j.at("events")) {
    ParticleEvent e;
    e.particle = je.at("particle").get<std::size_t>();
    e.kind = event_kind_from_string(je.at("kind").get<std::string>());
    e.retries = je.at("retries").get<std::size_t>();
    if (je.contains("score") && !je["score"].is_null()) e.score = je["score"].get<double>();
    e.position = je.value("position", std::string{});
    rec.events.push_back(std::move(e));
  }
  return rec;
}

}  // namespace

void write_jsonl(std::ostream& out, const RunTrace& trace) {
  out << record_to_json(trace.initialization).dump() << '\n';
  for (const auto& rec : trace.per_iteration) out << record_to_json(rec).dump() << '\n';
}

std::string to_jsonl(const RunTrace& trace) {
  std::ostringstream out;
  write_jsonl(out, trace);
  return out.str();
}

RunTrace read_jsonl(std::istream& in) {
  RunTrace trace;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    IterationRecord rec;
    try {
      rec = record_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    if (first) {
      if (rec.iter != 0) throw std::runtime_error("trace must start with the iter 0 record");
      trace.initialization = std::move(rec);
      first = false;
    } else {
      trace.per_iteration.push_back(std::move(rec));
    }
  }
  if (first) throw std::runtime_error("empty trace");
  return trace;
}

}  // namespace lmpso::swarm
