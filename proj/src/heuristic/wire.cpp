#include "lmpso/heuristic/wire.hpp"

#include <cmath>

namespace lmpso::heuristic {
namespace {

using nlohmann::json;

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ProtocolError(std::string("frame lacks '") + name + "'");
  return *it;
}

EvalResponse response_from_json(const json& j) {
  EvalResponse r;
  r.id = field(j, "id").get<std::uint64_t>();
  if (auto e = j.find("error"); e != j.end() && !e->is_null()) {
    r.error = EvalFailure{field(*e, "kind").get<std::string>(), e->value("message", std::string{})};
    return r;
  }
  for (const auto& v : field(j, "lengths")) {
    if (!v.is_number()) throw ProtocolError("non-numeric length");
    r.lengths.push_back(v.get<double>());
  }
  if (auto t = j.find("tours"); t != j.end() && !t->is_null()) {
    r.tours = t->get<std::vector<std::vector<long long>>>();
  }
  return r;
}

EvalRequest request_from_json(const json& j) {
  EvalRequest r;
  r.id = field(j, "id").get<std::uint64_t>();
  r.source = field(j, "source").get<std::string>();
  for (const auto& inst : field(j, "instances")) r.instances.push_back(tsp::instance_from_json(inst));
  r.timeout_s = field(j, "timeout_s").get<double>();
  r.return_tours = j.value("return_tours", false);
  return r;
}

}  // namespace

json to_json(const Frame& frame) {
  return std::visit(
      Overload{
          [](const Hello& h) { return json{{"type", "hello"}, {"version", h.version}}; },
          [](const Shutdown& s) { return json{{"type", "shutdown"}, {"version", s.version}}; },
          [](const EvalRequest& r) {
            json instances = json::array();
            for (const auto& inst : r.instances) instances.push_back(tsp::instance_to_json(inst));
            return json{{"type", "eval_request"}, {"version", kProtocolVersion},
                        {"id", r.id},            {"source", r.source},
                        {"instances", instances}, {"timeout_s", r.timeout_s},
                        {"return_tours", r.return_tours}};
          },
          [](const EvalResponse& r) {
            json j{{"type", "eval_response"}, {"version", kProtocolVersion}, {"id", r.id}};
            if (r.error) {
              j["error"] = {{"kind", r.error->kind}, {"message", r.error->message}};
            } else {
              j["lengths"] = r.lengths;
              if (r.tours) j["tours"] = *r.tours;
            }
            return j;
          },
      },
      frame);
}

std::string encode(const Frame& frame) { return to_json(frame).dump(); }

Frame decode(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("frame is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("frame is not a JSON object");
  try {
    const auto& version = field(j, "version");
    if (!version.is_number_integer()) throw ProtocolError("version must be an integer");
    if (version.get<int>() != kProtocolVersion) {
      throw VersionMismatch("peer protocol version " + version.dump() + ", expected " +
                            std::to_string(kProtocolVersion));
    }
    const auto type = field(j, "type").get<std::string>();
    if (type == "hello") return Hello{};
    if (type == "shutdown") return Shutdown{};
    if (type == "eval_request") return request_from_json(j);
    if (type == "eval_response") return response_from_json(j);
    throw ProtocolError("unknown frame type '" + type + "'");
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad frame: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("bad instance in frame: ") + e.what());
  }
}

}  // namespace lmpso::heuristic
