// Stand-in for the sandbox evaluator. Speaks the frame protocol and scores the
// shipped seed programs with the in-process heuristics. Markers in the source
// text trigger failure modes:
//   FAKE:runtime_error FAKE:syntax FAKE:timeout FAKE:hang FAKE:malformed
//   FAKE:die FAKE:bad_tour FAKE:wrong_id FAKE:count_calls
// Pass --version N to announce a different protocol version.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "lmpso/heuristic/adapter.hpp"
#include "lmpso/heuristic/wire.hpp"
#include "lmpso/tsp/heuristics.hpp"

using namespace lmpso;
using namespace lmpso::heuristic;

namespace {

void send(const nlohmann::json& j) { std::cout << j.dump() << "\n" << std::flush; }
void send(const Frame& f) { std::cout << encode(f) << "\n" << std::flush; }

bool has(const std::string& s, const char* marker) { return s.find(marker) != std::string::npos; }

tsp::Tour solve(const std::string& src, const tsp::TspInstance& inst) {
  if (has(src, "Nearest neighbor")) return tsp::nearest_neighbor(inst);
  if (has(src, "Nearest insertion")) return tsp::nearest_insertion(inst);
  if (has(src, "Farthest insertion")) return tsp::farthest_insertion(inst);
  if (has(src, "Random insertion")) return tsp::random_insertion(inst, kSeedPickSeed);
  tsp::Tour t;
  for (std::size_t i = 0; i < inst.size(); ++i) t.order.push_back(i);
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  int version = kProtocolVersion;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--version") version = std::atoi(argv[i + 1]);
  }
  std::size_t served = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    Frame frame;
    try {
      frame = decode(line);
    } catch (const std::exception& e) {
      std::cerr << "fake evaluator: " << e.what() << "\n";
      return 2;
    }
    if (std::holds_alternative<Hello>(frame)) {
      send(nlohmann::json{{"type", "hello"}, {"version", version}});
      continue;
    }
    if (std::holds_alternative<Shutdown>(frame)) return 0;
    const auto* req = std::get_if<EvalRequest>(&frame);
    if (!req) return 2;
    ++served;
    const auto& src = req->source;
    EvalResponse resp;
    resp.id = req->id;
    if (has(src, "FAKE:malformed")) {
      std::cout << "{not json\n" << std::flush;
      continue;
    }
    if (has(src, "FAKE:die")) return 1;
    if (has(src, "FAKE:hang")) std::this_thread::sleep_for(std::chrono::hours(1));
    if (has(src, "FAKE:wrong_id")) resp.id += 1000;
    if (has(src, "FAKE:timeout")) {
      std::this_thread::sleep_for(std::chrono::duration<double>(req->timeout_s));
      resp.error = EvalFailure{"timeout", "exceeded " + std::to_string(req->timeout_s) + " s"};
    } else if (has(src, "FAKE:runtime_error")) {
      resp.error = EvalFailure{"runtime_error", "ZeroDivisionError: division by zero"};
    } else if (has(src, "FAKE:syntax")) {
      resp.error = EvalFailure{"syntax_error", "invalid syntax"};
    } else if (!has(src, "def solve")) {
      resp.error = EvalFailure{"missing_entry", "no solve(coords) defined"};
    } else {
      std::vector<std::vector<long long>> tours;
      for (const auto& inst : req->instances) {
        auto tour = solve(src, inst);
        if (has(src, "FAKE:bad_tour")) tour.order.assign(inst.size(), 0);
        resp.lengths.push_back(has(src, "FAKE:bad_tour") ? 1.0 : tsp::tour_length(inst, tour));
        tours.emplace_back(tour.order.begin(), tour.order.end());
      }
      if (has(src, "FAKE:count_calls")) resp.lengths.assign(resp.lengths.size(), static_cast<double>(served));
      if (req->return_tours) resp.tours = std::move(tours);
    }
    send(resp);
  }
  return 0;
}
