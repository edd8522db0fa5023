#include "lmpso/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "lmpso/llm/chat.hpp"

namespace lmpso::app {
namespace {

using nlohmann::json;

struct Defaults {
  const char* kind;
  std::size_t iterations;
  std::size_t particles;
  std::size_t cities;
};

constexpr Defaults kDefaults[] = {
    {"tsp10", 100, 10, 10}, {"tsp20", 100, 10, 20}, {"tsp30", 100, 10, 30},
    {"heuristic", 40, 25, 0}, {"symreg", 50, 80, 0},
};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

void RunConfig::validate() const {
  swarm.validate();
  if (backend.type != "http" && backend.type != "mock") {
    throw ConfigError("backend must be 'http' or 'mock', got '" + backend.type + "'");
  }
  if (backend.type == "mock" && !backend.mock_script) throw ConfigError("mock backend needs a script");
  if (is_tsp()) {
    if (tsp.cities < 3 && tsp.instance_files.empty()) throw ConfigError("tsp.cities must be >= 3");
    if (tsp.layouts < 1 && tsp.instance_files.empty()) throw ConfigError("tsp.layouts must be >= 1");
    static const std::set<std::string> known{"nn", "ni", "fi", "ri", "swap_pso", "lmpso"};
    for (const auto& m : tsp.methods) {
      if (!known.count(m)) throw ConfigError("unknown tsp method '" + m + "'");
    }
  } else if (kind == "symreg") {
    if (!symreg.dataset && !symreg.synthetic) throw ConfigError("symreg needs 'dataset' or 'synthetic'");
    if (symreg.runs < 1) throw ConfigError("symreg.runs must be >= 1");
  } else if (kind == "heuristic") {
    if (heuristic.evaluator.empty()) throw ConfigError("heuristic.evaluator command is empty");
    if (heuristic.instances < 1 || heuristic.cities < 3) throw ConfigError("heuristic instances need >= 3 cities");
  } else {
    throw ConfigError("unknown problem kind '" + kind + "'");
  }
}

RunConfig defaults_for(const std::string& kind) {
  for (const auto& d : kDefaults) {
    if (kind != d.kind) continue;
    RunConfig cfg;
    cfg.kind = kind;
    cfg.swarm.max_iterations = d.iterations;
    cfg.swarm.num_particles = d.particles;
    cfg.swarm.sampling = llm::default_params(kind);
    cfg.tsp.cities = d.cities ? d.cities : cfg.tsp.cities;
    cfg.out = std::filesystem::path("out") / kind;
#ifdef LMPSO_DATA_DIR
    cfg.heuristic.seeds_dir = std::filesystem::path(LMPSO_DATA_DIR) / "seeds";
#else
    cfg.heuristic.seeds_dir = "data/seeds";
#endif
    return cfg;
  }
  throw ConfigError("unknown problem kind '" + kind + "'");
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base) {
  check_keys(j, {"kind", "seed", "backend", "swarm", "sampling", "out", "no_gap", "tsp", "symreg", "heuristic"},
             "config");
  if (!j.contains("kind")) throw ConfigError("config lacks 'kind'");
  try {
    RunConfig cfg = defaults_for(j.at("kind").get<std::string>());
    read(j, "seed", cfg.seed);
    read(j, "no_gap", cfg.no_gap);
    if (auto it = j.find("out"); it != j.end()) cfg.out = resolve(base, it->get<std::string>());
    if (auto it = j.find("backend"); it != j.end()) {
      check_keys(*it, {"type", "mock_script"}, "backend");
      read(*it, "type", cfg.backend.type);
      if (it->contains("mock_script")) cfg.backend.mock_script = resolve(base, it->at("mock_script").get<std::string>());
    }
    if (auto it = j.find("swarm"); it != j.end()) {
      check_keys(*it, {"particles", "iterations", "retry_limit", "concurrent"}, "swarm");
      read(*it, "particles", cfg.swarm.num_particles);
      read(*it, "iterations", cfg.swarm.max_iterations);
      read(*it, "retry_limit", cfg.swarm.retry_limit);
      read(*it, "concurrent", cfg.swarm.concurrent);
    }
    if (auto it = j.find("sampling"); it != j.end()) {
      check_keys(*it, {"temperature", "max_new_tokens", "model"}, "sampling");
      read(*it, "temperature", cfg.swarm.sampling.temperature);
      read(*it, "max_new_tokens", cfg.swarm.sampling.max_new_tokens);
      read(*it, "model", cfg.swarm.sampling.model_name);
    }
    if (auto it = j.find("tsp"); it != j.end()) {
      check_keys(*it, {"cities", "layouts", "methods", "instances", "swap_pso"}, "tsp");
      read(*it, "cities", cfg.tsp.cities);
      read(*it, "layouts", cfg.tsp.layouts);
      read(*it, "methods", cfg.tsp.methods);
      if (it->contains("instances")) {
        cfg.tsp.instance_files.clear();
        for (const auto& p : it->at("instances")) cfg.tsp.instance_files.push_back(resolve(base, p.get<std::string>()));
      }
      if (auto s = it->find("swap_pso"); s != it->end()) {
        check_keys(*s, {"particles", "iterations", "alpha", "beta"}, "tsp.swap_pso");
        read(*s, "particles", cfg.tsp.swap_pso.particles);
        read(*s, "iterations", cfg.tsp.swap_pso.iterations);
        read(*s, "alpha", cfg.tsp.swap_pso.alpha);
        read(*s, "beta", cfg.tsp.swap_pso.beta);
      }
    }
    if (auto it = j.find("symreg"); it != j.end()) {
      check_keys(*it, {"dataset", "synthetic", "runs", "sample_rows", "probe_rows", "max_depth", "max_nodes"},
                 "symreg");
      if (it->contains("dataset")) cfg.symreg.dataset = resolve(base, it->at("dataset").get<std::string>());
      if (auto s = it->find("synthetic"); s != it->end()) {
        check_keys(*s, {"expr", "dim", "rows", "low", "high"}, "symreg.synthetic");
        SyntheticData syn;
        read(*s, "expr", syn.expr);
        read(*s, "dim", syn.dim);
        read(*s, "rows", syn.rows);
        read(*s, "low", syn.low);
        read(*s, "high", syn.high);
        cfg.symreg.synthetic = syn;
      }
      read(*it, "runs", cfg.symreg.runs);
      read(*it, "sample_rows", cfg.symreg.sample_rows);
      read(*it, "probe_rows", cfg.symreg.probe_rows);
      read(*it, "max_depth", cfg.symreg.max_depth);
      read(*it, "max_nodes", cfg.symreg.max_nodes);
    }
    if (auto it = j.find("heuristic"); it != j.end()) {
      check_keys(*it, {"evaluator", "policy", "seeds_dir", "instances", "cities", "instance_timeout_s",
                       "probe_timeout_s", "seed_only"},
                 "heuristic");
      read(*it, "evaluator", cfg.heuristic.evaluator);
      if (it->contains("policy")) cfg.heuristic.policy = resolve(base, it->at("policy").get<std::string>());
      if (it->contains("seeds_dir")) cfg.heuristic.seeds_dir = resolve(base, it->at("seeds_dir").get<std::string>());
      read(*it, "instances", cfg.heuristic.instances);
      read(*it, "cities", cfg.heuristic.cities);
      read(*it, "instance_timeout_s", cfg.heuristic.instance_timeout_s);
      read(*it, "probe_timeout_s", cfg.heuristic.probe_timeout_s);
      read(*it, "seed_only", cfg.heuristic.seed_only);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const llm::UnknownKind& e) {
    throw ConfigError(e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const RunConfig& cfg) {
  json j{{"kind", cfg.kind},
         {"seed", cfg.seed},
         {"out", cfg.out.string()},
         {"no_gap", cfg.no_gap},
         {"backend", {{"type", cfg.backend.type}}},
         {"swarm",
          {{"particles", cfg.swarm.num_particles},
           {"iterations", cfg.swarm.max_iterations},
           {"retry_limit", cfg.swarm.retry_limit},
           {"concurrent", cfg.swarm.concurrent}}},
         {"sampling",
          {{"temperature", cfg.swarm.sampling.temperature},
           {"max_new_tokens", cfg.swarm.sampling.max_new_tokens},
           {"model", cfg.swarm.sampling.model_name}}}};
  if (cfg.backend.mock_script) j["backend"]["mock_script"] = cfg.backend.mock_script->string();
  if (cfg.is_tsp()) {
    json files = json::array();
    for (const auto& p : cfg.tsp.instance_files) files.push_back(p.string());
    j["tsp"] = {{"cities", cfg.tsp.cities},
                {"layouts", cfg.tsp.layouts},
                {"methods", cfg.tsp.methods},
                {"instances", files},
                {"swap_pso",
                 {{"particles", cfg.tsp.swap_pso.particles},
                  {"iterations", cfg.tsp.swap_pso.iterations},
                  {"alpha", cfg.tsp.swap_pso.alpha},
                  {"beta", cfg.tsp.swap_pso.beta}}}};
  } else if (cfg.kind == "symreg") {
    json s{{"runs", cfg.symreg.runs},
           {"sample_rows", cfg.symreg.sample_rows},
           {"probe_rows", cfg.symreg.probe_rows},
           {"max_depth", cfg.symreg.max_depth},
           {"max_nodes", cfg.symreg.max_nodes}};
    if (cfg.symreg.dataset) s["dataset"] = cfg.symreg.dataset->string();
    if (const auto& syn = cfg.symreg.synthetic) {
      s["synthetic"] = {{"expr", syn->expr}, {"dim", syn->dim}, {"rows", syn->rows}, {"low", syn->low}, {"high", syn->high}};
    }
    j["symreg"] = s;
  } else if (cfg.kind == "heuristic") {
    json h{{"evaluator", cfg.heuristic.evaluator},
           {"seeds_dir", cfg.heuristic.seeds_dir.string()},
           {"instances", cfg.heuristic.instances},
           {"cities", cfg.heuristic.cities},
           {"instance_timeout_s", cfg.heuristic.instance_timeout_s},
           {"probe_timeout_s", cfg.heuristic.probe_timeout_s},
           {"seed_only", cfg.heuristic.seed_only}};
    if (cfg.heuristic.policy) h["policy"] = cfg.heuristic.policy->string();
    j["heuristic"] = h;
  }
  return j;
}

void apply(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.backend) cfg.backend.type = *o.backend;
  if (o.mock_script) cfg.backend.mock_script = *o.mock_script;
  if (o.iterations) cfg.swarm.max_iterations = *o.iterations;
  if (o.particles) cfg.swarm.num_particles = *o.particles;
  if (o.max_tokens) cfg.swarm.sampling.max_new_tokens = *o.max_tokens;
  if (o.temperature) cfg.swarm.sampling.temperature = *o.temperature;
  if (o.out) cfg.out = *o.out;
  if (o.no_gap) cfg.no_gap = true;
}

}  // namespace lmpso::app
