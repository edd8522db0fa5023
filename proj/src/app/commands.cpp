#include "lmpso/app/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lmpso/heuristic/adapter.hpp"
#include "lmpso/llm/http_backend.hpp"
#include "lmpso/llm/mock_backend.hpp"
#include "lmpso/swarm/engine.hpp"
#include "lmpso/swarm/prompt_template.hpp"
#include "lmpso/symreg/adapter.hpp"
#include "lmpso/symreg/eval.hpp"
#include "lmpso/tsp/adapter.hpp"
#include "lmpso/tsp/heuristics.hpp"
#include "lmpso/tsp/swap_pso.hpp"

namespace lmpso::app {
namespace fs = std::filesystem;
namespace {

std::ostream& log_of(const Context& ctx) {
  static std::ostream null_stream(nullptr);
  return ctx.log ? *ctx.log : null_stream;
}

swarm::RunTrace read_trace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trace " + path.string());
  return swarm::read_jsonl(in);
}

// Backend for this run: the injected one, else one built from the config.
struct BackendHandle {
  std::unique_ptr<llm::ChatBackend> owned;
  llm::ChatBackend* ptr = nullptr;

  llm::ChatBackend& get(const RunConfig& cfg, const Context& ctx) {
    if (!ptr) {
      if (ctx.backend) {
        ptr = ctx.backend;
      } else {
        owned = make_backend(cfg);
        ptr = owned.get();
      }
    }
    return *ptr;
  }
};

swarm::IterationCallback progress(std::ostream& log, std::string label) {
  return [&log, label = std::move(label)](const swarm::IterationRecord& rec) {
    log << label << " iter " << rec.iter << " best " << swarm::format_number(rec.gbest_score) << "\n";
  };
}

std::string seed_scores_jsonl(const std::vector<std::pair<std::string, double>>& scores) {
  std::string out;
  for (const auto& [name, score] : scores) out += nlohmann::json{{"seed", name}, {"total", score}}.dump() + "\n";
  return out;
}

std::vector<std::pair<std::string, double>> seed_scores_from_jsonl(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    out.emplace_back(j.at("seed").get<std::string>(), j.at("total").get<double>());
  }
  return out;
}

}  // namespace

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::unique_ptr<llm::ChatBackend> make_backend(const RunConfig& cfg) {
  if (cfg.backend.type == "mock") {
    if (!cfg.backend.mock_script) throw ConfigError("mock backend needs --mock-script");
    return std::make_unique<llm::MockBackend>(llm::MockScript::load(*cfg.backend.mock_script));
  }
  std::string model;
  auto opts = llm::HttpBackendOptions::from_env(&model);
  if (!opts) throw ConfigError("http backend selected but LMPSO_API_BASE is not set");
  return std::make_unique<llm::HttpBackend>(std::move(*opts));
}

std::vector<tsp::TspInstance> tsp_layouts(const RunConfig& cfg) {
  std::vector<tsp::TspInstance> out;
  if (!cfg.tsp.instance_files.empty()) {
    for (const auto& p : cfg.tsp.instance_files) out.push_back(tsp::load_instance(p));
    return out;
  }
  for (std::size_t k = 0; k < cfg.tsp.layouts; ++k) {
    auto rng = make_stream(cfg.seed, "tsp.layout", k);
    out.push_back(tsp::generate_instance(cfg.tsp.cities, rng, "layout" + std::to_string(k)));
  }
  return out;
}

symreg::Dataset symreg_dataset(const RunConfig& cfg) {
  if (cfg.symreg.dataset) return symreg::load_csv(*cfg.symreg.dataset);
  const auto& syn = *cfg.symreg.synthetic;
  if (syn.rows == 0 || syn.dim == 0) throw ConfigError("synthetic dataset needs rows and dim");
  const auto expr = symreg::parse_expr(syn.expr, syn.dim);
  const symreg::CompiledExpr f(expr);
  auto rng = make_stream(cfg.seed, "symreg.dataset");
  symreg::Dataset data;
  data.name = "synthetic";
  data.dim = syn.dim;
  for (std::size_t c = 0; c < syn.dim; ++c) data.feature_names.push_back("x" + std::to_string(c));
  for (std::size_t r = 0; r < syn.rows; ++r) {
    for (std::size_t c = 0; c < syn.dim; ++c) {
      // 53-bit uniform in [0, 1), portable across standard libraries.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      data.X.push_back(syn.low + (syn.high - syn.low) * u);
    }
    data.y.push_back(f(data.row(r)));
  }
  data.validate();
  return data;
}

TspOutcome cmd_tsp(const RunConfig& cfg, const Context& ctx) {
  cfg.validate();
  if (!cfg.is_tsp()) throw ConfigError("not a tsp config");
  auto& log = log_of(ctx);
  const auto layouts = tsp_layouts(cfg);
  // Resolve optima up front so a missing one fails before any model query.
  std::vector<std::optional<double>> optima;
  for (const auto& inst : layouts) {
    optima.push_back(cfg.no_gap ? std::nullopt : std::optional<double>(tsp::resolve_optimum(inst)));
  }

  write_file(cfg.out / "config.json", to_json(cfg).dump(2) + "\n");
  TspOutcome outcome;
  BackendHandle backend;
  if (std::find(cfg.tsp.methods.begin(), cfg.tsp.methods.end(), "lmpso") != cfg.tsp.methods.end()) {
    backend.get(cfg, ctx);
  }
  std::vector<BudgetRow> budget;
  for (std::size_t k = 0; k < layouts.size(); ++k) {
    const auto& inst = layouts[k];
    write_file(cfg.out / "instances" / ("layout" + std::to_string(k) + ".json"),
               tsp::instance_to_json(inst).dump() + "\n");
    auto record = [&](const std::string& method, const tsp::Tour& tour) {
      const double len = tsp::tour_length(inst, tour);
      outcome.results.push_back({k, inst.name, method, len, optima[k]});
      log << inst.name << " " << method << " " << swarm::format_fixed(len, 4) << "\n";
    };
    for (const auto& method : cfg.tsp.methods) {
      if (method == "nn") {
        record(method, tsp::nearest_neighbor(inst));
      } else if (method == "ni") {
        record(method, tsp::nearest_insertion(inst));
      } else if (method == "fi") {
        record(method, tsp::farthest_insertion(inst));
      } else if (method == "ri") {
        record(method, tsp::random_insertion(inst, make_stream(cfg.seed, "tsp.ri", k)()));
      } else if (method == "swap_pso") {
        tsp::SwapPsoConfig pso;
        pso.particles = cfg.tsp.swap_pso.particles;
        pso.iterations = cfg.tsp.swap_pso.iterations;
        pso.alpha = cfg.tsp.swap_pso.alpha;
        pso.beta = cfg.tsp.swap_pso.beta;
        auto rng = make_stream(cfg.seed, "tsp.swap_pso", k);
        const auto res = tsp::swap_pso(inst, pso, rng);
        write_file(cfg.out / "traces" / ("swap_pso_layout" + std::to_string(k) + ".jsonl"), swarm::to_jsonl(res.trace));
        record(method, res.best);
      } else if (method == "lmpso") {
        tsp::TspAdapter adapter(inst);
        auto scfg = cfg.swarm;
        scfg.rng_seed = make_stream(cfg.seed, "tsp.lmpso", k)();
        auto res = swarm::run(adapter, backend.get(cfg, ctx), scfg, progress(log, inst.name + " lmpso"));
        write_file(cfg.out / "traces" / ("lmpso_layout" + std::to_string(k) + ".jsonl"), swarm::to_jsonl(res.trace));
        write_file(cfg.out / "best" / ("lmpso_layout" + std::to_string(k) + ".txt"),
                   tsp::format_route(*res.gbest.decoded) + "\n");
        budget.push_back({inst.name, scfg.num_particles, scfg.max_iterations, scfg.retry_limit, res.queries});
        outcome.queries += res.queries;
        outcome.lmpso_traces.push_back(std::move(res.trace));
        record(method, *res.gbest.decoded);
      }
    }
  }
  write_file(cfg.out / "results.jsonl", results_to_jsonl(outcome.results));
  write_file(cfg.out / "gaps.csv", gap_table_csv(outcome.results));
  write_file(cfg.out / "lengths.csv", lengths_csv(outcome.results));
  if (!budget.empty()) write_file(cfg.out / "budget.csv", budget_csv(budget));
  return outcome;
}

SymregOutcome cmd_symreg(const RunConfig& cfg, const Context& ctx) {
  cfg.validate();
  if (cfg.kind != "symreg") throw ConfigError("not a symreg config");
  auto& log = log_of(ctx);
  SymregOutcome outcome;
  outcome.data = symreg_dataset(cfg);
  write_file(cfg.out / "config.json", to_json(cfg).dump(2) + "\n");
  write_file(cfg.out / "dataset.csv", symreg::to_csv(outcome.data));

  symreg::SymregOptions opts;
  opts.sample_rows = cfg.symreg.sample_rows;
  opts.probe_rows = cfg.symreg.probe_rows;
  opts.max_depth = cfg.symreg.max_depth;
  opts.max_nodes = cfg.symreg.max_nodes;
  symreg::SymregAdapter adapter(outcome.data, opts);
  BackendHandle backend;
  std::vector<BudgetRow> budget;
  for (std::size_t k = 0; k < cfg.symreg.runs; ++k) {
    auto scfg = cfg.swarm;
    scfg.rng_seed = make_stream(cfg.seed, "symreg.run", k)();
    const std::string run = "run" + std::to_string(k);
    auto res = swarm::run(adapter, backend.get(cfg, ctx), scfg, progress(log, run));
    write_file(cfg.out / "traces" / (run + ".jsonl"), swarm::to_jsonl(res.trace));
    write_file(cfg.out / ("progress_" + run + ".csv"), symreg_progress_csv(res.trace, outcome.data));
    write_file(cfg.out / ("table_" + run + ".csv"), symreg_table_csv(res.trace, outcome.data));
    write_file(cfg.out / "best" / (run + ".txt"), symreg::to_string(*res.gbest.decoded) + "\n");
    budget.push_back({run, scfg.num_particles, scfg.max_iterations, scfg.retry_limit, res.queries});
    outcome.queries += res.queries;
    outcome.traces.push_back(std::move(res.trace));
  }
  write_file(cfg.out / "summary.csv", symreg_summary_csv(outcome.traces, outcome.data));
  write_file(cfg.out / "budget.csv", budget_csv(budget));
  return outcome;
}

HeuristicOutcome cmd_heuristic(const RunConfig& cfg, const Context& ctx) {
  cfg.validate();
  if (cfg.kind != "heuristic") throw ConfigError("not a heuristic config");
  auto& log = log_of(ctx);
  auto seeds = heuristic::load_seeds(cfg.heuristic.seeds_dir);
  const auto instances = heuristic::benchmark_instances(cfg.seed, cfg.heuristic.instances, cfg.heuristic.cities);

  BackendHandle backend;
  if (!cfg.heuristic.seed_only) backend.get(cfg, ctx);

  heuristic::EvaluatorOptions eopts;
  eopts.command = cfg.heuristic.evaluator;
  if (cfg.heuristic.policy) eopts.policy_path = cfg.heuristic.policy->string();
  heuristic::EvaluatorPool pool(eopts, cfg.swarm.concurrent ? cfg.swarm.num_particles : 1);

  write_file(cfg.out / "config.json", to_json(cfg).dump(2) + "\n");
  for (const auto& inst : instances) {
    write_file(cfg.out / "instances" / (inst.name + ".json"), tsp::instance_to_json(inst).dump() + "\n");
  }
  heuristic::HeuristicOptions hopts;
  hopts.instance_timeout_s = cfg.heuristic.instance_timeout_s;
  hopts.probe_timeout_s = cfg.heuristic.probe_timeout_s;
  heuristic::HeuristicAdapter adapter(instances, pool, seeds, hopts);

  HeuristicOutcome outcome;
  for (const auto& seed : adapter.seeds()) {
    auto parsed = adapter.parse_and_validate(seed.source);
    if (auto* v = std::get_if<swarm::Violation>(&parsed)) {
      throw std::runtime_error("seed program " + seed.name + " failed the probe: " + v->message);
    }
    const double total = adapter.evaluate(std::get<heuristic::HeuristicProgram>(parsed));
    log << "seed " << seed.name << " total " << swarm::format_fixed(total, 4) << "\n";
    outcome.seed_scores.emplace_back(seed.name, total);
  }
  write_file(cfg.out / "seed_scores.jsonl", seed_scores_jsonl(outcome.seed_scores));
  write_file(cfg.out / "seeds.csv", seed_scores_csv(outcome.seed_scores));

  if (!cfg.heuristic.seed_only) {
    auto scfg = cfg.swarm;
    scfg.rng_seed = make_stream(cfg.seed, "heuristic.swarm")();
    auto res = swarm::run(adapter, backend.get(cfg, ctx), scfg, progress(log, "heuristic"));
    write_file(cfg.out / "traces" / "run.jsonl", swarm::to_jsonl(res.trace));
    write_file(cfg.out / "progress.csv", heuristic_progress_csv(res.trace));
    write_file(cfg.out / "best_heuristic.py", res.gbest.decoded->source + "\n");
    write_file(cfg.out / "budget.csv",
               budget_csv({{"run", scfg.num_particles, scfg.max_iterations, scfg.retry_limit, res.queries}}));
    outcome.queries = res.queries;
    outcome.trace = std::move(res.trace);
  }
  outcome.probes = adapter.probe_calls();
  outcome.full_evaluations = adapter.full_evaluations();
  write_file(cfg.out / "evaluations.csv",
             "probes,full_evaluations,evaluator_restarts\n" + std::to_string(outcome.probes) + "," +
                 std::to_string(outcome.full_evaluations) + "," + std::to_string(pool.restarts()) + "\n");
  return outcome;
}

tsp::ExactSolution cmd_oracle(const fs::path& instance_file, bool append) {
  auto inst = tsp::load_instance(instance_file);
  const auto sol = tsp::held_karp(inst);
  if (append && !inst.reference_optimum) {
    inst.reference_optimum = sol.length;
    if (instance_file.extension() == ".json") {
      auto j = tsp::instance_to_json(inst);
      write_file(instance_file, j.dump() + "\n");
    } else {
      std::ostringstream out;
      tsp::write_instance_text(out, inst);
      write_file(instance_file, out.str());
    }
  }
  return sol;
}

std::map<std::string, std::string> regenerate_reports(const fs::path& dir) {
  const auto cfg_json = nlohmann::json::parse(read_file(dir / "config.json"));
  const auto kind = cfg_json.at("kind").get<std::string>();
  std::map<std::string, std::string> out;
  if (kind.rfind("tsp", 0) == 0) {
    const auto results = results_from_jsonl(read_file(dir / "results.jsonl"));
    out["gaps.csv"] = gap_table_csv(results);
    out["lengths.csv"] = lengths_csv(results);
  } else if (kind == "symreg") {
    const auto data = symreg::load_csv(dir / "dataset.csv");
    std::vector<swarm::RunTrace> traces;
    for (std::size_t k = 0;; ++k) {
      const auto path = dir / "traces" / ("run" + std::to_string(k) + ".jsonl");
      if (!fs::exists(path)) break;
      traces.push_back(read_trace(path));
      const std::string run = "run" + std::to_string(k);
      out["progress_" + run + ".csv"] = symreg_progress_csv(traces.back(), data);
      out["table_" + run + ".csv"] = symreg_table_csv(traces.back(), data);
    }
    out["summary.csv"] = symreg_summary_csv(traces, data);
  } else if (kind == "heuristic") {
    out["seeds.csv"] = seed_scores_csv(seed_scores_from_jsonl(read_file(dir / "seed_scores.jsonl")));
    if (fs::exists(dir / "traces" / "run.jsonl")) {
      out["progress.csv"] = heuristic_progress_csv(read_trace(dir / "traces" / "run.jsonl"));
    }
  } else {
    throw ConfigError("unknown kind in " + (dir / "config.json").string());
  }
  return out;
}

}  // namespace lmpso::app
