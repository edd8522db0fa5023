#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lmpso/app/commands.hpp"
#include "lmpso/app/config.hpp"
#include "lmpso/app/reports.hpp"
#include "lmpso/heuristic/adapter.hpp"
#include "lmpso/heuristic/evaluator_client.hpp"
#include "lmpso/swarm/engine.hpp"
#include "lmpso/llm/mock_backend.hpp"
#include "lmpso/symreg/metrics.hpp"
#include "lmpso/tsp/held_karp.hpp"
#include "lmpso/tsp/heuristics.hpp"

using namespace lmpso;
using namespace lmpso::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lmpso_app_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

const fs::path kData = LMPSO_DATA_DIR;

}  // namespace

TEST_CASE("per-kind defaults") {
  struct Row {
    const char* kind;
    std::size_t iterations, particles;
    int tokens;
  };
  for (const auto& r : {Row{"tsp10", 100, 10, 50}, Row{"tsp20", 100, 10, 100}, Row{"tsp30", 100, 10, 150},
                        Row{"heuristic", 40, 25, 1000}, Row{"symreg", 50, 80, 200}}) {
    const auto cfg = defaults_for(r.kind);
    CHECK(cfg.swarm.max_iterations == r.iterations);
    CHECK(cfg.swarm.num_particles == r.particles);
    CHECK(cfg.swarm.sampling.max_new_tokens == r.tokens);
    CHECK(cfg.swarm.sampling.temperature == 0.9);
  }
  CHECK(defaults_for("tsp20").tsp.cities == 20);
  CHECK(swarm::cost_model(defaults_for("symreg").swarm.num_particles, defaults_for("symreg").swarm.max_iterations) ==
        4000);
  CHECK_THROWS_AS(defaults_for("tsp40"), ConfigError);
}

TEST_CASE("config file and overrides") {
  const auto j = nlohmann::json::parse(R"({
    "kind": "tsp10", "seed": 7,
    "backend": {"type": "mock", "mock_script": "script.json"},
    "swarm": {"particles": 4, "iterations": 3, "retry_limit": 1},
    "sampling": {"temperature": 0.5},
    "out": "results",
    "tsp": {"layouts": 2, "methods": ["nn", "lmpso"]}
  })");
  auto cfg = config_from_json(j, "/base");
  CHECK(cfg.seed == 7);
  CHECK(cfg.backend.type == "mock");
  CHECK(*cfg.backend.mock_script == fs::path("/base/script.json"));
  CHECK(cfg.swarm.num_particles == 4);
  CHECK(cfg.swarm.retry_limit == 1);
  CHECK(cfg.swarm.sampling.temperature == 0.5);
  CHECK(cfg.swarm.sampling.max_new_tokens == 50);
  CHECK(cfg.out == fs::path("/base/results"));
  CHECK(cfg.tsp.methods == std::vector<std::string>{"nn", "lmpso"});

  const auto again = config_from_json(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));

  Overrides o;
  o.seed = 9;
  o.iterations = 12;
  o.particles = 2;
  o.max_tokens = 80;
  o.temperature = 0.1;
  o.no_gap = true;
  apply(cfg, o);
  CHECK(cfg.seed == 9);
  CHECK(cfg.swarm.max_iterations == 12);
  CHECK(cfg.swarm.num_particles == 2);
  CHECK(cfg.swarm.sampling.max_new_tokens == 80);
  CHECK(cfg.swarm.sampling.temperature == 0.1);
  CHECK(cfg.no_gap);

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"kind":"tsp10","sede":1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"seed":1})")), ConfigError);
  // Semantic checks run after overrides, right before a command starts.
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"kind":"tsp10","tsp":{"methods":["x"]}})")).validate(),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"kind":"symreg"})")).validate(), ConfigError);
}

TEST_CASE("http backend needs an endpoint") {
  auto cfg = defaults_for("tsp10");
  cfg.backend.type = "http";
  ::unsetenv("LMPSO_API_BASE");
  CHECK_THROWS_AS(make_backend(cfg), ConfigError);
  cfg.backend.type = "mock";
  cfg.backend.mock_script = kData / "mock" / "tsp10_routes.json";
  CHECK(make_backend(cfg) != nullptr);
}

TEST_CASE("classical heuristics on 10-city layouts") {
  auto cfg = defaults_for("tsp10");
  cfg.seed = 3;
  cfg.tsp.methods = {"nn", "ni", "fi", "ri"};
  cfg.out = scratch("tsp_heur");
  const auto outcome = cmd_tsp(cfg);
  CHECK(outcome.results.size() == 20);
  CHECK(outcome.queries == 0);

  const auto rows = read_csv(read_file(cfg.out / "gaps.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0][0] == "method");
  CHECK(rows[0][4] == "mean_gap");

  // Recompute every row from the layouts on disk.
  const auto layouts = tsp_layouts(cfg);
  REQUIRE(layouts.size() == 5);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& method = rows[r][0];
    std::vector<double> gaps;
    for (const auto& inst : layouts) {
      tsp::Tour t;
      if (method == "nn") t = tsp::nearest_neighbor(inst);
      if (method == "ni") t = tsp::nearest_insertion(inst);
      if (method == "fi") t = tsp::farthest_insertion(inst);
      if (method == "ri") {
        Rng rng = make_stream(cfg.seed, "tsp.ri", &inst - layouts.data());
        t = tsp::insertion_heuristic(inst, tsp::InsertionMode::random, rng);
      }
      gaps.push_back(tsp::optimality_gap(tsp::tour_length(inst, t), tsp::held_karp(inst).length));
    }
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= gaps.size();
    double var = 0.0;
    for (double g : gaps) var += (g - mean) * (g - mean);
    const double sd = std::sqrt(var / (gaps.size() - 1));
    CHECK_MESSAGE(std::stod(rows[r][4]) == doctest::Approx(mean).epsilon(1e-6), method);
    CHECK_MESSAGE(std::stod(rows[r][5]) == doctest::Approx(sd).epsilon(1e-5), method);
    CHECK(std::stod(rows[r][6]) == doctest::Approx(100.0 * mean).epsilon(1e-6));
  }
  fs::remove_all(cfg.out);
}

TEST_CASE("mock-driven swarm on 10-city layouts, and report regeneration") {
  auto cfg = defaults_for("tsp10");
  cfg.seed = 5;
  cfg.tsp.layouts = 2;
  cfg.swarm.max_iterations = 6;
  cfg.tsp.swap_pso.iterations = 6;
  cfg.backend.type = "mock";
  cfg.backend.mock_script = kData / "mock" / "tsp10_routes.json";
  cfg.out = scratch("tsp_lmpso");
  const auto outcome = cmd_tsp(cfg);
  CHECK(outcome.lmpso_traces.size() == 2);
  CHECK(outcome.queries >= 2 * 10 * 6);
  CHECK(outcome.queries <= 2 * 10 * 6 * 4);
  for (const auto& r : outcome.results) CHECK(r.length >= *r.optimum - 1e-9);
  CHECK(fs::exists(cfg.out / "traces" / "lmpso_layout0.jsonl"));
  CHECK(fs::exists(cfg.out / "best" / "lmpso_layout1.txt"));
  CHECK(fs::exists(cfg.out / "budget.csv"));

  for (const auto& [name, content] : regenerate_reports(cfg.out)) {
    CHECK_MESSAGE(content == read_file(cfg.out / name), name);
  }
  // The stored config reproduces the run.
  auto replay = load_config(cfg.out / "config.json");
  replay.out = scratch("tsp_lmpso_replay");
  cmd_tsp(replay);
  CHECK(read_file(replay.out / "results.jsonl") == read_file(cfg.out / "results.jsonl"));
  CHECK(read_file(replay.out / "traces" / "lmpso_layout1.jsonl") ==
        read_file(cfg.out / "traces" / "lmpso_layout1.jsonl"));
  fs::remove_all(cfg.out);
  fs::remove_all(replay.out);
}

TEST_CASE("30-city layouts need reference optima unless gaps are disabled") {
  auto cfg = defaults_for("tsp30");
  cfg.tsp.methods = {"nn"};
  cfg.tsp.layouts = 1;
  cfg.out = scratch("tsp30");
  CHECK_THROWS_AS(cmd_tsp(cfg), tsp::MissingOptimum);
  cfg.no_gap = true;
  const auto outcome = cmd_tsp(cfg);
  REQUIRE(outcome.results.size() == 1);
  CHECK_FALSE(outcome.results[0].optimum);
  const auto rows = read_csv(read_file(cfg.out / "gaps.csv"));
  CHECK(rows[1][4].empty());
  fs::remove_all(cfg.out);
}

TEST_CASE("symbolic regression run on a synthetic dataset") {
  auto cfg = defaults_for("symreg");
  cfg.seed = 2;
  cfg.symreg.synthetic = SyntheticData{"20 - 2*abs(x1 - 10)", 2, 120, 0.0, 20.0};
  cfg.symreg.runs = 2;
  cfg.swarm.num_particles = 6;
  cfg.swarm.max_iterations = 5;
  cfg.backend.type = "mock";
  cfg.backend.mock_script = kData / "mock" / "symreg_expressions.json";
  cfg.out = scratch("symreg");
  const auto outcome = cmd_symreg(cfg);
  REQUIRE(outcome.traces.size() == 2);
  CHECK(outcome.data.rows() == 120);

  for (std::size_t k = 0; k < 2; ++k) {
    const auto rows = read_csv(read_file(cfg.out / ("progress_run" + std::to_string(k) + ".csv")));
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == std::vector<std::string>{"iter", "best_mae", "best_r2", "best_length", "best_expr"});
    double prev = INFINITY;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      CHECK(std::stoul(rows[r][0]) == r - 1);
      const double mae = std::stod(rows[r][1]);
      CHECK(mae >= 0.0);
      CHECK(mae <= prev);
      prev = mae;
      if (!rows[r][2].empty()) CHECK(std::stod(rows[r][2]) <= 1.0);
      CHECK(std::stoul(rows[r][3]) >= 1);
    }
    CHECK(prev == doctest::Approx(replay_best_mae(outcome.traces[k], outcome.data)).epsilon(1e-6));
    CHECK(outcome.traces[k].per_iteration.back().gbest_score == replay_best_mae(outcome.traces[k], outcome.data));
  }
  const auto table = read_csv(read_file(cfg.out / "table_run0.csv"));
  CHECK(table[0] == std::vector<std::string>{"iteration", "best_expression", "mae"});
  CHECK(table[1][0] == "1");
  CHECK(table[2][0] == "5");
  for (const auto& [name, content] : regenerate_reports(cfg.out)) {
    CHECK_MESSAGE(content == read_file(cfg.out / name), name);
  }
  fs::remove_all(cfg.out);
}

TEST_CASE("symbolic regression dataset errors surface") {
  auto cfg = defaults_for("symreg");
  cfg.symreg.dataset = "/nonexistent/data.csv";
  CHECK_THROWS_AS(symreg_dataset(cfg), symreg::IoError);
}

TEST_CASE("heuristic improvement with the stand-in evaluator") {
  auto cfg = defaults_for("heuristic");
  cfg.seed = 1;
  cfg.heuristic.evaluator = {FAKE_EVALUATOR};
  cfg.heuristic.instances = 3;
  cfg.heuristic.cities = 40;
  cfg.heuristic.seed_only = true;
  cfg.out = scratch("heur_seed");
  const auto seeds = cmd_heuristic(cfg);
  REQUIRE(seeds.seed_scores.size() == 4);
  CHECK_FALSE(seeds.trace);
  const auto instances = heuristic::benchmark_instances(cfg.seed, 3, 40);
  double fi = 0.0;
  for (const auto& inst : instances) fi += tsp::tour_length(inst, tsp::farthest_insertion(inst));
  CHECK(seeds.seed_scores[2].first == "fi");
  CHECK(seeds.seed_scores[2].second == doctest::Approx(fi).epsilon(1e-9));
  CHECK(read_csv(read_file(cfg.out / "seeds.csv")).size() == 5);
  fs::remove_all(cfg.out);

}

TEST_CASE("two-iteration heuristic run with a scripted model") {
  auto cfg = defaults_for("heuristic");
  cfg.seed = 1;
  cfg.heuristic.evaluator = {FAKE_EVALUATOR};
  cfg.heuristic.instances = 2;
  cfg.heuristic.cities = 30;
  cfg.swarm.num_particles = 3;
  cfg.swarm.max_iterations = 2;
  cfg.out = scratch("heur_run");
  const auto seeds = heuristic::load_seeds(kData / "seeds");
  llm::MockBackend mock(llm::MockScript::cyclic({"```python\n" + seeds[1].source + "```", "nothing useful"}));
  Context ctx;
  ctx.backend = &mock;
  const auto outcome = cmd_heuristic(cfg, ctx);
  REQUIRE(outcome.trace);
  CHECK(outcome.trace->per_iteration.size() == 2);
  CHECK(outcome.full_evaluations <= outcome.probes);
  CHECK(fs::exists(cfg.out / "best_heuristic.py"));
  const auto progress = read_csv(read_file(cfg.out / "progress.csv"));
  CHECK(progress.size() == 4);
  CHECK(progress[0] == std::vector<std::string>{"iter", "best_total_distance"});
  for (const auto& [name, content] : regenerate_reports(cfg.out)) {
    CHECK_MESSAGE(content == read_file(cfg.out / name), name);
  }
  fs::remove_all(cfg.out);
}

TEST_CASE("missing evaluator binary is reported") {
  auto cfg = defaults_for("heuristic");
  cfg.heuristic.evaluator = {"/nonexistent/sandbox-evaluator"};
  cfg.heuristic.seed_only = true;
  cfg.out = scratch("heur_missing");
  CHECK_THROWS_AS(cmd_heuristic(cfg), heuristic::EvaluatorDown);
  fs::remove_all(cfg.out);
}

TEST_CASE("oracle command") {
  const auto dir = scratch("oracle");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "square.txt");
    f << "4\n0 0\n0 10\n10 10\n10 0\n";
  }
  CHECK(cmd_oracle(dir / "square.txt", false).length == doctest::Approx(40.0));
  cmd_oracle(dir / "square.txt", true);
  std::ifstream in(dir / "square.txt");
  const auto inst = tsp::read_instance_text(in);
  REQUIRE(inst.reference_optimum);
  CHECK(*inst.reference_optimum == doctest::Approx(40.0));

  Rng rng = make_stream(1, "big");
  {
    std::ofstream f(dir / "big.txt");
    tsp::write_instance_text(f, tsp::generate_instance(16, rng));
  }
  CHECK_THROWS_AS(cmd_oracle(dir / "big.txt", false), tsp::TooLarge);
  fs::remove_all(dir);
}

TEST_CASE("report tables") {
  std::vector<MethodResult> results{{0, "a", "nn", 110.0, 100.0}, {1, "b", "nn", 130.0, 100.0},
                                    {0, "a", "fi", 100.0, 100.0}, {1, "b", "fi", 102.0, 100.0}};
  CHECK(results_from_jsonl(results_to_jsonl(results)) == results);
  const auto rows = read_csv(gap_table_csv(results));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "nn");
  CHECK(std::stod(rows[1][4]) == doctest::Approx(0.2));
  CHECK(std::stod(rows[1][5]) == doctest::Approx(std::sqrt(0.02)));
  CHECK(std::stod(rows[2][6]) == doctest::Approx(1.0));
  CHECK(csv_cell("a,b") == "\"a,b\"");
  CHECK(csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_cell("plain") == "plain");
  const auto budget = read_csv(budget_csv({{"r", 10, 100, 3, 1000}}));
  CHECK(budget[1] == std::vector<std::string>{"r", "10", "100", "3", "1000", "4000", "1000"});
}

TEST_CASE("every checked-in config loads") {
  const auto dir = kData.parent_path() / "configs";
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    CAPTURE(entry.path().filename().string());
    const auto cfg = load_config(entry.path());
    const auto base = defaults_for(cfg.kind);
    if (cfg.backend.type == "http") {
      // Full-scale experiments keep the per-kind settings.
      CHECK(cfg.swarm.max_iterations == base.swarm.max_iterations);
      CHECK(cfg.swarm.num_particles == base.swarm.num_particles);
      CHECK(cfg.swarm.sampling.max_new_tokens == base.swarm.sampling.max_new_tokens);
    }
    if (cfg.kind == "tsp20" || cfg.kind == "tsp30") CHECK(cfg.no_gap);
    if (cfg.backend.type == "mock") CHECK(fs::exists(*cfg.backend.mock_script));
  }
  CHECK(count >= 15);
}
