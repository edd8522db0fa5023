#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "lmpso/app/commands.hpp"
#include "lmpso/app/config.hpp"
#include "lmpso/heuristic/evaluator_client.hpp"
#include "lmpso/llm/chat.hpp"
#include "lmpso/swarm/prompt_template.hpp"
#include "lmpso/symreg/dataset.hpp"
#include "lmpso/tsp/held_karp.hpp"

namespace {

using namespace lmpso;

enum Exit { ok = 0, failure = 1, config_error = 2, evaluator_down = 3, no_optimum = 4, backend_down = 5 };

struct RunFlags {
  std::string config;
  std::string kind;
  app::Overrides o;
  std::uint64_t seed = 0;
  std::string backend;
  std::string mock_script;
  std::size_t iters = 0;
  std::size_t particles = 0;
  int max_tokens = 0;
  double temperature = 0.0;
  std::string out;
  std::string dataset;
  std::string evaluator;
  bool seed_only = false;
  bool concurrent = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Root seed");
    cmd->add_option("--backend", backend, "Model backend")->check(CLI::IsMember({"http", "mock"}));
    cmd->add_option("--mock-script", mock_script, "Scripted replies for the mock backend")->check(CLI::ExistingFile);
    cmd->add_option("--iters", iters, "Swarm iterations");
    cmd->add_option("--particles", particles, "Swarm size");
    cmd->add_option("--max-tokens", max_tokens, "Max new tokens per reply");
    cmd->add_option("--temperature", temperature, "Sampling temperature");
    cmd->add_option("--out", out, "Output directory");
    cmd->add_flag("--no-gap", o.no_gap, "Report raw lengths when no optimum is known");
    cmd->add_flag("--concurrent", concurrent, "Query the model for all particles in parallel");
  }

  app::RunConfig resolve(CLI::App* cmd, const std::string& fallback_kind) {
    app::RunConfig cfg = config.empty() ? app::defaults_for(kind.empty() ? fallback_kind : kind)
                                        : app::load_config(config);
    if (!config.empty() && !kind.empty() && kind != cfg.kind) {
      throw app::ConfigError("--kind " + kind + " disagrees with config kind " + cfg.kind);
    }
    if (cmd->count("--seed")) o.seed = seed;
    if (cmd->count("--backend")) o.backend = backend;
    if (cmd->count("--mock-script")) o.mock_script = mock_script;
    if (cmd->count("--iters")) o.iterations = iters;
    if (cmd->count("--particles")) o.particles = particles;
    if (cmd->count("--max-tokens")) o.max_tokens = max_tokens;
    if (cmd->count("--temperature")) o.temperature = temperature;
    if (cmd->count("--out")) o.out = out;
    app::apply(cfg, o);
    if (o.mock_script && !o.backend) cfg.backend.type = "mock";
    if (concurrent) cfg.swarm.concurrent = true;
    if (!dataset.empty()) {
      cfg.symreg.dataset = dataset;
      cfg.symreg.synthetic.reset();
    }
    if (!evaluator.empty()) {
      std::istringstream words(evaluator);
      cfg.heuristic.evaluator.clear();
      for (std::string w; words >> w;) cfg.heuristic.evaluator.push_back(w);
    }
    if (seed_only) cfg.heuristic.seed_only = true;
    return cfg;
  }
};

void print_table(const std::string& csv) { std::cout << csv; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Language-model particle swarm optimization: experiments and baselines"};
  cli.require_subcommand(1);

  RunFlags tsp_flags, sr_flags, h_flags;
  auto* tsp_cmd = cli.add_subcommand("tsp", "TSP layouts: construction heuristics, swap PSO and the model swarm");
  tsp_flags.attach(tsp_cmd);
  tsp_cmd->add_option("--kind", tsp_flags.kind, "Problem size preset")->check(CLI::IsMember({"tsp10", "tsp20", "tsp30"}));

  auto* sr_cmd = cli.add_subcommand("symreg", "Symbolic regression on a CSV dataset");
  sr_flags.attach(sr_cmd);
  sr_cmd->add_option("--dataset", sr_flags.dataset, "CSV with header; last column is the target");

  auto* h_cmd = cli.add_subcommand("heuristic", "Evolve TSP heuristic programs through an evaluator subprocess");
  h_flags.attach(h_cmd);
  h_cmd->add_option("--evaluator", h_flags.evaluator, "Evaluator command line");
  h_cmd->add_flag("--seed-only", h_flags.seed_only, "Only score the seed programs");

  std::string oracle_file;
  bool oracle_append = false;
  auto* oracle_cmd = cli.add_subcommand("oracle", "Exact optimum of a small instance");
  oracle_cmd->add_option("instance", oracle_file, "Instance file (.txt or .json)")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_flag("--append", oracle_append, "Store the optimum in the file when absent");

  std::string report_dir;
  bool report_check = false;
  auto* report_cmd = cli.add_subcommand("report", "Rebuild report files of a run directory from its traces");
  report_cmd->add_option("dir", report_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);
  report_cmd->add_flag("--check", report_check, "Compare with the files on disk instead of writing");

  std::string defaults_kind;
  auto* defaults_cmd = cli.add_subcommand("defaults", "Print the default configuration of a problem kind");
  defaults_cmd->add_option("kind", defaults_kind, "tsp10, tsp20, tsp30, heuristic or symreg")->required();

  CLI11_PARSE(cli, argc, argv);

  app::Context ctx{&std::cerr, nullptr};
  try {
    if (*tsp_cmd) {
      auto cfg = tsp_flags.resolve(tsp_cmd, "tsp10");
      app::cmd_tsp(cfg, ctx);
      print_table(app::read_file(cfg.out / "gaps.csv"));
    } else if (*sr_cmd) {
      auto cfg = sr_flags.resolve(sr_cmd, "symreg");
      app::cmd_symreg(cfg, ctx);
      print_table(app::read_file(cfg.out / "summary.csv"));
    } else if (*h_cmd) {
      auto cfg = h_flags.resolve(h_cmd, "heuristic");
      auto res = app::cmd_heuristic(cfg, ctx);
      print_table(app::read_file(cfg.out / "seeds.csv"));
      if (res.trace) std::cout << "best total distance " << swarm::format_fixed(res.trace->per_iteration.back().gbest_score, 4) << "\n";
    } else if (*oracle_cmd) {
      const auto sol = app::cmd_oracle(oracle_file, oracle_append);
      std::cout << "optimum " << swarm::format_number(sol.length) << "\n" << "tour " << tsp::format_route(sol.tour) << "\n";
    } else if (*report_cmd) {
      int mismatches = 0;
      for (const auto& [name, content] : app::regenerate_reports(report_dir)) {
        const auto path = std::filesystem::path(report_dir) / name;
        if (report_check) {
          const bool same = std::filesystem::exists(path) && app::read_file(path) == content;
          std::cout << (same ? "same " : "DIFFERS ") << name << "\n";
          if (!same) ++mismatches;
        } else {
          app::write_file(path, content);
          std::cout << "wrote " << name << "\n";
        }
      }
      return mismatches ? failure : ok;
    } else if (*defaults_cmd) {
      std::cout << app::to_json(app::defaults_for(defaults_kind)).dump(2) << "\n";
    }
  } catch (const app::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const symreg::SchemaError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return config_error;
  } catch (const symreg::IoError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return config_error;
  } catch (const heuristic::EvaluatorDown& e) {
    std::cerr << "evaluator unavailable: " << e.what() << "\n"
              << "check the heuristic.evaluator command in the config or pass --evaluator\n";
    return evaluator_down;
  } catch (const tsp::MissingOptimum& e) {
    std::cerr << e.what() << "\n(pass --no-gap to report raw lengths)\n";
    return no_optimum;
  } catch (const tsp::TooLarge& e) {
    std::cerr << e.what() << "\n";
    return no_optimum;
  } catch (const llm::BackendUnavailable& e) {
    std::cerr << "model backend unavailable: " << e.what() << "\n";
    return backend_down;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return ok;
}
