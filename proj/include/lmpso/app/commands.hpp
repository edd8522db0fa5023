#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmpso/app/config.hpp"
#include "lmpso/app/reports.hpp"
#include "lmpso/llm/chat.hpp"
#include "lmpso/swarm/trace.hpp"
#include "lmpso/symreg/dataset.hpp"
#include "lmpso/tsp/held_karp.hpp"
#include "lmpso/tsp/instance.hpp"

namespace lmpso::app {

struct Context {
  std::ostream* log = nullptr;
  /// Used instead of the configured backend when set.
  llm::ChatBackend* backend = nullptr;
};

/// Mock backend from the configured script, or the HTTP backend configured by
/// LMPSO_API_BASE / LMPSO_API_KEY / LMPSO_MODEL. Throws ConfigError when the
/// http backend is selected without LMPSO_API_BASE.
std::unique_ptr<llm::ChatBackend> make_backend(const RunConfig& cfg);

/// Layouts from instance files, or generated from the "tsp.layout" substream.
std::vector<tsp::TspInstance> tsp_layouts(const RunConfig& cfg);

/// Dataset from file, or sampled from the synthetic formula on the
/// "symreg.dataset" substream.
symreg::Dataset symreg_dataset(const RunConfig& cfg);

struct TspOutcome {
  std::vector<MethodResult> results;
  std::vector<swarm::RunTrace> lmpso_traces;
  std::size_t queries = 0;
};

/// Runs the configured methods on every layout and writes into cfg.out:
/// config.json, instances/, results.jsonl, gaps.csv, lengths.csv, traces/,
/// best/ and budget.csv.
TspOutcome cmd_tsp(const RunConfig& cfg, const Context& ctx = {});

struct SymregOutcome {
  symreg::Dataset data;
  std::vector<swarm::RunTrace> traces;
  std::size_t queries = 0;
};

/// Writes dataset.csv, traces/run<k>.jsonl, progress_run<k>.csv,
/// table_run<k>.csv, summary.csv, best/run<k>.txt and budget.csv.
SymregOutcome cmd_symreg(const RunConfig& cfg, const Context& ctx = {});

struct HeuristicOutcome {
  std::vector<std::pair<std::string, double>> seed_scores;
  std::optional<swarm::RunTrace> trace;
  std::size_t probes = 0;
  std::size_t full_evaluations = 0;
  std::size_t queries = 0;
};

/// Scores the seed programs (seed_scores.jsonl, seeds.csv), then unless
/// seed_only runs the swarm: traces/run.jsonl, progress.csv,
/// best_heuristic.py, evaluations.csv and budget.csv.
HeuristicOutcome cmd_heuristic(const RunConfig& cfg, const Context& ctx = {});

/// Held–Karp optimum of the instance file. With `append`, adds an OPT line
/// (text files) or "opt" field (JSON files) when missing.
tsp::ExactSolution cmd_oracle(const std::filesystem::path& instance_file, bool append);

/// Report files of a finished run directory, recomputed from its stored
/// results, dataset and traces only. Keys are paths relative to `dir`.
std::map<std::string, std::string> regenerate_reports(const std::filesystem::path& dir);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace lmpso::app
