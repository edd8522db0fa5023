#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmpso/swarm/trace.hpp"
#include "lmpso/symreg/dataset.hpp"

namespace lmpso::app {

/// CSV cell quoted when it contains a comma, quote or newline.
std::string csv_cell(const std::string& text);
std::string fixed6(double v);

/// One method's tour length on one layout.
struct MethodResult {
  std::size_t layout = 0;
  std::string instance;
  std::string method;
  double length = 0.0;
  std::optional<double> optimum;

  bool operator==(const MethodResult&) const = default;
};

std::string results_to_jsonl(const std::vector<MethodResult>& results);
std::vector<MethodResult> results_from_jsonl(const std::string& text);

/// Per-method mean and sample standard deviation across layouts of length and
/// optimality gap (fraction and percent). Methods appear in first-seen order.
/// Gap cells are empty when any layout lacks an optimum.
///   method,layouts,mean_length,std_length,mean_gap,std_gap,mean_gap_pct,std_gap_pct
std::string gap_table_csv(const std::vector<MethodResult>& results);
///   layout,instance,method,length,optimum,gap
std::string lengths_csv(const std::vector<MethodResult>& results);

/// Per-iteration best expression statistics on the full dataset.
///   iter,best_mae,best_r2,best_length,best_expr
std::string symreg_progress_csv(const swarm::RunTrace& trace, const symreg::Dataset& data);
/// Best expression at iteration 1 and every 5th iteration.
///   iteration,best_expression,mae
std::string symreg_table_csv(const swarm::RunTrace& trace, const symreg::Dataset& data);
/// Final best of each run, then mean and std rows.
///   run,final_mae,final_r2,final_length,final_expr
std::string symreg_summary_csv(const std::vector<swarm::RunTrace>& runs, const symreg::Dataset& data);

/// Minimum full-dataset MAE over every position a particle held (initialized,
/// accepted, retried and reinitialized events), recomputed from the event text.
double replay_best_mae(const swarm::RunTrace& trace, const symreg::Dataset& data);

///   iter,best_total_distance
std::string heuristic_progress_csv(const swarm::RunTrace& trace);
///   seed,total_distance
std::string seed_scores_csv(const std::vector<std::pair<std::string, double>>& scores);

struct BudgetRow {
  std::string run;
  std::size_t particles = 0;
  std::size_t iterations = 0;
  std::size_t retry_limit = 0;
  std::size_t queries = 0;
};
///   run,particles,iterations,retry_limit,cost_model,max_queries,queries
std::string budget_csv(const std::vector<BudgetRow>& rows);

}  // namespace lmpso::app
