#include "lmpso/app/reports.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lmpso/swarm/engine.hpp"
#include "lmpso/swarm/prompt_template.hpp"
#include "lmpso/symreg/adapter.hpp"
#include "lmpso/symreg/metrics.hpp"
#include "lmpso/tsp/held_karp.hpp"

namespace lmpso::app {
namespace {

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; zero for a single value.
Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::optional<symreg::Expr> decode_expr(const std::string& text, std::size_t dim) {
  return symreg::extract_expression(text, dim).expr;
}

symreg::FitReport fit_of(const std::string& text, const symreg::Dataset& data) {
  auto expr = decode_expr(text, data.dim);
  if (!expr) throw std::runtime_error("trace holds an expression that does not parse: " + text);
  return symreg::fit_metrics(*expr, data);
}

std::string r2_cell(const std::optional<double>& r2) { return r2 ? fixed6(*r2) : std::string(); }

}  // namespace

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed6(double v) { return swarm::format_fixed(v, 6); }

std::string results_to_jsonl(const std::vector<MethodResult>& results) {
  std::string out;
  for (const auto& r : results) {
    nlohmann::json j{{"layout", r.layout}, {"instance", r.instance}, {"method", r.method}, {"length", r.length}};
    j["optimum"] = r.optimum ? nlohmann::json(*r.optimum) : nlohmann::json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<MethodResult> results_from_jsonl(const std::string& text) {
  std::vector<MethodResult> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    MethodResult r;
    r.layout = j.at("layout").get<std::size_t>();
    r.instance = j.at("instance").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.length = j.at("length").get<double>();
    if (!j.at("optimum").is_null()) r.optimum = j.at("optimum").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

std::string gap_table_csv(const std::vector<MethodResult>& results) {
  std::vector<std::string> order;
  for (const auto& r : results) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  std::string out = "method,layouts,mean_length,std_length,mean_gap,std_gap,mean_gap_pct,std_gap_pct\n";
  for (const auto& m : order) {
    std::vector<double> lengths, gaps;
    bool all_opt = true;
    for (const auto& r : results) {
      if (r.method != m) continue;
      lengths.push_back(r.length);
      if (r.optimum) {
        gaps.push_back(tsp::optimality_gap(r.length, *r.optimum));
      } else {
        all_opt = false;
      }
    }
    const auto ls = stats(lengths);
    out += csv_cell(m) + "," + std::to_string(lengths.size()) + "," + fixed6(ls.mean) + "," + fixed6(ls.std) + ",";
    if (all_opt) {
      const auto gs = stats(gaps);
      out += fixed6(gs.mean) + "," + fixed6(gs.std) + "," + fixed6(100.0 * gs.mean) + "," + fixed6(100.0 * gs.std);
    } else {
      out += ",,,";
    }
    out += "\n";
  }
  return out;
}

std::string lengths_csv(const std::vector<MethodResult>& results) {
  std::string out = "layout,instance,method,length,optimum,gap\n";
  for (const auto& r : results) {
    out += std::to_string(r.layout) + "," + csv_cell(r.instance) + "," + csv_cell(r.method) + "," + fixed6(r.length) +
           ",";
    if (r.optimum) out += fixed6(*r.optimum) + "," + fixed6(tsp::optimality_gap(r.length, *r.optimum));
    else out += ",";
    out += "\n";
  }
  return out;
}

std::string symreg_progress_csv(const swarm::RunTrace& trace, const symreg::Dataset& data) {
  std::string out = "iter,best_mae,best_r2,best_length,best_expr\n";
  auto row = [&](const swarm::IterationRecord& rec) {
    const auto fit = fit_of(rec.gbest_text, data);
    const auto expr = decode_expr(rec.gbest_text, data.dim);
    out += std::to_string(rec.iter) + "," + swarm::format_number(rec.gbest_score) + "," + r2_cell(fit.r2) + "," +
           std::to_string(fit.length) + "," + csv_cell(symreg::to_string(*expr)) + "\n";
  };
  row(trace.initialization);
  for (const auto& rec : trace.per_iteration) row(rec);
  return out;
}

std::string symreg_table_csv(const swarm::RunTrace& trace, const symreg::Dataset& data) {
  std::string out = "iteration,best_expression,mae\n";
  for (const auto& rec : trace.per_iteration) {
    if (rec.iter != 1 && rec.iter % 5 != 0) continue;
    const auto expr = decode_expr(rec.gbest_text, data.dim);
    if (!expr) throw std::runtime_error("trace holds an expression that does not parse");
    out += std::to_string(rec.iter) + "," + csv_cell(symreg::to_string(*expr)) + "," +
           swarm::format_number(rec.gbest_score) + "\n";
  }
  return out;
}

std::string symreg_summary_csv(const std::vector<swarm::RunTrace>& runs, const symreg::Dataset& data) {
  std::string out = "run,final_mae,final_r2,final_length,final_expr\n";
  std::vector<double> maes, r2s, lens;
  bool all_r2 = true;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& last = runs[k].per_iteration.empty() ? runs[k].initialization : runs[k].per_iteration.back();
    const auto fit = fit_of(last.gbest_text, data);
    const auto expr = decode_expr(last.gbest_text, data.dim);
    maes.push_back(last.gbest_score);
    lens.push_back(static_cast<double>(fit.length));
    if (fit.r2) r2s.push_back(*fit.r2);
    else all_r2 = false;
    out += std::to_string(k) + "," + swarm::format_number(last.gbest_score) + "," + r2_cell(fit.r2) + "," +
           std::to_string(fit.length) + "," + csv_cell(symreg::to_string(*expr)) + "\n";
  }
  const auto m = stats(maes), r = stats(r2s), l = stats(lens);
  out += "mean," + fixed6(m.mean) + "," + (all_r2 ? fixed6(r.mean) : "") + "," + fixed6(l.mean) + ",\n";
  out += "std," + fixed6(m.std) + "," + (all_r2 ? fixed6(r.std) : "") + "," + fixed6(l.std) + ",\n";
  return out;
}

double replay_best_mae(const swarm::RunTrace& trace, const symreg::Dataset& data) {
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](const swarm::IterationRecord& rec) {
    for (const auto& ev : rec.events) {
      if (ev.kind == swarm::EventKind::evaluation_error) continue;
      const auto expr = decode_expr(ev.position, data.dim);
      if (!expr) throw std::runtime_error("held position does not parse: " + ev.position);
      best = std::min(best, symreg::mean_absolute_error(symreg::CompiledExpr(*expr), data));
    }
  };
  visit(trace.initialization);
  for (const auto& rec : trace.per_iteration) visit(rec);
  return best;
}

std::string heuristic_progress_csv(const swarm::RunTrace& trace) {
  std::string out = "iter,best_total_distance\n";
  out += "0," + fixed6(trace.initialization.gbest_score) + "\n";
  for (const auto& rec : trace.per_iteration) out += std::to_string(rec.iter) + "," + fixed6(rec.gbest_score) + "\n";
  return out;
}

std::string seed_scores_csv(const std::vector<std::pair<std::string, double>>& scores) {
  std::string out = "seed,total_distance\n";
  for (const auto& [name, score] : scores) out += csv_cell(name) + "," + fixed6(score) + "\n";
  return out;
}

std::string budget_csv(const std::vector<BudgetRow>& rows) {
  std::string out = "run,particles,iterations,retry_limit,cost_model,max_queries,queries\n";
  for (const auto& r : rows) {
    out += csv_cell(r.run) + "," + std::to_string(r.particles) + "," + std::to_string(r.iterations) + "," +
           std::to_string(r.retry_limit) + "," + std::to_string(swarm::cost_model(r.particles, r.iterations)) + "," +
           std::to_string(swarm::max_queries(r.particles, r.iterations, r.retry_limit)) + "," +
           std::to_string(r.queries) + "\n";
  }
  return out;
}

}  // namespace lmpso::app
