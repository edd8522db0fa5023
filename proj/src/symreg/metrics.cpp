#include "lmpso/symreg/metrics.hpp"

#include <cmath>
#include <vector>

namespace lmpso::symreg {
namespace {

struct Partial {
  double abs_err = 0.0;
  double sq_err = 0.0;
  double y_sum = 0.0;
  EvalNotes notes;
};

std::size_t block_count(std::size_t rows) { return (rows + kMetricBlock - 1) / kMetricBlock; }

// Residual sums per block; y_sum is gathered in the same pass for the mean.
std::vector<Partial> residual_blocks(const CompiledExpr& f, const Dataset& data) {
  const std::size_t blocks = block_count(data.rows());
  std::vector<Partial> part(blocks);
  const auto nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    auto& p = part[static_cast<std::size_t>(b)];
    const std::size_t lo = static_cast<std::size_t>(b) * kMetricBlock;
    const std::size_t hi = std::min(data.rows(), lo + kMetricBlock);
    for (std::size_t r = lo; r < hi; ++r) {
      const double e = f(data.row(r), &p.notes) - data.y[r];
      p.abs_err += std::fabs(e);
      p.sq_err += e * e;
      p.y_sum += data.y[r];
    }
  }
  return part;
}

}  // namespace

double mean_absolute_error(const CompiledExpr& f, const Dataset& data, EvalNotes* notes) {
  double abs_err = 0.0;
  for (const auto& p : residual_blocks(f, data)) {
    abs_err += p.abs_err;
    if (notes) *notes += p.notes;
  }
  return abs_err / static_cast<double>(data.rows());
}

FitReport fit_metrics(const Expr& expr, const Dataset& data) {
  data.validate();
  const CompiledExpr f(expr);
  const auto part = residual_blocks(f, data);
  FitReport rep;
  rep.length = expr.size();
  double abs_err = 0.0, sq_err = 0.0, y_sum = 0.0;
  for (const auto& p : part) {
    abs_err += p.abs_err;
    sq_err += p.sq_err;
    y_sum += p.y_sum;
    rep.notes += p.notes;
  }
  const double n = static_cast<double>(data.rows());
  const double mean = y_sum / n;

  std::vector<double> ss(part.size(), 0.0);
  const auto nb = static_cast<long long>(part.size());
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kMetricBlock;
    const std::size_t hi = std::min(data.rows(), lo + kMetricBlock);
    double s = 0.0;
    for (std::size_t r = lo; r < hi; ++r) {
      const double d = data.y[r] - mean;
      s += d * d;
    }
    ss[static_cast<std::size_t>(b)] = s;
  }
  double ss_tot = 0.0;
  for (double s : ss) ss_tot += s;

  rep.mae = abs_err / n;
  if (ss_tot > 0.0) rep.r2 = 1.0 - sq_err / ss_tot;
  return rep;
}

FitReport fit_metrics_serial(const Expr& expr, const Dataset& data) {
  data.validate();
  const CompiledExpr f(expr);
  FitReport rep;
  rep.length = expr.size();
  const double n = static_cast<double>(data.rows());
  double mean = 0.0;
  for (double v : data.y) mean += v;
  mean /= n;
  double abs_err = 0.0, sq_err = 0.0, ss_tot = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const double e = f(data.row(r), &rep.notes) - data.y[r];
    abs_err += std::fabs(e);
    sq_err += e * e;
    ss_tot += (data.y[r] - mean) * (data.y[r] - mean);
  }
  rep.mae = abs_err / n;
  if (ss_tot > 0.0) rep.r2 = 1.0 - sq_err / ss_tot;
  return rep;
}

}  // namespace lmpso::symreg
