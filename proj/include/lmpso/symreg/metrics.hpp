#pragma once

#include <cstddef>
#include <optional>

#include "lmpso/symreg/dataset.hpp"
#include "lmpso/symreg/eval.hpp"
#include "lmpso/symreg/expr.hpp"

namespace lmpso::symreg {

struct FitReport {
  double mae = 0.0;
  /// 1 - SS_res / SS_tot. Missing when the target is constant (SS_tot = 0).
  std::optional<double> r2;
  std::size_t length = 0;
  EvalNotes notes;
};

/// Rows per reduction block. Partial sums are combined in block order, so the
/// result does not depend on the number of threads.
inline constexpr std::size_t kMetricBlock = 512;

/// Row-parallel (OpenMP) metrics with a deterministic reduction order.
FitReport fit_metrics(const Expr& expr, const Dataset& data);
/// Straight single-threaded loop; reference for the parallel version.
FitReport fit_metrics_serial(const Expr& expr, const Dataset& data);

/// Mean absolute error only, same reduction order as fit_metrics.
double mean_absolute_error(const CompiledExpr& f, const Dataset& data, EvalNotes* notes = nullptr);

}  // namespace lmpso::symreg
