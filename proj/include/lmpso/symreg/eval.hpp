#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lmpso/symreg/expr.hpp"

namespace lmpso::symreg {

inline constexpr double kPowClamp = 1e150;

/// Counts of protective substitutions made while evaluating.
struct EvalNotes {
  std::size_t zero_division = 0;  // div(a, 0) -> 1, inv(0) -> 1
  std::size_t log_zero = 0;       // log(0) -> 0
  std::size_t pow_clamped = 0;    // |pow| > 1e150 -> +-1e150
  std::size_t non_finite = 0;     // NaN/Inf intermediate -> 0

  std::size_t fallbacks() const noexcept { return zero_division + log_zero + pow_clamped + non_finite; }
  EvalNotes& operator+=(const EvalNotes& o) noexcept {
    zero_division += o.zero_division;
    log_zero += o.log_zero;
    pow_clamped += o.pow_clamped;
    non_finite += o.non_finite;
    return *this;
  }
};

/// Expression flattened to postfix for repeated evaluation over rows.
///
/// Operators are protected so evaluation is total and always finite:
///   div(a, 0) = 1, inv(0) = 1, log(x) = log|x| with log(0) = 0,
///   sqrt(x) = sqrt|x|, pow clamped to |r| <= 1e150 (NaN -> 0),
///   any other non-finite intermediate -> 0.
class CompiledExpr {
 public:
  explicit CompiledExpr(const Expr& expr);

  double operator()(std::span<const double> row, EvalNotes* notes = nullptr) const;

  std::size_t size() const noexcept { return code_.size(); }

 private:
  struct Instr {
    enum class Op : unsigned char { push_const, push_var, unary, binary } op;
    unsigned char fn;
    std::size_t index;
    double value;
  };
  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
};

/// One-shot evaluation. Compiles on every call; prefer CompiledExpr in loops.
double eval_expr(const Expr& expr, std::span<const double> row, EvalNotes* notes = nullptr);

}  // namespace lmpso::symreg
