#include "lmpso/symreg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmpso::symreg {
namespace {

inline double finite_or_zero(double v, EvalNotes& notes) {
  if (std::isfinite(v)) return v;
  ++notes.non_finite;
  return 0.0;
}

double apply_unary(UnaryOp op, double x, EvalNotes& notes) {
  switch (op) {
    case UnaryOp::log:
      if (x == 0.0) {
        ++notes.log_zero;
        return 0.0;
      }
      return finite_or_zero(std::log(std::fabs(x)), notes);
    case UnaryOp::sqrt:
      return std::sqrt(std::fabs(x));
    case UnaryOp::abs:
      return std::fabs(x);
    case UnaryOp::neg:
      return -x;
    case UnaryOp::inv:
      if (x == 0.0) {
        ++notes.zero_division;
        return 1.0;
      }
      return finite_or_zero(1.0 / x, notes);
    case UnaryOp::sin:
      return std::sin(x);
    case UnaryOp::cos:
      return std::cos(x);
    case UnaryOp::exp:
      return finite_or_zero(std::exp(x), notes);
  }
  return 0.0;
}

double apply_binary(BinaryOp op, double a, double b, EvalNotes& notes) {
  switch (op) {
    case BinaryOp::add:
      return finite_or_zero(a + b, notes);
    case BinaryOp::sub:
      return finite_or_zero(a - b, notes);
    case BinaryOp::mul:
      return finite_or_zero(a * b, notes);
    case BinaryOp::div:
      if (b == 0.0) {
        ++notes.zero_division;
        return 1.0;
      }
      return finite_or_zero(a / b, notes);
    case BinaryOp::max:
      return std::max(a, b);
    case BinaryOp::min:
      return std::min(a, b);
    case BinaryOp::pow: {
      const double r = std::pow(a, b);
      if (std::isnan(r)) {
        ++notes.non_finite;
        return 0.0;
      }
      if (std::fabs(r) > kPowClamp) {
        ++notes.pow_clamped;
        return std::copysign(kPowClamp, r);
      }
      return r;
    }
  }
  return 0.0;
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& expr) {
  std::size_t depth = 0;
  // Post-order walk with an explicit stack: (node, children_done).
  std::vector<std::pair<const Expr*, bool>> work{{&expr, false}};
  while (!work.empty()) {
    auto [node, done] = work.back();
    work.pop_back();
    if (!done && !node->children.empty()) {
      work.emplace_back(node, true);
      for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) {
        work.emplace_back(&*it, false);
      }
      continue;
    }
    switch (node->kind) {
      case Expr::Kind::constant:
        code_.push_back({Instr::Op::push_const, 0, 0, node->value});
        max_stack_ = std::max(max_stack_, ++depth);
        break;
      case Expr::Kind::variable:
        code_.push_back({Instr::Op::push_var, 0, node->index, 0.0});
        max_stack_ = std::max(max_stack_, ++depth);
        break;
      case Expr::Kind::unary:
        code_.push_back({Instr::Op::unary, static_cast<unsigned char>(node->unary_op), 0, 0.0});
        break;
      case Expr::Kind::binary:
        code_.push_back({Instr::Op::binary, static_cast<unsigned char>(node->binary_op), 0, 0.0});
        --depth;
        break;
    }
  }
}

double CompiledExpr::operator()(std::span<const double> row, EvalNotes* notes) const {
  EvalNotes local;
  EvalNotes& n = notes ? *notes : local;
  // Small fixed buffer covers typical expressions; deeper ones use the heap.
  constexpr std::size_t kInline = 64;
  double inline_stack[kInline] = {};
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_stack_ > kInline) {
    heap.resize(max_stack_);
    stack = heap.data();
  }
  std::size_t sp = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Instr::Op::push_const:
        stack[sp++] = finite_or_zero(ins.value, n);
        break;
      case Instr::Op::push_var:
        if (ins.index >= row.size()) throw std::out_of_range("row shorter than expression dimension");
        stack[sp++] = finite_or_zero(row[ins.index], n);
        break;
      case Instr::Op::unary:
        stack[sp - 1] = apply_unary(static_cast<UnaryOp>(ins.fn), stack[sp - 1], n);
        break;
      case Instr::Op::binary:
        --sp;
        stack[sp - 1] = apply_binary(static_cast<BinaryOp>(ins.fn), stack[sp - 1], stack[sp], n);
        break;
    }
  }
  return stack[0];
}

double eval_expr(const Expr& expr, std::span<const double> row, EvalNotes* notes) {
  return CompiledExpr(expr)(row, notes);
}

}  // namespace lmpso::symreg
