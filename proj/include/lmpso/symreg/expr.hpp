#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmpso::symreg {

enum class UnaryOp { log, sqrt, abs, neg, inv, sin, cos, exp };
enum class BinaryOp { add, sub, mul, div, max, min, pow };

std::string_view to_string(UnaryOp op) noexcept;
std::string_view to_string(BinaryOp op) noexcept;
std::optional<UnaryOp> unary_from_name(std::string_view lowercase_name) noexcept;
std::optional<BinaryOp> binary_from_name(std::string_view lowercase_name) noexcept;

/// Expression tree node with value semantics.
struct Expr {
  enum class Kind { constant, variable, unary, binary };

  Kind kind = Kind::constant;
  double value = 0.0;         // constant
  std::size_t index = 0;      // variable
  UnaryOp unary_op{};         // unary
  BinaryOp binary_op{};       // binary
  std::vector<Expr> children;  // 1 for unary, 2 for binary

  static Expr constant(double v);
  static Expr variable(std::size_t i);
  static Expr unary(UnaryOp op, Expr child);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  /// Node count: the expression length metric.
  std::size_t size() const noexcept;
  std::size_t depth() const noexcept;
  /// Largest variable index used, or nullopt for variable-free expressions.
  std::optional<std::size_t> max_variable() const noexcept;

  bool operator==(const Expr& other) const;
};

/// Infix rendering that parses back to the same tree. Variables print as x0,
/// x1, ...; unary minus as a leading '-'; max/min and the named unary
/// functions as calls; powers with '^'.
std::string to_string(const Expr& expr);

class ExprError : public std::runtime_error {
 public:
  enum class Kind { parse_error, unknown_variable, unknown_function };

  ExprError(Kind kind, std::size_t position, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind), position_(position) {}

  Kind kind() const noexcept { return kind_; }
  /// Byte offset into the parsed text.
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Recursive-descent parser.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary (('^' | '**') unary)?       right-associative
///   primary := number | x<k> | name '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Function names are case-insensitive; variables must satisfy k < dim.
/// Absolute-value bars are rejected, write abs(...).
Expr parse_expr(std::string_view text, std::size_t dim);

}  // namespace lmpso::symreg
