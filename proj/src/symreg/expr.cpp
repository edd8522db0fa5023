#include "lmpso/symreg/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "lmpso/swarm/prompt_template.hpp"

namespace lmpso::symreg {

namespace {

constexpr std::array<std::pair<std::string_view, UnaryOp>, 8> kUnaryNames{{
    {"log", UnaryOp::log},
    {"sqrt", UnaryOp::sqrt},
    {"abs", UnaryOp::abs},
    {"neg", UnaryOp::neg},
    {"inv", UnaryOp::inv},
    {"sin", UnaryOp::sin},
    {"cos", UnaryOp::cos},
    {"exp", UnaryOp::exp},
}};

constexpr std::array<std::pair<std::string_view, BinaryOp>, 7> kBinaryNames{{
    {"add", BinaryOp::add},
    {"sub", BinaryOp::sub},
    {"mul", BinaryOp::mul},
    {"div", BinaryOp::div},
    {"max", BinaryOp::max},
    {"min", BinaryOp::min},
    {"pow", BinaryOp::pow},
}};

}  // namespace

std::string_view to_string(UnaryOp op) noexcept {
  for (const auto& [name, o] : kUnaryNames) {
    if (o == op) return name;
  }
  return "?";
}

std::string_view to_string(BinaryOp op) noexcept {
  for (const auto& [name, o] : kBinaryNames) {
    if (o == op) return name;
  }
  return "?";
}

std::optional<UnaryOp> unary_from_name(std::string_view name) noexcept {
  for (const auto& [n, o] : kUnaryNames) {
    if (n == name) return o;
  }
  return std::nullopt;
}

std::optional<BinaryOp> binary_from_name(std::string_view name) noexcept {
  for (const auto& [n, o] : kBinaryNames) {
    if (n == name) return o;
  }
  return std::nullopt;
}

Expr Expr::constant(double v) {
  Expr e;
  e.kind = Kind::constant;
  e.value = v;
  return e;
}

Expr Expr::variable(std::size_t i) {
  Expr e;
  e.kind = Kind::variable;
  e.index = i;
  return e;
}

Expr Expr::unary(UnaryOp op, Expr child) {
  Expr e;
  e.kind = Kind::unary;
  e.unary_op = op;
  e.children.push_back(std::move(child));
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::binary;
  e.binary_op = op;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

std::size_t Expr::size() const noexcept {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::size_t Expr::depth() const noexcept {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

std::optional<std::size_t> Expr::max_variable() const noexcept {
  std::optional<std::size_t> best;
  if (kind == Kind::variable) best = index;
  for (const auto& c : children) {
    if (auto m = c.max_variable(); m && (!best || *m > *best)) best = m;
  }
  return best;
}

bool Expr::operator==(const Expr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::constant:
      return value == o.value;
    case Kind::variable:
      return index == o.index;
    case Kind::unary:
      return unary_op == o.unary_op && children == o.children;
    case Kind::binary:
      return binary_op == o.binary_op && children == o.children;
  }
  return false;
}

// ---------------------------------------------------------------------------
// printing

namespace {

enum Prec { kAdd = 1, kMul = 2, kNeg = 3, kPow = 4, kAtom = 5 };

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::constant:
    case Expr::Kind::variable:
      return kAtom;
    case Expr::Kind::unary:
      return e.unary_op == UnaryOp::neg ? kNeg : kAtom;
    case Expr::Kind::binary:
      switch (e.binary_op) {
        case BinaryOp::add:
        case BinaryOp::sub:
          return kAdd;
        case BinaryOp::mul:
        case BinaryOp::div:
          return kMul;
        case BinaryOp::pow:
          return kPow;
        default:
          return kAtom;
      }
  }
  return kAtom;
}

void print(const Expr& e, std::string& out);

void print_min(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::constant:
      if (e.value < 0 || (e.value == 0 && std::signbit(e.value))) {
        out += '(' + swarm::format_number(e.value) + ')';
      } else {
        out += swarm::format_number(e.value);
      }
      return;
    case Expr::Kind::variable:
      out += 'x' + std::to_string(e.index);
      return;
    case Expr::Kind::unary:
      if (e.unary_op == UnaryOp::neg) {
        out += '-';
        // "--x" is legal but "-(-x)" reads better.
        print_min(e.children[0], e.children[0].kind == Expr::Kind::unary &&
                                         e.children[0].unary_op == UnaryOp::neg
                                     ? kAtom
                                     : kNeg,
                  out);
      } else {
        out += to_string(e.unary_op);
        out += '(';
        print(e.children[0], out);
        out += ')';
      }
      return;
    case Expr::Kind::binary: {
      const auto& l = e.children[0];
      const auto& r = e.children[1];
      switch (e.binary_op) {
        case BinaryOp::add:
        case BinaryOp::sub:
          print_min(l, kAdd, out);
          out += e.binary_op == BinaryOp::add ? " + " : " - ";
          print_min(r, kMul, out);
          return;
        case BinaryOp::mul:
        case BinaryOp::div:
          print_min(l, kMul, out);
          out += e.binary_op == BinaryOp::mul ? " * " : " / ";
          print_min(r, kNeg, out);
          return;
        case BinaryOp::pow:
          print_min(l, kAtom, out);
          out += " ^ ";
          print_min(r, kNeg, out);
          return;
        case BinaryOp::max:
        case BinaryOp::min:
          out += to_string(e.binary_op);
          out += '(';
          print(l, out);
          out += ", ";
          print(r, out);
          out += ')';
          return;
      }
    }
  }
}

}  // namespace

std::string to_string(const Expr& expr) {
  std::string out;
  print(expr, out);
  return out;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t dim) : s_(text), dim_(dim) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expression");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < s_.size()) fail("operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(std::string_view expected) const {
    std::string found = pos_ < s_.size() ? "'" + std::string(1, s_[pos_]) + "'" : "end of input";
    throw ExprError(ExprError::Kind::parse_error, pos_,
                    "at " + std::to_string(pos_) + ": expected " + std::string(expected) +
                        ", found " + found);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_pow() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      return true;
    }
    if (pos_ + 1 < s_.size() && s_[pos_] == '*' && s_[pos_ + 1] == '*') {
      pos_ += 2;
      return true;
    }
    return false;
  }

  bool peek_mul() {
    skip_ws();
    return pos_ < s_.size() && ((s_[pos_] == '*' && !(pos_ + 1 < s_.size() && s_[pos_ + 1] == '*')) ||
                                s_[pos_] == '/');
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (true) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::add, std::move(lhs), parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::sub, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (peek_mul()) {
      const char op = s_[pos_++];
      Expr rhs = parse_unary();
      lhs = Expr::binary(op == '*' ? BinaryOp::mul : BinaryOp::div, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_unary() {
    struct Guard {
      std::size_t& d;
      explicit Guard(std::size_t& depth) : d(depth) { ++d; }
      ~Guard() { --d; }
    } guard(nesting_);
    if (nesting_ > kMaxNesting) fail("shallower nesting");
    if (accept('-')) return Expr::unary(UnaryOp::neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept_pow()) return Expr::binary(BinaryOp::pow, std::move(base), parse_unary());
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("operand");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail("')'");
      return inner;
    }
    if (c == '|') fail("operand (absolute-value bars are not supported, use abs(...))");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("operand");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc{} || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("number");
    }
    return Expr::constant(v);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(s_.substr(start, pos_ - start));
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });

    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      if (auto op = unary_from_name(lower)) {
        Expr arg = parse_expr();
        if (!accept(')')) fail("')' after the single argument of " + lower);
        return Expr::unary(*op, std::move(arg));
      }
      if (auto op = binary_from_name(lower)) {
        Expr a = parse_expr();
        if (!accept(',')) fail("',' in " + lower + "(a, b)");
        Expr b = parse_expr();
        if (!accept(')')) fail("')' closing " + lower + "(a, b)");
        return Expr::binary(*op, std::move(a), std::move(b));
      }
      throw ExprError(ExprError::Kind::unknown_function, start, "unknown function '" + name + "'");
    }

    if (lower.size() >= 2 && lower[0] == 'x') {
      std::size_t digits_from = lower[1] == '_' ? 2 : 1;
      std::size_t idx = 0;
      const char* first = lower.data() + digits_from;
      const char* last = lower.data() + lower.size();
      auto [ptr, ec] = std::from_chars(first, last, idx);
      if (ec == std::errc{} && ptr == last && first != last) {
        if (idx >= dim_) {
          throw ExprError(ExprError::Kind::unknown_variable, start,
                          "variable '" + name + "' out of range (dimension " + std::to_string(dim_) + ")");
        }
        return Expr::variable(idx);
      }
    }
    throw ExprError(ExprError::Kind::unknown_variable, start, "unknown variable '" + name + "'");
  }

  static constexpr std::size_t kMaxNesting = 256;

  std::string_view s_;
  std::size_t dim_;
  std::size_t pos_ = 0;
  std::size_t nesting_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, std::size_t dim) { return Parser(text, dim).parse(); }

}  // namespace lmpso::symreg
