#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>

#include "hilfer/errors.hpp"

namespace hilfer {

enum class Var { t, z };
enum class UnaryOp { neg, sin, cos, abs, exp, log, sqrt };
enum class BinaryOp { add, sub, mul, div, pow };

/// Immutable expression tree in the variables t and z.
///
/// Nodes are shared, so copying an Expr is cheap and a parsed tree can be
/// evaluated concurrently from any number of threads.
class Expr {
 public:
  struct Number {
    double value;
  };
  struct Variable {
    Var var;
  };
  struct Unary;
  struct Binary;
  using Node = std::variant<Number, Variable, Unary, Binary>;

  Expr();

  static Expr number(double v, std::size_t offset = 0);
  static Expr variable(Var v, std::size_t offset = 0);
  static Expr unary(UnaryOp op, Expr arg, std::size_t offset = 0);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t offset = 0);

  const Node& node() const;
  /// Byte offset of the token that produced this node in the parsed source.
  std::size_t offset() const;

  /// Structural equality; source offsets are ignored.
  friend bool operator==(const Expr& x, const Expr& y);

 private:
  struct Data;
  explicit Expr(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

struct Expr::Unary {
  UnaryOp op;
  Expr arg;
};

struct Expr::Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};

struct Expr::Data {
  Node node;
  std::size_t offset;
};

inline Expr::Expr() : Expr(number(0.0)) {}

inline Expr Expr::number(double v, std::size_t offset) {
  return Expr(std::make_shared<const Data>(Data{Number{v}, offset}));
}
inline Expr Expr::variable(Var v, std::size_t offset) {
  return Expr(std::make_shared<const Data>(Data{Variable{v}, offset}));
}
inline Expr Expr::unary(UnaryOp op, Expr arg, std::size_t offset) {
  return Expr(std::make_shared<const Data>(Data{Unary{op, std::move(arg)}, offset}));
}
inline Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t offset) {
  return Expr(std::make_shared<const Data>(Data{Binary{op, std::move(lhs), std::move(rhs)}, offset}));
}

inline const Expr::Node& Expr::node() const { return data_->node; }
inline std::size_t Expr::offset() const { return data_->offset; }

inline bool operator==(const Expr& x, const Expr& y) {
  if (x.data_ == y.data_) return true;
  const Expr::Node& a = x.node();
  const Expr::Node& b = y.node();
  if (a.index() != b.index()) return false;
  if (auto* n = std::get_if<Expr::Number>(&a)) return n->value == std::get<Expr::Number>(b).value;
  if (auto* v = std::get_if<Expr::Variable>(&a)) return v->var == std::get<Expr::Variable>(b).var;
  if (auto* u = std::get_if<Expr::Unary>(&a)) {
    const auto& ub = std::get<Expr::Unary>(b);
    return u->op == ub.op && u->arg == ub.arg;
  }
  const auto& ba = std::get<Expr::Binary>(a);
  const auto& bb = std::get<Expr::Binary>(b);
  return ba.op == bb.op && ba.lhs == bb.lhs && ba.rhs == bb.rhs;
}

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "expression (input is empty)");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) throw ParseError(pos_, "operator or end of input");
    return e;
  }

 private:
  // expr := term (('+'|'-') term)*
  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (pos_ >= src_.size()) return lhs;
      const char c = src_[pos_];
      if (c != '+' && c != '-') return lhs;
      const std::size_t at = pos_++;
      Expr rhs = parse_term();
      lhs = Expr::binary(c == '+' ? BinaryOp::add : BinaryOp::sub, std::move(lhs), std::move(rhs), at);
    }
  }

  // term := factor (('*'|'/') factor)*
  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (pos_ >= src_.size()) return lhs;
      const char c = src_[pos_];
      if (c != '*' && c != '/') return lhs;
      const std::size_t at = pos_++;
      Expr rhs = parse_factor();
      lhs = Expr::binary(c == '*' ? BinaryOp::mul : BinaryOp::div, std::move(lhs), std::move(rhs), at);
    }
  }

  // factor := base ('^' factor)?   (right-associative)
  Expr parse_factor() {
    Expr base = parse_base();
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '^') {
      const std::size_t at = pos_++;
      Expr exponent = parse_factor();
      return Expr::binary(BinaryOp::pow, std::move(base), std::move(exponent), at);
    }
    return base;
  }

  // base := number | 't' | 'z' | ident '(' expr ')' | '(' expr ')' | '-' base
  Expr parse_base() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "number, variable, function call or '('");
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::unary(UnaryOp::neg, parse_base(), at);
    }
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_alpha(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && (is_alpha(src_[end]) || is_digit(src_[end]) || src_[end] == '_')) ++end;
      const std::string_view ident = src_.substr(pos_, end - pos_);
      if (ident == "t" || ident == "z") {
        pos_ = end;
        return Expr::variable(ident == "t" ? Var::t : Var::z, at);
      }
      UnaryOp op{};
      if (!function_named(ident, op)) {
        throw ParseError(at, "known identifier (t, z, sin, cos, abs, exp, log, sqrt), found '" +
                                 std::string(ident) + "'");
      }
      pos_ = end;
      expect('(');
      Expr arg = parse_expr();
      expect(')');
      return Expr::unary(op, std::move(arg), at);
    }
    throw ParseError(at, "number, variable, function call or '('");
  }

  Expr parse_number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && is_digit(src_[end])) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && is_digit(src_[end])) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) ++exp_end;
      if (exp_end < src_.size() && is_digit(src_[exp_end])) {
        while (exp_end < src_.size() && is_digit(src_[exp_end])) ++exp_end;
        end = exp_end;
      } else {
        throw ParseError(exp_end, "digits in exponent");
      }
    }
    double value = 0.0;
    const char* first = src_.data() + at;
    const char* last = src_.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) throw ParseError(at, "number within double range");
    if (ec != std::errc() || ptr != last) throw ParseError(at, "number");
    pos_ = end;
    return Expr::number(value, at);
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c) throw ParseError(pos_, std::string("'") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

  static bool function_named(std::string_view name, UnaryOp& op) {
    if (name == "sin") op = UnaryOp::sin;
    else if (name == "cos") op = UnaryOp::cos;
    else if (name == "abs") op = UnaryOp::abs;
    else if (name == "exp") op = UnaryOp::exp;
    else if (name == "log") op = UnaryOp::log;
    else if (name == "sqrt") op = UnaryOp::sqrt;
    else return false;
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "-";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::abs: return "abs";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sqrt: return "sqrt";
  }
  return "?";
}

inline char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

}  // namespace detail

/// Parse an expression in t and z.
///
/// Grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
/// factor := base ('^' factor)?; base := number | t | z | ident '(' expr ')'
/// | '(' expr ')' | '-' base. Unary minus binds tighter than '^', so "-2^2"
/// is (-2)^2.
inline Expr parse(std::string_view source) { return detail::ExprParser(source).parse(); }

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

/// Fully parenthesized rendering; parse(to_string(e)) == e.
inline std::string to_string(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Number>) {
          return format_double(n.value);
        } else if constexpr (std::is_same_v<T, Expr::Variable>) {
          return n.var == Var::t ? "t" : "z";
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          return std::string(detail::unary_name(n.op)) + "(" + to_string(n.arg) + ")";
        } else {
          return "(" + to_string(n.lhs) + " " + detail::binary_symbol(n.op) + " " + to_string(n.rhs) + ")";
        }
      },
      e.node());
}

/// True when the tree references the given variable.
inline bool uses(const Expr& e, Var v) {
  return std::visit(
      [v](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Number>) {
          return false;
        } else if constexpr (std::is_same_v<T, Expr::Variable>) {
          return n.var == v;
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          return uses(n.arg, v);
        } else {
          return uses(n.lhs, v) || uses(n.rhs, v);
        }
      },
      e.node());
}

/// Evaluate at (t, z). Domain violations raise EvalError instead of
/// producing NaN or infinity.
inline double eval(const Expr& e, double t, double z) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Expr::Number>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Expr::Variable>) {
          return n.var == Var::t ? t : z;
        } else if constexpr (std::is_same_v<T, Expr::Unary>) {
          const double x = eval(n.arg, t, z);
          switch (n.op) {
            case UnaryOp::neg: return -x;
            case UnaryOp::sin: return std::sin(x);
            case UnaryOp::cos: return std::cos(x);
            case UnaryOp::abs: return std::abs(x);
            case UnaryOp::exp: {
              const double r = std::exp(x);
              if (std::isinf(r) && std::isfinite(x)) throw EvalError(e.offset(), "exp overflow");
              return r;
            }
            case UnaryOp::log:
              if (!(x > 0.0)) throw EvalError(e.offset(), "log of non-positive value " + format_double(x));
              return std::log(x);
            case UnaryOp::sqrt:
              if (x < 0.0) throw EvalError(e.offset(), "sqrt of negative value " + format_double(x));
              return std::sqrt(x);
          }
          return x;
        } else {
          const double x = eval(n.lhs, t, z);
          const double y = eval(n.rhs, t, z);
          switch (n.op) {
            case BinaryOp::add: return x + y;
            case BinaryOp::sub: return x - y;
            case BinaryOp::mul: return x * y;
            case BinaryOp::div:
              if (y == 0.0) throw EvalError(e.offset(), "division by zero");
              return x / y;
            case BinaryOp::pow: {
              if (x == 0.0 && y < 0.0) throw EvalError(e.offset(), "zero raised to a negative power");
              if (x < 0.0 && y != std::trunc(y)) {
                throw EvalError(e.offset(), "negative base raised to a non-integer power");
              }
              const double r = std::pow(x, y);
              if (std::isinf(r) && std::isfinite(x) && std::isfinite(y)) {
                throw EvalError(e.offset(), "power overflow");
              }
              return r;
            }
          }
          return x;
        }
      },
      e.node());
}

}  // namespace hilfer
