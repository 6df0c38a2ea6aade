#pragma once

// Closed-form expression language used for every smooth map in the library:
// chart transitions, cocycles, morphism components and collars.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' exponent)*
//   exponent:= '-' exponent | primary
//   primary := number | 'pi' | ident | func '(' expr ')' | '(' expr ')'
//
// Binary operators are left-associative. Whitespace is insignificant.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmunfold/error.hpp"

namespace tmunfold {

enum class Op {
  var,
  num,
  pi,
  neg,
  abs,
  sin,
  cos,
  tan,
  exp,
  log,
  sqrt,
  sign,
  add,
  sub,
  mul,
  div,
  pow,
};

namespace detail {

struct FunctionName {
  std::string_view name;
  Op op;
};

inline constexpr std::array<FunctionName, 8> kFunctions{{
    {"abs", Op::abs},
    {"sin", Op::sin},
    {"cos", Op::cos},
    {"tan", Op::tan},
    {"exp", Op::exp},
    {"log", Op::log},
    {"sqrt", Op::sqrt},
    {"sign", Op::sign},
}};

inline std::optional<Op> function_op(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f.op;
  return std::nullopt;
}

inline std::string_view function_name(Op op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return {};
}

inline bool is_unary(Op op) { return op >= Op::neg && op <= Op::sign; }
inline bool is_binary(Op op) { return op >= Op::add; }

}  // namespace detail

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  struct Node {
    Op op = Op::num;
    double value = 0.0;
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expr() : node_(make(Op::num, 0.0)) {}

  static Expr number(double v) { return Expr(make(Op::num, v)); }
  static Expr variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::var;
    n->name = std::move(name);
    return Expr(std::move(n));
  }
  static Expr constant_pi() { return Expr(make(Op::pi, 0.0)); }
  static Expr unary(Op op, const Expr& arg) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = arg.node_;
    return Expr(std::move(n));
  }
  static Expr binary(Op op, const Expr& a, const Expr& b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expr(std::move(n));
  }

  Op op() const noexcept { return node_->op; }
  double value() const noexcept { return node_->value; }
  const std::string& name() const noexcept { return node_->name; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  /// Names of all variables referenced, sorted.
  std::set<std::string> free_variables() const {
    std::set<std::string> out;
    collect(*node_, out);
    return out;
  }

  bool structurally_equal(const Expr& other) const { return equal(*node_, *other.node_); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make(Op op, double v) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = v;
    return n;
  }

  static void collect(const Node& n, std::set<std::string>& out) {
    if (n.op == Op::var) out.insert(n.name);
    if (n.lhs) collect(*n.lhs, out);
    if (n.rhs) collect(*n.rhs, out);
  }

  static bool equal(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    if (a.op == Op::num) return a.value == b.value;
    if (a.op == Op::var) return a.name == b.name;
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
    if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
    if (a.lhs && !equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !equal(*a.rhs, *b.rhs)) return false;
    return true;
  }

  std::shared_ptr<const Node> node_;
};

/// Variable bindings. Small and flat; lookups are linear.
class Env {
 public:
  Env() = default;
  Env(std::initializer_list<std::pair<std::string, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
  }

  void set(const std::string& name, double v) {
    for (auto& [k, val] : bindings_)
      if (k == name) {
        val = v;
        return;
      }
    bindings_.emplace_back(name, v);
  }

  const double* find(const std::string& name) const {
    for (const auto& [k, val] : bindings_)
      if (k == name) return &val;
    return nullptr;
  }

  double get(const std::string& name) const {
    if (const double* v = find(name)) return *v;
    throw UnboundVariable(name);
  }

  std::size_t size() const noexcept { return bindings_.size(); }

 private:
  std::vector<std::pair<std::string, double>> bindings_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail({"operator", "end of input"});
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::string msg = "syntax error at offset " + std::to_string(pos_) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += " | ";
      msg += expected[i];
    }
    throw SyntaxError(pos_, std::move(expected), msg);
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = Expr::binary(Op::add, lhs, parse_term());
      else if (accept('-'))
        lhs = Expr::binary(Op::sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = Expr::binary(Op::mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = Expr::binary(Op::div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::unary(Op::neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (accept('^')) base = Expr::binary(Op::pow, base, parse_exponent());
    return base;
  }

  Expr parse_exponent() {
    if (accept('-')) return Expr::unary(Op::neg, parse_exponent());
    return parse_primary();
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "identifier", "("});
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!accept(')')) fail({")"});
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      const std::string_view ident = src_.substr(start, pos_ - start);
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        auto op = function_op(ident);
        if (!op) throw UnknownFunction(std::string(ident), start);
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) fail({")"});
        return Expr::unary(*op, arg);
      }
      if (ident == "pi") return Expr::constant_pi();
      return Expr::variable(std::string(ident));
    }
    fail({"number", "identifier", "("});
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && ((src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && src_[p] >= '0' && src_[p] <= '9') {
        pos_ = p;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
      }
    }
    double v = 0.0;
    const auto* first = src_.data() + start;
    const auto* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail({"number"});
    }
    return Expr::number(v);
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainEvalError(std::string("non-finite result in ") + what);
  return v;
}

inline double eval_node(const Expr& e, const Env& env) {
  switch (e.op()) {
    case Op::num:
      return e.value();
    case Op::pi:
      return std::numbers::pi;
    case Op::var:
      return env.get(e.name());
    case Op::neg:
      return -eval_node(e.lhs(), env);
    case Op::abs:
      return std::abs(eval_node(e.lhs(), env));
    case Op::sin:
      return std::sin(eval_node(e.lhs(), env));
    case Op::cos:
      return std::cos(eval_node(e.lhs(), env));
    case Op::tan:
      return checked(std::tan(eval_node(e.lhs(), env)), "tan");
    case Op::exp:
      return checked(std::exp(eval_node(e.lhs(), env)), "exp");
    case Op::log: {
      const double x = eval_node(e.lhs(), env);
      if (!(x > 0.0)) throw DomainEvalError("log of nonpositive value " + std::to_string(x));
      return std::log(x);
    }
    case Op::sqrt: {
      const double x = eval_node(e.lhs(), env);
      if (x < 0.0) throw DomainEvalError("sqrt of negative value " + std::to_string(x));
      return std::sqrt(x);
    }
    case Op::sign: {
      const double x = eval_node(e.lhs(), env);
      return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    }
    case Op::add:
      return checked(eval_node(e.lhs(), env) + eval_node(e.rhs(), env), "+");
    case Op::sub:
      return checked(eval_node(e.lhs(), env) - eval_node(e.rhs(), env), "-");
    case Op::mul:
      return checked(eval_node(e.lhs(), env) * eval_node(e.rhs(), env), "*");
    case Op::div: {
      const double num = eval_node(e.lhs(), env);
      const double den = eval_node(e.rhs(), env);
      if (den == 0.0) throw DomainEvalError("division by zero");
      return checked(num / den, "/");
    }
    case Op::pow:
      return checked(std::pow(eval_node(e.lhs(), env), eval_node(e.rhs(), env)), "^");
  }
  throw DomainEvalError("corrupt expression node");
}

inline void print_node(const Expr& e, std::string& out) {
  auto sub = [&out](const Expr& child) {
    const bool atomic = child.op() == Op::num || child.op() == Op::var || child.op() == Op::pi;
    if (atomic) {
      print_node(child, out);
    } else {
      out += '(';
      print_node(child, out);
      out += ')';
    }
  };
  switch (e.op()) {
    case Op::num: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value());
      out += buf;
      return;
    }
    case Op::pi:
      out += "pi";
      return;
    case Op::var:
      out += e.name();
      return;
    case Op::neg:
      out += '-';
      sub(e.lhs());
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: {
      static constexpr char kSym[] = {'+', '-', '*', '/', '^'};
      sub(e.lhs());
      out += ' ';
      out += kSym[static_cast<int>(e.op()) - static_cast<int>(Op::add)];
      out += ' ';
      sub(e.rhs());
      return;
    }
    default:
      out += function_name(e.op());
      out += '(';
      print_node(e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace detail

inline Expr parse_expr(std::string_view source) { return detail::Parser(source).parse(); }

/// Exact recursive evaluation in double precision.
inline double eval(const Expr& e, const Env& env) { return detail::eval_node(e, env); }

/// Pretty-printer whose output reparses to a structurally identical tree.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_node(e, out);
  return out;
}

/// Replaces every occurrence of variable `name` by `replacement`.
inline Expr substitute(const Expr& e, const std::string& name, const Expr& replacement) {
  switch (e.op()) {
    case Op::var:
      return e.name() == name ? replacement : e;
    case Op::num:
    case Op::pi:
      return e;
    default:
      break;
  }
  if (detail::is_binary(e.op()))
    return Expr::binary(e.op(), substitute(e.lhs(), name, replacement),
                        substitute(e.rhs(), name, replacement));
  return Expr::unary(e.op(), substitute(e.lhs(), name, replacement));
}

enum class Side { central, left, right };

inline constexpr double kDefaultStepFirst = 1e-4;
inline constexpr double kDefaultStepHigher = 1e-3;

/// Finite-difference derivative of `e` with respect to `var` at `env`.
///
/// Central stencils are symmetric and second-order accurate. One-sided
/// stencils use order+2 points on the chosen side (second-order accurate).
/// When `bounds` is given, every stencil point must lie inside it.
inline double diff_fd(const Expr& e, const std::string& var, const Env& env, int order, Side side,
                      double h, std::optional<std::pair<double, double>> bounds = std::nullopt) {
  if (order < 1 || order > 3) throw Error("diff_fd: order must be 1, 2 or 3");
  if (!(h > 0.0)) throw Error("diff_fd: step must be positive");
  const double x0 = env.get(var);

  struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;
    double scale;
  };
  Stencil s;
  if (side == Side::central) {
    switch (order) {
      case 1:
        s = {{-1, 1}, {-0.5, 0.5}, h};
        break;
      case 2:
        s = {{-1, 0, 1}, {1.0, -2.0, 1.0}, h * h};
        break;
      default:
        s = {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}, h * h * h};
        break;
    }
  } else {
    switch (order) {
      case 1:
        s = {{0, 1, 2}, {-1.5, 2.0, -0.5}, h};
        break;
      case 2:
        s = {{0, 1, 2, 3}, {2.0, -5.0, 4.0, -1.0}, h * h};
        break;
      default:
        s = {{0, 1, 2, 3, 4}, {-2.5, 9.0, -12.0, 7.0, -1.5}, h * h * h};
        break;
    }
    if (side == Side::left) {
      // Mirror the forward stencil: f^(k) picks up (-1)^k.
      for (auto& o : s.offsets) o = -o;
      if (order % 2 == 1)
        for (auto& w : s.weights) w = -w;
    }
  }

  if (bounds) {
    for (int o : s.offsets) {
      const double x = x0 + o * h;
      if (x < bounds->first || x > bounds->second)
        throw StencilOutOfDomain("stencil point " + std::to_string(x) + " for '" + var +
                                 "' outside [" + std::to_string(bounds->first) + ", " +
                                 std::to_string(bounds->second) + "]");
    }
  }

  Env probe = env;
  double acc = 0.0;
  for (std::size_t i = 0; i < s.offsets.size(); ++i) {
    probe.set(var, x0 + s.offsets[i] * h);
    acc += s.weights[i] * eval(e, probe);
  }
  return acc / s.scale;
}

}  // namespace tmunfold
