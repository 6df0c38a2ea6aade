#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "tmunfold/expr.hpp"

using namespace tmunfold;

namespace {

double ev(const std::string& s, const Env& env = {}) { return eval(parse_expr(s), env); }

// random well-formed source text
std::string gen(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  static const char* vars[] = {"u", "l", "r"};
  static const char* fns[] = {"sin", "cos", "exp", "abs", "sign", "tan"};
  switch (pick(rng)) {
    case 0:
      return vars[rng() % 3];
    case 1:
      return std::to_string(static_cast<int>(rng() % 7));
    case 2:
      return "pi";
    case 3:
      return "-" + gen(rng, depth - 1);
    case 4:
      return std::string(fns[rng() % 6]) + "(" + gen(rng, depth - 1) + ")";
    case 5:
      return "(" + gen(rng, depth - 1) + ")^" + std::to_string(rng() % 4);
    case 6:
      return gen(rng, depth - 1) + " * " + gen(rng, depth - 1);
    case 7:
      return gen(rng, depth - 1) + "/(2 + " + gen(rng, depth - 1) + ")";
    case 8:
      return gen(rng, depth - 1) + " - " + gen(rng, depth - 1);
    default:
      return "(" + gen(rng, depth - 1) + " + " + gen(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST(Parse, FreeVariables) {
  const Expr e = parse_expr("u + r*sin(l)");
  EXPECT_EQ(e.free_variables(), (std::set<std::string>{"u", "r", "l"}));
}

TEST(Parse, NegBindsLooserThanPow) {
  for (double r : {-2.0, -0.5, 0.0, 1.5, 3.0}) EXPECT_DOUBLE_EQ(ev("-(r)^2", {{"r", r}}), -(r * r));
  EXPECT_DOUBLE_EQ(ev("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(ev("2^-1"), 0.5);
}

TEST(Parse, Precedence) {
  EXPECT_DOUBLE_EQ(ev("1 + 2*3"), 7.0);
  EXPECT_DOUBLE_EQ(ev("8/4/2"), 1.0);
  EXPECT_DOUBLE_EQ(ev("2*3^2"), 18.0);
  EXPECT_DOUBLE_EQ(ev("(1+2)*3"), 9.0);
  EXPECT_DOUBLE_EQ(ev("10 - 3 - 2"), 5.0);
  EXPECT_DOUBLE_EQ(ev(" 1\t+\n2 "), 3.0);
}

TEST(Parse, SyntaxErrorOffset) {
  try {
    parse_expr("r + ");
    FAIL() << "no throw";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_FALSE(e.expected().empty());
  }
  EXPECT_THROW(parse_expr("(r"), SyntaxError);
  EXPECT_THROW(parse_expr("r r"), SyntaxError);
  EXPECT_THROW(parse_expr(""), SyntaxError);
}

TEST(Parse, UnknownFunction) {
  try {
    parse_expr("1 + cosh(r)");
    FAIL() << "no throw";
  } catch (const UnknownFunction& e) {
    EXPECT_EQ(e.name(), "cosh");
  }
}

TEST(Eval, Examples) {
  EXPECT_DOUBLE_EQ(ev("2*r", {{"r", 3}}), 6.0);
  EXPECT_NEAR(ev("sin(pi)"), 0.0, 1e-12);
  EXPECT_THROW(ev("log(r)", {{"r", 0}}), DomainEvalError);
  EXPECT_THROW(ev("sqrt(r)", {{"r", -1}}), DomainEvalError);
  EXPECT_THROW(ev("1/r", {{"r", 0}}), DomainEvalError);
  EXPECT_THROW(ev("exp(r)", {{"r", 1000}}), DomainEvalError);
  EXPECT_THROW(ev("u + 1"), UnboundVariable);
}

TEST(Eval, Pure) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Expr e = parse_expr(gen(rng, 4));
    const Env env{{"u", 0.3}, {"l", 1.1}, {"r", 0.7}};
    double a = 0, b = 0;
    try {
      a = eval(e, env);
      b = eval(e, env);
    } catch (const DomainEvalError&) {
      continue;
    }
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  }
}

TEST(Print, RoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string src = gen(rng, 5);
    const Expr e = parse_expr(src);
    const std::string printed = to_string(e);
    const Expr back = parse_expr(printed);
    EXPECT_TRUE(back.structurally_equal(e)) << src << "  ->  " << printed;
  }
}

TEST(Substitute, ReplacesVariable) {
  const Expr e = substitute(parse_expr("l + r^2"), "r", parse_expr("abs(t)"));
  EXPECT_DOUBLE_EQ(eval(e, {{"l", 1}, {"t", -2}}), 5.0);
  EXPECT_EQ(e.free_variables(), (std::set<std::string>{"l", "t"}));
}

TEST(DiffFd, Examples) {
  const Env zero{{"r", 0.0}};
  EXPECT_NEAR(diff_fd(parse_expr("r^2"), "r", zero, 1, Side::central, 1e-4), 0.0, 1e-6);
  const Expr a = parse_expr("abs(r)");
  const double left = diff_fd(a, "r", zero, 1, Side::left, 1e-4);
  const double right = diff_fd(a, "r", zero, 1, Side::right, 1e-4);
  EXPECT_NEAR(left, -1.0, 1e-9);
  EXPECT_NEAR(right, 1.0, 1e-9);
  EXPECT_NEAR(right - left, 2.0, 1e-9);
  EXPECT_NEAR(diff_fd(parse_expr("r^3"), "r", zero, 2, Side::central, 1e-3), 0.0, 1e-5);
}

TEST(DiffFd, Errors) {
  const Expr e = parse_expr("r");
  const Env env{{"r", 0.0}};
  EXPECT_THROW(diff_fd(e, "r", env, 4, Side::central, 1e-3), Error);
  EXPECT_THROW(diff_fd(e, "r", env, 1, Side::central, 0.0), Error);
  EXPECT_THROW(diff_fd(e, "r", env, 1, Side::left, 1e-3, std::pair{0.0, 1.0}), StencilOutOfDomain);
  EXPECT_NO_THROW(diff_fd(e, "r", env, 1, Side::right, 1e-3, std::pair{0.0, 1.0}));
  EXPECT_THROW(diff_fd(parse_expr("log(r)"), "r", env, 1, Side::right, 1e-3), DomainEvalError);
}

// Cubic polynomials: every stencil is exact up to roundoff, which grows like
// eps/h^k. Orders 2 and 3 are checked on the part of [1e-6, 1e-3] where that
// roundoff stays under 100 h.
TEST(DiffFd, CubicPolynomialProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), at(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), c3 = coef(rng), x = at(rng);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g + %.17g*x + %.17g*x^2 + %.17g*x^3", c0, c1, c2, c3);
    const Expr p = parse_expr(buf);
    const double exact[4] = {0.0, c1 + 2 * c2 * x + 3 * c3 * x * x, 2 * c2 + 6 * c3 * x, 6 * c3};
    for (int order = 1; order <= 3; ++order) {
      const double hmin = order == 1 ? 1e-6 : (order == 2 ? 1e-4 : 3e-4);
      for (double h : {hmin, std::sqrt(hmin * 1e-3), 1e-3})
        for (Side s : {Side::central, Side::left, Side::right})
          EXPECT_NEAR(diff_fd(p, "x", {{"x", x}}, order, s, h), exact[order], 100 * h)
              << buf << " order " << order << " h " << h;
    }
  }
}
