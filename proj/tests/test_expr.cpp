#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hilfer/expr.hpp"

using hilfer::eval;
using hilfer::Expr;
using hilfer::parse;
using hilfer::to_string;

namespace {

const std::vector<std::string> kCorpus = {
    "1",
    "t",
    "z",
    "1/3",
    "2.5e-3",
    ".5",
    "-t",
    "--z",
    "t+z",
    "t-z-1",
    "t*z/2",
    "1/2/3",
    "2^3^2",
    "-2^2",
    "(t+1)*(z-1)",
    "t+z*t^2",
    "(1/16)*t*sin(abs(z))",
    "t/16",
    "sin(t)+cos(z)",
    "exp(-t)*log(1+t)",
    "sqrt(abs(z))",
    "abs(sin(z))^0.5",
    "1e10*t",
    "t^-1",
    "(t-0.25)^(2/3)",
    "exp(exp(z/100))",
    "log(sqrt(t^2+1))",
    "-(t+z)*-(t-z)",
    "cos(t)^2+sin(t)^2",
    "  t *  ( z + 3 )  ",
    "z*(1-z)*(2-z)/6",
    "0.1+0.2",
};

}  // namespace

TEST(ExprProperty, RoundTripCorpus) {
  ASSERT_GE(kCorpus.size(), 30u);
  for (const auto& src : kCorpus) {
    const Expr e = parse(src);
    const std::string printed = to_string(e);
    const Expr again = parse(printed);
    EXPECT_EQ(e, again) << src << " -> " << printed;
    EXPECT_EQ(to_string(again), printed) << src;
  }
}

TEST(ExprProperty, PrecedenceMatchesExplicitGrouping) {
  EXPECT_EQ(parse("2+3*4"), parse("2+(3*4)"));
  EXPECT_EQ(parse("2*3^4"), parse("2*(3^4)"));
  EXPECT_EQ(parse("2-3-4"), parse("(2-3)-4"));
  EXPECT_EQ(parse("2^3^4"), parse("2^(3^4)"));
  EXPECT_FALSE(parse("2+3*4") == parse("(2+3)*4"));
}

TEST(Expr, RightAssociativePower) { EXPECT_EQ(eval(parse("2^3^2"), 0, 0), 512.0); }

TEST(Expr, UnaryMinusBindsTighterThanPower) { EXPECT_EQ(eval(parse("-2^2"), 0, 0), 4.0); }

TEST(Expr, RationalLiteralsEvaluateOnce) {
  EXPECT_EQ(eval(parse("1/3"), 0, 0), 1.0 / 3.0);
  EXPECT_EQ(eval(parse("2/5"), 0, 0), 2.0 / 5.0);
}

TEST(Expr, RightHandSideExamples) {
  EXPECT_DOUBLE_EQ(eval(parse("(1/16)*t*sin(abs(z))"), 1.0, std::numbers::pi / 2), 0.0625);
  EXPECT_EQ(eval(parse("t/16"), 1.0, 0.0), 0.0625);
  EXPECT_EQ(eval(parse("z"), 7.0, 0.0), 0.0);
}

TEST(Expr, UsesReportsVariables) {
  EXPECT_TRUE(hilfer::uses(parse("t*sin(z)"), hilfer::Var::z));
  EXPECT_FALSE(hilfer::uses(parse("t/16"), hilfer::Var::z));
  EXPECT_FALSE(hilfer::uses(parse("1/3"), hilfer::Var::t));
}

TEST(Expr, EvalIsRepeatable) {
  const Expr e = parse("exp(-t)*log(1+t)+sqrt(abs(z))");
  const double first = eval(e, 0.3, -1.7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(eval(e, 0.3, -1.7), first);
}

TEST(Expr, ParseErrorsCarryOffsets) {
  auto offset_of = [](const std::string& src) -> long {
    try {
      parse(src);
    } catch (const hilfer::ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  EXPECT_EQ(offset_of("sin("), 4);
  EXPECT_EQ(offset_of(""), 0);
  EXPECT_EQ(offset_of("t+"), 2);
  EXPECT_EQ(offset_of("t*y"), 2);
  EXPECT_EQ(offset_of("(t"), 2);
  EXPECT_EQ(offset_of("t t"), 2);
  EXPECT_EQ(offset_of("1e"), 2);
}

TEST(Expr, DomainViolationsRaiseEvalError) {
  EXPECT_THROW(eval(parse("log(t)"), 0.0, 0.0), hilfer::EvalError);
  EXPECT_THROW(eval(parse("log(z)"), 1.0, -1.0), hilfer::EvalError);
  EXPECT_THROW(eval(parse("sqrt(z)"), 1.0, -1.0), hilfer::EvalError);
  EXPECT_THROW(eval(parse("1/z"), 1.0, 0.0), hilfer::EvalError);
  EXPECT_THROW(eval(parse("z^0.5"), 1.0, -4.0), hilfer::EvalError);
  EXPECT_THROW(eval(parse("exp(z)"), 1.0, 1000.0), hilfer::EvalError);
  EXPECT_EQ(eval(parse("z^3"), 1.0, -2.0), -8.0);
}

TEST(Expr, EvalErrorPointsAtOperator) {
  try {
    eval(parse("t + log(z)"), 1.0, -1.0);
    FAIL() << "expected EvalError";
  } catch (const hilfer::EvalError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}
