#include <gtest/gtest.h>

#include <random>

#include "tempsep/error.hpp"
#include "tempsep/expression.hpp"

namespace tempsep::symbolic {
namespace {

ThetaExpression random_expression(std::mt19937& rng, bool with_moments) {
  std::uniform_int_distribution<int> terms(1, 4);
  std::uniform_int_distribution<int> factors(0, 3);
  std::uniform_int_distribution<int> order(0, 3);
  std::uniform_int_distribution<int> exponent(-2, 3);
  std::uniform_int_distribution<int> coeff(-9, 9);
  std::uniform_int_distribution<int> index(2, 7);
  ThetaExpression out;
  for (int t = terms(rng); t > 0; --t) {
    ThetaExpression term = ThetaExpression::constant(Rational(coeff(rng), 1 + factors(rng)));
    for (int f = factors(rng); f > 0; --f) {
      const int m = order(rng);
      int e = exponent(rng);
      if (e == 0) e = 1;
      if (m > 0 && e < 0) e = -e;  // only theta itself may appear inverted
      term = term * ThetaExpression::variable(Symbol::theta(m), e);
    }
    if (with_moments && factors(rng) > 1) {
      term = term * ThetaExpression::variable(Symbol::moment(index(rng)));
    }
    out += term;
  }
  return out;
}

TEST(Expression, ArithmeticAndCancellation) {
  const auto t = ThetaExpression::variable(Symbol::theta(0));
  const auto t1 = ThetaExpression::variable(Symbol::theta(1));
  auto e = t * t1 + t * Rational(3);
  e -= t * t1;
  EXPECT_EQ(e, t * Rational(3));
  e *= 0;
  EXPECT_TRUE(e.is_zero());
  EXPECT_EQ((t * ThetaExpression::variable(Symbol::theta(0), -1)), ThetaExpression::constant(1));
}

TEST(Expression, DerivativeOfPowerAndInverse) {
  const auto rule = Derivation::theta_only();
  const auto cube = ThetaExpression::variable(Symbol::theta(0), 3);
  const auto expected =
      ThetaExpression::variable(Symbol::theta(0), 2) * ThetaExpression::variable(Symbol::theta(1)) *
      Rational(3);
  EXPECT_EQ(cube.derivative(rule), expected);
  const auto inv = ThetaExpression::variable(Symbol::theta(0), -1);
  const auto d_inv = ThetaExpression::variable(Symbol::theta(0), -2) *
                     ThetaExpression::variable(Symbol::theta(1)) * Rational(-1);
  EXPECT_EQ(inv.derivative(rule), d_inv);
}

TEST(Expression, MomentRuleFollowsMomentEquation) {
  const auto rule = Derivation::moment_equation(TransportParams::comptonization());
  // dI_4/dy = 2 [ 5 I_4 - I_5 / theta ]
  const auto d = ThetaExpression::variable(Symbol::moment(4)).derivative(rule);
  const auto expected = ThetaExpression::variable(Symbol::moment(4)) * Rational(10) -
                        ThetaExpression::variable(Symbol::moment(5)) *
                            ThetaExpression::variable(Symbol::theta(0), -1) * Rational(2);
  EXPECT_EQ(d, expected);
  // n = i: the conserved photon number.
  EXPECT_TRUE(ThetaExpression::variable(Symbol::moment(2)).derivative(rule).is_zero());
  EXPECT_THROW(ThetaExpression::variable(Symbol::moment(4)).derivative(Derivation::theta_only()),
               Error);
}

// d(ab) = a db + b da and linearity, on randomly generated expressions.
TEST(ExpressionProperty, LeibnizAndLinearity) {
  std::mt19937 rng(20240611);
  const auto rule = Derivation::moment_equation(TransportParams::comptonization());
  for (int trial = 0; trial < 200; ++trial) {
    const bool moments = trial % 2 == 1;
    const auto a = random_expression(rng, moments);
    const auto b = random_expression(rng, moments);
    const auto& r = moments ? rule : Derivation::theta_only();
    EXPECT_EQ((a * b).derivative(r), a * b.derivative(r) + b * a.derivative(r)) << trial;
    EXPECT_EQ((a + b).derivative(r), a.derivative(r) + b.derivative(r)) << trial;
  }
}

// Evaluation is a ring homomorphism.
TEST(ExpressionProperty, EvaluationRespectsProducts) {
  std::mt19937 rng(7);
  auto value_of = [](const Symbol& s) {
    return s.is_theta() ? Rational(s.order + 2, 3) : Rational(s.index() + 1);
  };
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_expression(rng, true);
    const auto b = random_expression(rng, true);
    EXPECT_EQ((a * b).evaluate(value_of), a.evaluate(value_of) * b.evaluate(value_of));
  }
}

TEST(Expression, SplitLinear) {
  const auto t = ThetaExpression::variable(Symbol::theta(0));
  const auto t2 = ThetaExpression::variable(Symbol::theta(2));
  const auto e = t * t2 * Rational(3) + t * Rational(5);
  const auto split = split_linear(e, Symbol::theta(2), [](const Symbol&) { return Rational(2); });
  EXPECT_EQ(split.slope, 6);
  EXPECT_EQ(split.offset, 10);
  EXPECT_THROW(split_linear(t2 * t2, Symbol::theta(2), [](const Symbol&) { return Rational(1); }),
               Error);
}

TEST(Expression, SymbolOrderingAndPrinting) {
  EXPECT_LT(Symbol::theta(5), Symbol::moment(2));
  EXPECT_EQ(Symbol::moment(Rational(7, 2)).index(), Rational(7, 2));
  EXPECT_EQ(ThetaExpression::variable(Symbol::theta(1)).max_theta_order(), 1);
  EXPECT_EQ(ThetaExpression::constant(3).max_theta_order(), -1);
  EXPECT_FALSE(ThetaExpression::variable(Symbol::moment(3)).to_string().empty());
}

}  // namespace
}  // namespace tempsep::symbolic
