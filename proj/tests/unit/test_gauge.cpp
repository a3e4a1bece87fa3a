#include <gtest/gtest.h>

#include <random>

#include "oracle/generators.hpp"
#include "starlb/starprod/associativity.hpp"
#include "starlb/starprod/gauge.hpp"

using namespace starlb;

namespace {
const PureStarProduct S = PureStarProduct(PoissonStructure::standard(1));
const std::vector<std::string> XY{"x", "y"};
ChartFunction var(const std::string& v) { return ChartFunction::variable(XY, v); }
ChartFunction one() { return ChartFunction::constant(XY, Scalar(1)); }
GaugeOperator laplace_gauge() { return GaugeOperator::from_corrections(XY, {DiffOperator::laplacian(XY)}); }
}  // namespace

TEST(Gauge, IdentityGaugeLeavesProduct) {
  auto twisted = gauge_twist(S, GaugeOperator::identity(XY));
  std::mt19937 rng(1);
  for (int i = 0; i < 10; ++i) {
    ChartFunction a = gen::random_polynomial(rng, XY, 3), b = gen::random_polynomial(rng, XY, 3);
    EXPECT_EQ(twisted.multiply(S.lift(a, 4), S.lift(b, 4)), S.multiply(S.lift(a, 4), S.lift(b, 4)));
  }
}

TEST(Gauge, InverseIsTwoSided) {
  GaugeOperator T = laplace_gauge();
  std::mt19937 rng(2);
  ChartFunction a = gen::random_mixed(rng, XY);
  FormalSeries A = S.lift(a, 5);
  EXPECT_EQ(T.apply_inverse(T.apply(A)), A);
  EXPECT_EQ(T.apply(T.apply_inverse(A)), A);
}

TEST(Gauge, LaplacianTwistIsAssociative) {
  auto twisted = gauge_twist(S, laplace_gauge());
  std::mt19937 rng(3);
  std::vector<FunctionTriple> samples{{var("x"), var("y"), var("x")}, {var("y"), var("x"), var("x") * var("y")}};
  for (int i = 0; i < 10; ++i)
    samples.push_back({gen::random_polynomial(rng, XY, 3), gen::random_polynomial(rng, XY, 3), gen::random_polynomial(rng, XY, 3)});
  AssociativityReport rep = check_associativity(twisted, samples, 4);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.verified_order, 4);
}

TEST(Gauge, OrderZeroUnitAndBracketPreserved) {
  GaugeOperator T = laplace_gauge();
  ASSERT_TRUE(T.preserves_unit());
  auto twisted = gauge_twist(S, T);
  FormalSeries xy = twisted.multiply(S.lift(var("x"), 4), S.lift(var("y"), 4));
  EXPECT_EQ(xy[0], var("x") * var("y"));
  EXPECT_EQ(antisymmetric_first_order(var("x"), var("y"), twisted), one());

  std::mt19937 rng(4);
  for (int i = 0; i < 10; ++i) {
    ChartFunction a = gen::random_polynomial(rng, XY, 3), b = gen::random_polynomial(rng, XY, 3);
    FormalSeries A = S.lift(a, 4);
    EXPECT_EQ(twisted.multiply(A, S.lift(one(), 4)), A);
    EXPECT_EQ(twisted.multiply(S.lift(one(), 4), A), A);
    EXPECT_EQ(twisted.multiply(A, S.lift(b, 4))[0], a * b);
    EXPECT_EQ(antisymmetric_first_order(a, b, twisted), poisson_bracket(a, b, S.poisson()));
  }
}

TEST(Gauge, TwistChangesSymmetricPart) {
  // At order 1 the Laplacian twist adds Δa b + a Δb - Δ(ab) = -2 ∇a·∇b.
  auto twisted = gauge_twist(S, laplace_gauge());
  ChartFunction x2 = var("x").pow(2);
  EXPECT_TRUE(first_order_term(x2, x2, S).is_zero());
  EXPECT_EQ(first_order_term(x2, x2, twisted), x2 * Scalar(-8));
  EXPECT_EQ(first_order_term(x2, var("y").pow(2), twisted), var("x") * var("y") * Scalar(4));
}

TEST(Gauge, NonUnitPreservingStillAssociative) {
  DiffOperator c = DiffOperator::identity(XY, Scalar(3));
  GaugeOperator T = GaugeOperator::from_corrections(XY, {c + DiffOperator::partial(XY, "x")});
  EXPECT_FALSE(T.preserves_unit());
  auto twisted = gauge_twist(S, T);
  std::mt19937 rng(6);
  std::vector<FunctionTriple> samples;
  for (int i = 0; i < 5; ++i)
    samples.push_back({gen::random_polynomial(rng, XY, 2), gen::random_polynomial(rng, XY, 2), gen::random_polynomial(rng, XY, 2)});
  EXPECT_TRUE(check_associativity(twisted, samples, 4).passed());
  EXPECT_EQ(antisymmetric_first_order(var("x"), var("y"), twisted), one());
}

TEST(Gauge, NonInvertibleRejected) {
  EXPECT_THROW(GaugeOperator(XY, {DiffOperator::laplacian(XY)}), MathError);
  EXPECT_THROW(GaugeOperator(XY, {DiffOperator(XY)}), MathError);
  EXPECT_THROW(GaugeOperator(XY, {DiffOperator::identity(XY, Scalar(1) + Scalar::pi())}), MathError);
}
