#include <gtest/gtest.h>

#include <random>

#include "oracle/generators.hpp"
#include "starlb/locbundle/circle.hpp"

using namespace starlb;

namespace {
const Manifold S1 = Manifold::torus(1);
const Manifold T2 = Manifold::torus(2);
const std::vector<std::string> P1{"x#1", "x#2"};
const std::vector<std::string> P2{"x#1", "y#1", "x#2", "y#2"};

ChartFunction v(const std::vector<std::string>& vars, const std::string& n) { return ChartFunction::variable(vars, n); }
ChartFunction diff1(const Rational& c) { return (v(P1, "x#1") - v(P1, "x#2")) * Scalar(c); }
}  // namespace

TEST(CircleCocycle, Examples) {
  for (int m : {-2, 0, 1, 5}) EXPECT_TRUE(check_circle_cocycle(LocalCircleFunction(S1, diff1(m))).passed());
  EXPECT_TRUE(check_circle_cocycle(LocalCircleFunction(S1, ChartFunction(P1))).passed());

  auto rep = check_circle_cocycle(LocalCircleFunction(S1, v(P1, "x#1") * v(P1, "x#2")));
  EXPECT_FALSE(rep.passed());
  EXPECT_FALSE(rep.cocycle);
  EXPECT_FALSE(rep.defect.is_constant());
  // x1 x2 + x2 x3 - x1 x3
  const std::vector<std::string> P3{"x#1", "x#2", "x#3"};
  ChartFunction expected = v(P3, "x#1") * v(P3, "x#2") + v(P3, "x#2") * v(P3, "x#3") - v(P3, "x#1") * v(P3, "x#3");
  EXPECT_EQ(rep.defect, expected);
}

TEST(CircleCocycle, IntegerConstantsAreHarmless) {
  // Φ + 3 describes the same A; the defect and the diagonal value are 3.
  auto rep = check_circle_cocycle(LocalCircleFunction(S1, diff1(2) + ChartFunction::constant(P1, Scalar(3))));
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.defect, ChartFunction::constant({"x#1", "x#2", "x#3"}, Scalar(3)));
}

TEST(CircleCocycle, RejectsNonPeriodicAndDiagonal) {
  // Φ = x̃² - ỹ² is additive but not lattice invariant
  auto rep = check_circle_cocycle(LocalCircleFunction(S1, v(P1, "x#1").pow(2) - v(P1, "x#2").pow(2)));
  EXPECT_TRUE(rep.cocycle);
  EXPECT_FALSE(rep.periodic);
  // Φ = 1/2 fails on the diagonal
  rep = check_circle_cocycle(LocalCircleFunction(S1, ChartFunction::constant(P1, Scalar(Rational(1, 2)))));
  EXPECT_FALSE(rep.diagonal);
}

TEST(OneForm, Examples) {
  EXPECT_TRUE(one_form_from_circle(LocalCircleFunction(S1, ChartFunction(P1))).is_zero());
  EXPECT_EQ(one_form_from_circle(LocalCircleFunction(S1, diff1(4))), DifferentialForm::basis(S1, {"x"}, Scalar(4)));
  DifferentialForm third = one_form_from_circle(LocalCircleFunction(S1, diff1(Rational(1, 3))));
  EXPECT_EQ(third, DifferentialForm::basis(S1, {"x"}, Scalar(Rational(1, 3))));
  EXPECT_EQ(h1_class(LocalCircleFunction(S1, diff1(Rational(1, 3)))), std::vector<Scalar>{Scalar(Rational(1, 3))});
  EXPECT_THROW(one_form_from_circle(LocalCircleFunction(S1, v(P1, "x#1") * v(P1, "x#2"))), MathError);
}

TEST(OneForm, RandomTorusCircleFunctions) {
  std::mt19937 rng(7);
  for (int n = 0; n < 25; ++n) {
    Rational a = gen::random_rational(rng), b = gen::random_rational(rng);
    ChartFunction f = gen::random_trig(rng, T2.coords(), 2, 3, true);
    ChartFunction phase = (v(P2, "x#1") - v(P2, "x#2")) * Scalar(a) + (v(P2, "y#1") - v(P2, "y#2")) * Scalar(b) +
                          at_point(f, T2.coords(), 1) - at_point(f, T2.coords(), 2);
    LocalCircleFunction A(T2, phase);
    ASSERT_TRUE(check_circle_cocycle(A).passed());
    DifferentialForm alpha = one_form_from_circle(A);
    EXPECT_TRUE(is_closed(alpha));
    DifferentialForm expected = DifferentialForm::basis(T2, {"x"}, Scalar(a)) + DifferentialForm::basis(T2, {"y"}, Scalar(b)) +
                                exterior_d(DifferentialForm::function(T2, f));
    EXPECT_EQ(alpha, expected);
    EXPECT_EQ(h1_class(A), (std::vector<Scalar>{Scalar(a), Scalar(b)}));

    // coboundaries leave the class alone
    ChartFunction g = gen::random_trig(rng, T2.coords(), 2, 3, true);
    RealAdditiveFunction beta = coboundary(T2, g);
    EXPECT_TRUE(beta.is_additive());
    EXPECT_EQ(h1_class(twisted_by(A, beta)), h1_class(A));
  }
}

TEST(H1Class, LinearAdditiveShiftMovesPeriod) {
  // β = λ(x̃ - ỹ) is additive but has period λ
  LocalCircleFunction A(S1, diff1(Rational(1, 3)));
  RealAdditiveFunction beta(S1, diff1(Rational(1, 5)));
  ASSERT_TRUE(beta.is_additive());
  EXPECT_EQ(h1_class(twisted_by(A, beta)), std::vector<Scalar>{Scalar(Rational(8, 15))});
  RealAdditiveFunction bad(S1, v(P1, "x#1") * v(P1, "x#2"));
  EXPECT_FALSE(bad.is_additive());
  EXPECT_THROW(twisted_by(A, bad), MathError);
}

TEST(Germs, CompareOnSmallerRadius) {
  LocalCircleFunction a(S1, diff1(2), Rational(1, 4));
  LocalCircleFunction b(S1, diff1(2) + ChartFunction::constant(P1, Scalar(-1)), Rational(1, 10));
  LocalCircleFunction c(S1, diff1(2) + ChartFunction::constant(P1, Scalar(Rational(1, 2))));
  EXPECT_TRUE(same_germ(a, b));
  EXPECT_FALSE(same_germ(a, c));
  EXPECT_EQ(twisted_by(a, RealAdditiveFunction(S1, diff1(1)) ).radius(), Rational(1, 4));
}
