#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracle/generators.hpp"
#include "starlb/charindex/index.hpp"

using namespace starlb;

namespace {
const Manifold T2 = Manifold::torus(2);
const Manifold T4 = Manifold::torus(4);
const Manifold S2 = Manifold::sphere2();
const std::vector<std::string> XY{"x", "y"};

DifferentialForm vol(const Manifold& m, const Scalar& c) { return DifferentialForm::volume(m, c); }
DifferentialForm one(const Manifold& m, const Scalar& c) { return DifferentialForm::constant(m, c); }
Scalar over_two_pi(const Scalar& s) { return s * Scalar(Rational(1, 2), -1); }

// Winding number of t -> e^{2πi n t} by summing phase increments.
int winding(int n) {
  double total = 0;
  const int steps = 512;
  for (int k = 0; k < steps; ++k) {
    std::complex<double> a = std::polar(1.0, 2 * M_PI * n * k / steps), b = std::polar(1.0, 2 * M_PI * n * (k + 1) / steps);
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}
}  // namespace

TEST(Todd, SeriesMatchesBernoulliNumbers) {
  // x/(1 - e^{-x}) = 1 + x/2 + Σ B_2k x^{2k}/(2k)!, B_2 = 1/6, B_4 = -1/30, B_6 = 1/42
  auto b = todd_series(6);
  std::vector<Rational> expected{1, Rational(1, 2), Rational(1, 12), 0, Rational(-1, 720), 0, Rational(1, 30240)};
  EXPECT_EQ(b, expected);
  // Td(x)Td(-x): the x^1 coefficient vanishes, so the S2 class has no area part
  Rational lin = expected[1] * expected[0] + expected[0] * (-expected[1]);
  EXPECT_EQ(lin, 0);
}

TEST(Todd, Examples) {
  EXPECT_EQ(todd_class(T2).representative(), one(T2, Scalar(1)));
  EXPECT_EQ(todd_class(T4).representative(), one(T4, Scalar(1)));
  EXPECT_EQ(todd_class(S2).representative(), one(S2, Scalar(1)));
  EXPECT_THROW(todd_class(Manifold::torus(3)), MathError);
  EXPECT_THROW(todd_class(Manifold::euclidean(2)), MathError);
}

TEST(ExpTwist, Examples) {
  EXPECT_EQ(exp_twist(DifferentialForm(T2)).representative(), one(T2, Scalar(1)));
  const Scalar theta(Rational(3, 7));
  EXPECT_EQ(exp_twist(vol(T2, theta)).representative(), one(T2, Scalar(1)) + vol(T2, over_two_pi(theta)));

  const Scalar t1(Rational(2, 3)), t2(Rational(-5, 4));
  DifferentialForm w = DifferentialForm::basis(T4, {"x1", "y1"}, t1) + DifferentialForm::basis(T4, {"x2", "y2"}, t2);
  DifferentialForm e = exp_twist(w).representative();
  EXPECT_EQ(e.part(4), vol(T4, t1 * t2 * Scalar(Rational(1, 4), -2)));
  EXPECT_EQ(e.part(2), w * Scalar(Rational(1, 2), -1));
  EXPECT_THROW(exp_twist(DifferentialForm::basis(T2, {"x"})), MathError);
  DifferentialForm open = DifferentialForm::basis(Manifold::torus(3), {"x1", "x2"}) * ChartFunction::variable({"x1", "x2", "x3"}, "x3");
  EXPECT_THROW(exp_twist(open), MathError);
}

TEST(TwistedIndex, ClosedFormOnTorus) {
  std::mt19937 rng(5);
  for (int n = 0; n < 40; ++n) {
    int d = std::uniform_int_distribution<int>(-6, 6)(rng), e = std::uniform_int_distribution<int>(-6, 6)(rng);
    Rational q = gen::random_rational(rng, 9);
    EllipticSymbolClass a(2, 2, one(T2, Scalar(d)) + vol(T2, Scalar(e)));
    IndexResult r = twisted_index(a, vol(T2, Scalar(q)), T2);
    EXPECT_EQ(r.value, Scalar(e) + Scalar(d) * over_two_pi(Scalar(q)));
    if (d != 0) {
      EXPECT_EQ(r.by_degree.at(0), Scalar(d) * over_two_pi(Scalar(q)));
    }
    if (e != 0) {
      EXPECT_EQ(r.by_degree.at(2), Scalar(e));
    }
  }
  EXPECT_TRUE(twisted_index(EllipticSymbolClass::identity(T2), vol(T2, Scalar(1)), T2).value.is_zero());
}

TEST(TwistedIndex, UntwistedIntegralIsInteger) {
  std::mt19937 rng(6);
  for (int n = 0; n < 20; ++n) {
    std::uniform_int_distribution<int> z(-5, 5);
    DifferentialForm g = one(T4, Scalar(z(rng))) + vol(T4, Scalar(z(rng))) +
                         DifferentialForm::basis(T4, {"x1", "x2"}, Scalar(z(rng))) +
                         exterior_d(DifferentialForm::one_form(T4, "y1", gen::random_trig(rng, T4.coords(), 1, 2, true)));
    Scalar v = twisted_index(EllipticSymbolClass(1, 1, g), DifferentialForm(T4), T4).value;
    EXPECT_TRUE(v.is_integer()) << v.str();
  }
}

TEST(TwistedIndex, SphereAndLinearity) {
  const Scalar theta(Rational(5, 3));
  EllipticSymbolClass a(1, 1, one(S2, Scalar(2)) + vol(S2, Scalar(-3)));
  EXPECT_EQ(twisted_index(a, vol(S2, theta), S2).value, Scalar(-3) + Scalar(2) * over_two_pi(theta));

  std::mt19937 rng(8);
  for (int n = 0; n < 10; ++n) {
    std::uniform_int_distribution<int> z(-4, 4);
    DifferentialForm g1 = one(T4, Scalar(z(rng))) + DifferentialForm::basis(T4, {"x1", "y2"}, Scalar(gen::random_rational(rng)));
    DifferentialForm g2 = one(T4, Scalar(z(rng))) + vol(T4, Scalar(gen::random_rational(rng)));
    DifferentialForm w = DifferentialForm::basis(T4, {"x2", "y1"}, Scalar(gen::random_rational(rng))) +
                         DifferentialForm::basis(T4, {"x1", "y2"}, Scalar(gen::random_rational(rng)));
    Scalar lhs = twisted_index(EllipticSymbolClass(1, 1, g1 + g2), w, T4).value;
    Scalar rhs = twisted_index(EllipticSymbolClass(1, 1, g1), w, T4).value + twisted_index(EllipticSymbolClass(1, 1, g2), w, T4).value;
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(TwistedIndex, Errors) {
  EXPECT_THROW(EllipticSymbolClass(1, 2, one(T2, Scalar(1))), MathError);
  EXPECT_THROW(EllipticSymbolClass(1, 1, DifferentialForm::basis(T2, {"x"})), MathError);
  EXPECT_THROW(EllipticSymbolClass(1, 1, one(T2, Scalar(Rational(1, 2)))), MathError);
  EXPECT_THROW(EllipticSymbolClass(1, 1, one(T2, Scalar::pi())), MathError);
  EllipticSymbolClass a(1, 1, one(T2, Scalar(1)));
  EXPECT_THROW(twisted_index(a, vol(S2, Scalar(1)), S2), MathError);
  EXPECT_THROW(twisted_index(a, vol(T4, Scalar(1)), T2), MathError);
}

TEST(LogMultiplicativity, Examples) {
  // winding classes on T2: γ_n = n vol has index n
  for (int n1 : {-2, 1, 3})
    for (int n2 : {0, 2, -5}) {
      EllipticSymbolClass a1(1, 1, vol(T2, Scalar(n1))), a2(1, 1, vol(T2, Scalar(n2)));
      auto r = check_log_multiplicativity(a1, a2, DifferentialForm(T2), T2);
      EXPECT_TRUE(r.passed());
      EXPECT_EQ(r.lhs, Scalar(winding(n1) + winding(n2)));
    }
  EllipticSymbolClass a1(2, 2, one(T2, Scalar(1)) + vol(T2, Scalar(2))), a2(2, 2, one(T2, Scalar(-3)) + vol(T2, Scalar(1)));
  auto r = check_log_multiplicativity(a1, a2, vol(T2, Scalar(Rational(3, 7))), T2);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.lhs, Scalar(3) + Scalar(-2) * over_two_pi(Scalar(Rational(3, 7))));
  EXPECT_TRUE(check_log_multiplicativity(a1, EllipticSymbolClass::identity(T2, 2), vol(T2, Scalar(1)), T2).passed());
  EXPECT_THROW(check_log_multiplicativity(a1, EllipticSymbolClass::identity(T2, 3), vol(T2, Scalar(1)), T2), MathError);
}

TEST(HomotopyInvariance, ExactPerturbations) {
  EllipticSymbolClass a(1, 1, one(T2, Scalar(4)) + vol(T2, Scalar(-1)));
  DifferentialForm w = vol(T2, Scalar(Rational(3, 7)));
  DifferentialForm beta = DifferentialForm::one_form(T2, "y", ChartFunction::sin2pi(XY, {1, 0}));
  auto r = check_homotopy_invariance(a, w, T2, {Perturbation::Target::Omega, beta, exterior_d(beta)});
  EXPECT_TRUE(r.passed());
  r = check_homotopy_invariance(a, w, T2, {Perturbation::Target::Gamma, DifferentialForm::one_form(T2, "y", ChartFunction::cos2pi(XY, {2, 1})), {}});
  EXPECT_TRUE(r.passed());
  r = check_homotopy_invariance(a, w, T2, {Perturbation::Target::Gamma, DifferentialForm(T2), {}});
  EXPECT_TRUE(r.passed());
  EXPECT_THROW(check_homotopy_invariance(a, w, T2, {Perturbation::Target::Omega, beta, vol(T2, Scalar(1))}), MathError);
}

TEST(TensorConsistency, Examples) {
  EllipticSymbolClass a(1, 1, one(T2, Scalar(2)) + vol(T2, Scalar(5)));
  auto r = check_tensor_consistency(a, 3);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.lhs, Scalar(11));
  EXPECT_TRUE(check_tensor_consistency(a, 0).passed());
  auto unit = check_tensor_consistency(EllipticSymbolClass(1, 1, one(T2, Scalar(1))), 1);
  EXPECT_TRUE(unit.passed());
  EXPECT_EQ(unit.lhs, Scalar(1));
  EXPECT_THROW(check_tensor_consistency(a, Rational(1, 2)), MathError);
}
