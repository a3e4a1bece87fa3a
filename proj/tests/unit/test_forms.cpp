#include <gtest/gtest.h>

#include <random>

#include "oracle/generators.hpp"
#include "starlb/exactalg/form.hpp"

using namespace starlb;

namespace {
const Manifold T2 = Manifold::torus(2);
const Manifold R2 = Manifold::euclidean(2);

DifferentialForm random_form(std::mt19937& rng, const Manifold& m, int degree, bool periodic) {
  DifferentialForm w(m);
  const int n = m.dim();
  // all increasing multi-indices of the given degree
  std::vector<std::vector<int>> idx{{}};
  for (int d = 0; d < degree; ++d) {
    std::vector<std::vector<int>> next;
    for (auto& i : idx)
      for (int j = i.empty() ? 0 : i.back() + 1; j < n; ++j) {
        auto k = i;
        k.push_back(j);
        next.push_back(k);
      }
    idx = next;
  }
  for (auto& i : idx)
    w.add(i, periodic ? gen::random_trig(rng, m.coords(), 2, 3) : gen::random_mixed(rng, m.coords()));
  return w;
}
}  // namespace

TEST(Forms, ExteriorDerivativeExamples) {
  ChartFunction x = ChartFunction::variable(R2.coords(), "x");
  DifferentialForm xdy = DifferentialForm::one_form(R2, "y", x);
  EXPECT_EQ(exterior_d(xdy), DifferentialForm::basis(R2, {"x", "y"}));

  Scalar theta(Rational(3, 7));
  EXPECT_EQ(exterior_d(xdy * theta), DifferentialForm::basis(R2, {"x", "y"}, theta));

  std::mt19937 rng(1);
  ChartFunction f = gen::random_mixed(rng, R2.coords()), g = gen::random_mixed(rng, R2.coords());
  DifferentialForm w = DifferentialForm::one_form(R2, "x", f) + DifferentialForm::one_form(R2, "y", g);
  DifferentialForm expected(R2);
  expected.add({0, 1}, g.derive("x") - f.derive("y"));
  EXPECT_EQ(exterior_d(w), expected);
}

TEST(Forms, WedgeExamples) {
  DifferentialForm dx = DifferentialForm::basis(T2, {"x"});
  DifferentialForm dy = DifferentialForm::basis(T2, {"y"});
  EXPECT_TRUE(wedge(dx, dx).is_zero());
  EXPECT_TRUE((wedge(dx, dy) + wedge(dy, dx)).is_zero());

  Scalar theta(Rational(3, 7)), d(2), e(5);
  DifferentialForm a = DifferentialForm::constant(T2, Scalar(1)) + DifferentialForm::volume(T2, theta);
  DifferentialForm b = DifferentialForm::constant(T2, d) + DifferentialForm::volume(T2, e);
  DifferentialForm expected = DifferentialForm::constant(T2, d) + DifferentialForm::volume(T2, e + d * theta);
  EXPECT_EQ(wedge(a, b), expected);
}

TEST(Forms, GradedCommutativity) {
  std::mt19937 rng(9);
  Manifold T3 = Manifold::torus(3);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; p + q <= 3; ++q) {
      DifferentialForm a = random_form(rng, T3, p, true), b = random_form(rng, T3, q, true);
      DifferentialForm ab = wedge(a, b), ba = wedge(b, a);
      if ((p * q) % 2 == 0)
        EXPECT_EQ(ab, ba);
      else
        EXPECT_EQ(ab, -ba);
    }
}

TEST(Forms, ManifoldMismatch) {
  EXPECT_THROW(wedge(DifferentialForm::volume(T2), DifferentialForm::volume(R2)), MathError);
}

TEST(Forms, DSquaredVanishes) {
  std::mt19937 rng(13);
  Manifold R3 = Manifold::euclidean(3);
  for (int deg = 0; deg <= 2; ++deg)
    for (int i = 0; i < 200; ++i) {
      DifferentialForm w = random_form(rng, R3, deg, false);
      EXPECT_TRUE(exterior_d(exterior_d(w)).is_zero());
    }
}

TEST(Forms, IntegrationExamples) {
  EXPECT_EQ(integrate(DifferentialForm::volume(T2)), Scalar(1));
  DifferentialForm osc(T2);
  osc.add({0, 1}, ChartFunction::fourier(T2.coords(), {1, 0}, Scalar(1)));
  EXPECT_EQ(integrate(osc), Scalar());
  EXPECT_THROW(integrate(DifferentialForm::basis(T2, {"x"})), MathError);
  EXPECT_THROW(integrate(DifferentialForm::volume(R2)), MathError);
  EXPECT_EQ(integrate(DifferentialForm::volume(Manifold::sphere2(), Scalar(3))), Scalar(3));
}

TEST(Forms, StokesOnTori) {
  std::mt19937 rng(17);
  for (int n : {2, 3, 4}) {
    Manifold T = Manifold::torus(n);
    for (int i = 0; i < 50; ++i) {
      DifferentialForm w = random_form(rng, T, n - 1, true);
      EXPECT_TRUE(integrate_complex(exterior_d(w)).is_zero());
    }
  }
  // ∫ d(f dy) = 0 for a trigonometric f
  ChartFunction f = gen::random_trig(rng, T2.coords(), 3, 6);
  EXPECT_TRUE(integrate_complex(exterior_d(DifferentialForm::one_form(T2, "y", f))).is_zero());
}

TEST(Forms, SphereRestrictions) {
  Manifold S2 = Manifold::sphere2();
  DifferentialForm w(S2);
  EXPECT_THROW(w.add({0}, ChartFunction::constant(S2.coords(), Scalar(1))), MathError);
  EXPECT_THROW(w.add({}, ChartFunction::variable(S2.coords(), "s")), MathError);
  EXPECT_TRUE(exterior_d(DifferentialForm::constant(S2, Scalar(2))).is_zero());
}
