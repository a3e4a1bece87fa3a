#include <gtest/gtest.h>

#include "oracle/winding.hpp"
#include "starlb/toeplitz/hardy.hpp"

using namespace starlb;

namespace {

CircleSymbol modes(std::map<int, ComplexScalar> m) { return CircleSymbol::from_modes(m); }
const CircleSymbol kOne = modes({{0, Scalar(1)}});
const CircleSymbol kShift = modes({{1, Scalar(1)}});
const CircleSymbol kShiftInv = modes({{-1, Scalar(1)}});
const CircleSymbol kTwoPlus = modes({{0, Scalar(2)}, {1, Scalar(1)}});

std::map<int, cplx> numeric_modes(const CircleSymbol& f) {
  std::map<int, cplx> out;
  for (const auto& [m, c] : f.modes()) out[m] = f.coefficient_d(m);
  return out;
}

}  // namespace

TEST(Hardy, TruncationIsProjector) {
  for (int N : {0, 1, 5, 17})
    for (int W : {N, N + 3, 2 * N + 4}) EXPECT_TRUE((HardyTruncation{N}.idempotent(W)));
  auto P = HardyTruncation{2}.matrix(3);
  EXPECT_EQ(P[3][3], 1);
  EXPECT_EQ(P[2][2], 0);  // mode -1
  EXPECT_EQ(P[6][6], 0);  // mode 3
}

TEST(Hardy, SymbolFromChartFunction) {
  auto f = ChartFunction::fourier({"t"}, {2}, Scalar(3)) + ChartFunction::constant({"t"}, Scalar(1));
  CircleSymbol s(f);
  EXPECT_EQ(s.bandwidth(), 2);
  EXPECT_EQ(s.coefficient(2), ComplexScalar(Scalar(3)));
  EXPECT_NEAR(std::abs(s(0.25) - cplx(-2, 0)), 0, 1e-12);
  EXPECT_THROW(CircleSymbol(ChartFunction::variable({"x"}, "x")), MathError);
  EXPECT_THROW(CircleSymbol(ChartFunction::fourier({"x", "y"}, {1, 1}, Scalar(1))), MathError);
}

TEST(Hardy, MatrixExamples) {
  auto I = toeplitz_matrix(kOne, 4);
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k) EXPECT_EQ(I.entry(j, k), ComplexScalar(j == k ? 1 : 0));
  auto S = toeplitz_matrix(kShift, 4);
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 5; ++k) EXPECT_EQ(S.entry(j, k), ComplexScalar(j == k + 1 ? 1 : 0)) << j << "," << k;
  auto T = toeplitz_matrix(kTwoPlus, 3);
  EXPECT_EQ(T.entry(2, 2), ComplexScalar(2));
  EXPECT_EQ(T.entry(2, 1), ComplexScalar(1));
  EXPECT_EQ(T.entry(1, 2), ComplexScalar());
  EXPECT_EQ(T.size(), 4);
}

TEST(Hardy, MatrixNeedsBandwidth) {
  auto f = modes({{3, Scalar(1)}});
  EXPECT_THROW(toeplitz_matrix(f, 2), MathError);
  EXPECT_NO_THROW(toeplitz_matrix(f, 3));
}

TEST(Hardy, AdjointIsConjugateSymbol) {
  std::vector<CircleSymbol> fs = {kTwoPlus, modes({{-2, ComplexScalar(Scalar(1), Scalar(Rational(1, 3)))}, {1, ComplexScalar(Scalar(0), Scalar(5))}, {0, Scalar(Rational(-7, 2))}})};
  for (const auto& f : fs) EXPECT_EQ(toeplitz_matrix(f, 6).adjoint(), toeplitz_matrix(f.conj(), 6));
}

TEST(Hardy, IndexExamples) {
  EXPECT_EQ(hardy_index(kOne, 8, 4).value, 0.0);
  EXPECT_NEAR(hardy_index(kShift, 512, 256).value, -1.0, 1e-6);
  EXPECT_NEAR(hardy_index(kTwoPlus, 512, 256).value, 0.0, 1e-6);
}

TEST(Hardy, IndexMatchesWindingOracle) {
  std::vector<CircleSymbol> fs = {
      kShift, kShiftInv, kTwoPlus,
      modes({{2, Scalar(1)}, {0, Scalar(Rational(1, 3))}}),
      modes({{-1, Scalar(3)}, {0, Scalar(1)}, {2, Scalar(1)}}),
      modes({{1, Scalar(1)}, {3, ComplexScalar(Scalar(0), Scalar(Rational(1, 4)))}}),
  };
  for (const auto& f : fs) {
    double w = oracle::winding(numeric_modes(f));
    EXPECT_NEAR(w, std::round(w), 1e-9);
    EXPECT_NEAR(hardy_index(f, 256, 128).value, -std::round(w), 1e-6) << f.function();
  }
}

TEST(Hardy, IndexStableUnderRefinement) {
  for (const auto& f : {kShift, kTwoPlus, modes({{-1, Scalar(3)}, {0, Scalar(1)}, {2, Scalar(1)}})}) {
    double a = hardy_index(f, 128, 64).value, b = hardy_index(f, 256, 128).value;
    EXPECT_LT(std::abs(a - b), 1e-8);
  }
}

TEST(Hardy, ParametrixMethods) {
  EXPECT_EQ(reciprocal(kTwoPlus, 16).method, "neumann");
  auto r = reciprocal(kShift, 16);
  EXPECT_EQ(r.method, "quadrature");
  EXPECT_NEAR(std::abs(r.coeff[-1] - cplx(1, 0)), 0, 1e-12);
  // 1/(2 + w) = Σ (-1)^n w^n / 2^{n+1}
  auto n = reciprocal(kTwoPlus, 10);
  for (int m = 0; m <= 10; ++m) EXPECT_NEAR(n.coeff[m].real(), std::pow(-1.0, m) / std::pow(2.0, m + 1), 1e-14);
  EXPECT_LT(n.tail, 1e-3);
}

TEST(Hardy, NonEllipticRejected) {
  EXPECT_THROW(hardy_index(modes({{0, Scalar(1)}, {1, Scalar(1)}}), 16, 8), MathError);
  EXPECT_THROW(hardy_index(modes({}), 16, 8), MathError);
  auto m = ellipticity_margin(kTwoPlus);
  EXPECT_GT(m.margin(), 0.9);
  EXPECT_LE(m.margin(), 1.0);
}

TEST(Hardy, Additivity) {
  auto a = hardy_index_additivity(kOne, kOne, 64, 32);
  EXPECT_EQ(a.product, 0.0);
  auto b = hardy_index_additivity(kShift, kShift, 512, 256);
  EXPECT_NEAR(b.product, -2, 1e-6);
  EXPECT_LT(b.defect(), 1e-6);
  auto c = hardy_index_additivity(kShift, kShiftInv, 512, 256);
  EXPECT_NEAR(c.product, 0, 1e-6);
  EXPECT_LT(c.defect(), 1e-6);
  auto d = hardy_index_additivity(kTwoPlus, modes({{2, Scalar(1)}, {-1, Scalar(Rational(1, 5))}}), 256, 128);
  EXPECT_LT(d.defect(), 1e-6);
}
