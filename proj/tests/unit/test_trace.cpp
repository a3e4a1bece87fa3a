#include <gtest/gtest.h>

#include <random>

#include "oracle/generators.hpp"
#include "starlb/starprod/trace.hpp"

using namespace starlb;

namespace {
const PureStarProduct S = PureStarProduct(PoissonStructure::standard(1));
const std::vector<std::string> XY{"x", "y"};
ChartFunction e(int kx, int ky) { return ChartFunction::fourier(XY, {kx, ky}, Scalar(1)); }
}  // namespace

TEST(StarTrace, Examples) {
  FormalSeries one = S.lift(e(0, 0), 3);
  EXPECT_EQ(star_trace(one, S)[0], ChartFunction::constant(Scalar(1)));
  EXPECT_TRUE(star_trace(S.lift(e(1, 0), 3), S).is_zero());
  EXPECT_TRUE(star_trace(star_commutator(S.lift(e(1, 0), 5), S.lift(e(0, 1), 5), S), S).is_zero());
}

TEST(StarTrace, CommutatorIsNonzeroButTraceless) {
  FormalSeries c = star_commutator(S.lift(e(1, 0), 5), S.lift(e(0, 1), 5), S);
  EXPECT_FALSE(c.is_zero());
  EXPECT_TRUE(star_trace(c, S).is_zero());
}

TEST(StarTrace, TraceProperty) {
  std::mt19937 rng(31);
  for (int i = 0; i < 20; ++i) {
    ChartFunction a = gen::random_trig(rng, XY, 2, 4), b = gen::random_trig(rng, XY, 2, 4);
    FormalSeries A = S.lift(a, 5), B = S.lift(b, 5);
    EXPECT_EQ(star_trace(S.multiply(A, B), S), star_trace(S.multiply(B, A), S));
  }
}

TEST(StarTrace, FourTorus) {
  PureStarProduct S4(PoissonStructure::standard(2));
  std::mt19937 rng(32);
  for (int i = 0; i < 5; ++i) {
    ChartFunction a = gen::random_trig(rng, S4.vars(), 1, 3), b = gen::random_trig(rng, S4.vars(), 1, 3);
    EXPECT_TRUE(star_trace(star_commutator(S4.lift(a, 4), S4.lift(b, 4), S4), S4).is_zero());
  }
}

TEST(StarTrace, RejectsNonPeriodic) {
  EXPECT_THROW(star_trace(S.lift(ChartFunction::variable(XY, "x"), 2), S), MathError);
}
