#pragma once

#include "starlb/starprod/star_product.hpp"

namespace starlb {

// Tr(Σ a_k t^k) = Σ t^k ∫_{T^{2n}} a_k with unit torus volume. The result is a
// series of constants. Every B̃_m with m >= 1 integrates to zero against
// periodic functions because Π is antisymmetric, which is what makes this a
// trace for the standard product.
inline FormalSeries star_trace(const FormalSeries& a, const PureStarProduct& S) {
  FormalSeries out(a.order(), std::vector<std::string>{});
  for (int k = 0; k <= a.order(); ++k) {
    ChartFunction f = S.poisson().on_chart(a[k]);
    if (!f.is_trigonometric())
      throw MathError("star trace needs trigonometric coefficients on a torus (order " + std::to_string(k) + ")");
    out[k] = ChartFunction::constant(f.torus_mean());
  }
  return out;
}

}  // namespace starlb
