#pragma once

#include <array>
#include <optional>
#include <vector>

#include "starlb/parallel.hpp"
#include "starlb/starprod/star_product.hpp"

namespace starlb {

using FunctionTriple = std::array<ChartFunction, 3>;

struct AssociativityViolation {
  std::size_t sample = 0;
  int order = 0;                // first t-order where (a⋆b)⋆c ≠ a⋆(b⋆c)
  ChartFunction discrepancy;    // coefficient of t^order in the difference
};

struct AssociativityReport {
  int requested_order = 0;
  int verified_order = 0;       // every sample agrees through this order
  std::size_t samples = 0;
  std::vector<AssociativityViolation> violations;

  bool passed() const { return violations.empty(); }
};

// (a⋆b)⋆c - a⋆(b⋆c) through order K.
template <StarProductLike P>
FormalSeries associator(const P& S, const FunctionTriple& s, int K) {
  FormalSeries a = S.lift(s[0], K), b = S.lift(s[1], K), c = S.lift(s[2], K);
  return S.multiply(S.multiply(a, b), c) - S.multiply(a, S.multiply(b, c));
}

template <StarProductLike P>
AssociativityReport check_associativity(const P& S, const std::vector<FunctionTriple>& samples, int K) {
  AssociativityReport rep;
  rep.requested_order = K;
  rep.verified_order = K;
  rep.samples = samples.size();
  auto results = parallel_map<std::optional<AssociativityViolation>>(samples.size(), [&](std::size_t i) {
    FormalSeries d = associator(S, samples[i], K);
    int k = d.first_nonzero();
    if (k < 0) return std::optional<AssociativityViolation>{};
    return std::optional<AssociativityViolation>{AssociativityViolation{i, k, d[k]}};
  });
  for (auto& r : results)
    if (r) {
      rep.verified_order = std::min(rep.verified_order, r->order - 1);
      rep.violations.push_back(std::move(*r));
    }
  return rep;
}

}  // namespace starlb
