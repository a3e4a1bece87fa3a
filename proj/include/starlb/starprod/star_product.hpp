#pragma once

#include <concepts>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "starlb/starprod/formal_series.hpp"
#include "starlb/starprod/poisson.hpp"

namespace starlb {

// Memoized partial derivatives of one function, keyed by multi-index counts.
class DerivativeCache {
 public:
  explicit DerivativeCache(ChartFunction f) : vars_(f.vars()) { cache_.emplace(std::vector<int>(vars_.size(), 0), std::move(f)); }

  const ChartFunction& get(const std::vector<int>& counts) {
    auto it = cache_.find(counts);
    if (it != cache_.end()) return it->second;
    std::size_t i = 0;
    while (counts[i] == 0) ++i;
    std::vector<int> lower = counts;
    lower[i] -= 1;
    ChartFunction d = get(lower).derive(vars_[i]);
    return cache_.emplace(counts, std::move(d)).first->second;
  }

 private:
  std::vector<std::string> vars_;
  std::map<std::vector<int>, ChartFunction> cache_;
};

// Σ c_{αβ} ∂^α(·) ∂^β(·) with constant coefficients; stored as a polynomial
// in left symbols ξ and right symbols η.
class BidiffOperator {
 public:
  using Key = std::pair<std::vector<int>, std::vector<int>>;

  BidiffOperator() = default;
  explicit BidiffOperator(int dim) : dim_(dim) {}

  static BidiffOperator identity(int dim) {
    BidiffOperator b(dim);
    b.add(Key{std::vector<int>(static_cast<std::size_t>(dim), 0), std::vector<int>(static_cast<std::size_t>(dim), 0)}, Scalar(1));
    return b;
  }
  // Σ Π^{ij} ξ_i η_j
  static BidiffOperator poisson(const PoissonStructure& P) {
    const int n = P.dim();
    BidiffOperator b(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Scalar& c = P.bivector()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (c.is_zero()) continue;
        Key k{std::vector<int>(static_cast<std::size_t>(n), 0), std::vector<int>(static_cast<std::size_t>(n), 0)};
        k.first[static_cast<std::size_t>(i)] = 1;
        k.second[static_cast<std::size_t>(j)] = 1;
        b.add(k, c);
      }
    return b;
  }

  int dim() const { return dim_; }
  const std::map<Key, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Key& k, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend BidiffOperator operator*(const BidiffOperator& a, const BidiffOperator& b) {
    BidiffOperator r(a.dim_);
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        Key k = ka;
        for (std::size_t i = 0; i < k.first.size(); ++i) {
          k.first[i] += kb.first[i];
          k.second[i] += kb.second[i];
        }
        r.add(k, ca * cb);
      }
    return r;
  }
  friend BidiffOperator operator*(const BidiffOperator& a, const Scalar& s) {
    BidiffOperator r(a.dim_);
    for (const auto& [k, c] : a.terms_) r.add(k, c * s);
    return r;
  }

  // (left derivative count, right derivative count) of every term.
  std::vector<std::pair<int, int>> derivative_counts() const {
    std::vector<std::pair<int, int>> out;
    for (const auto& [k, c] : terms_) {
      int l = 0, r = 0;
      for (int e : k.first) l += e;
      for (int e : k.second) r += e;
      out.emplace_back(l, r);
    }
    return out;
  }

  ChartFunction apply(DerivativeCache& a, DerivativeCache& b, const std::vector<std::string>& vars) const {
    ChartFunction out(vars);
    for (const auto& [k, c] : terms_) {
      const ChartFunction& da = a.get(k.first);
      if (da.is_zero()) continue;
      const ChartFunction& db = b.get(k.second);
      if (db.is_zero()) continue;
      out += da * db * c;
    }
    return out;
  }

  ChartFunction apply(const ChartFunction& a, const ChartFunction& b, const std::vector<std::string>& vars) const {
    DerivativeCache ca(a.aligned(vars)), cb(b.aligned(vars));
    return apply(ca, cb, vars);
  }

 private:
  int dim_ = 0;
  std::map<Key, Scalar> terms_;
};

// Pure star product a⋆b = Σ t^m B̃_m(a, b). The standard rule is
// B̃_m = (Π^{ij} ∂_i ⊗ ∂_j)^m / m!; a custom table overrides it for the listed
// orders and makes higher orders vanish.
class PureStarProduct {
 public:
  static constexpr int kMaxOrder = 10;

  explicit PureStarProduct(PoissonStructure P) : P_(std::move(P)), table_{BidiffOperator::identity(P_.dim())} {
    const BidiffOperator pi = BidiffOperator::poisson(P_);
    for (int k = 1; k <= kMaxOrder; ++k) table_.push_back(table_.back() * pi * Scalar(Rational(1, k)));
  }

  PureStarProduct(PoissonStructure P, std::vector<BidiffOperator> table)
      : P_(std::move(P)), table_(std::move(table)), custom_(true) {
    if (table_.empty()) throw MathError("bidifferential table must contain the order-0 operator");
  }

  const PoissonStructure& poisson() const { return P_; }
  const std::vector<std::string>& vars() const { return P_.vars(); }
  bool is_standard() const { return !custom_; }

  // B̃_m
  const BidiffOperator& bidifferential(int m) const {
    static const BidiffOperator zero;
    if (m < static_cast<int>(table_.size())) return table_[static_cast<std::size_t>(m)];
    if (custom_) return zero;
    throw MathError("truncation order above " + std::to_string(kMaxOrder) + " is not supported");
  }

  FormalSeries lift(const ChartFunction& f, int K) const { return FormalSeries(K, P_.on_chart(f)); }

  FormalSeries multiply(const FormalSeries& a, const FormalSeries& b) const {
    const int K = std::min(a.order(), b.order());
    const auto& vars = P_.vars();
    std::vector<DerivativeCache> ca, cb;
    for (int j = 0; j <= K; ++j) {
      ca.emplace_back(P_.on_chart(a[j]));
      cb.emplace_back(P_.on_chart(b[j]));
    }
    FormalSeries c(K, vars);
    for (int j = 0; j <= K; ++j) {
      if (a[j].is_zero()) continue;
      for (int l = 0; j + l <= K; ++l) {
        if (b[l].is_zero()) continue;
        for (int m = 0; j + l + m <= K; ++m) {
          const BidiffOperator& B = bidifferential(m);
          if (B.is_zero()) continue;
          c[j + l + m] += B.apply(ca[static_cast<std::size_t>(j)], cb[static_cast<std::size_t>(l)], vars);
        }
      }
    }
    return c;
  }

 private:
  PoissonStructure P_;
  std::vector<BidiffOperator> table_;
  bool custom_ = false;
};

template <typename P>
concept StarProductLike = requires(const P& p, const FormalSeries& a, const ChartFunction& f) {
  { p.multiply(a, a) } -> std::same_as<FormalSeries>;
  { p.lift(f, 0) } -> std::same_as<FormalSeries>;
};

inline FormalSeries star_multiply(const FormalSeries& a, const FormalSeries& b, const PureStarProduct& S) {
  return S.multiply(a, b);
}

template <StarProductLike P>
FormalSeries star_commutator(const FormalSeries& a, const FormalSeries& b, const P& S) {
  return S.multiply(a, b) - S.multiply(b, a);
}

// t^1 coefficient of a⋆b for t-independent a, b, i.e. B_1(a, b).
template <StarProductLike P>
ChartFunction first_order_term(const ChartFunction& a, const ChartFunction& b, const P& S) {
  return S.multiply(S.lift(a, 1), S.lift(b, 1))[1];
}

// (B_1(a, b) - B_1(b, a)) / 2
template <StarProductLike P>
ChartFunction antisymmetric_first_order(const ChartFunction& a, const ChartFunction& b, const P& S) {
  return (first_order_term(a, b, S) - first_order_term(b, a, S)) * Scalar(Rational(1, 2));
}

}  // namespace starlb
