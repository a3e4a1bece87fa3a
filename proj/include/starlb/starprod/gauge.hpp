#pragma once

#include <map>
#include <string>
#include <vector>

#include "starlb/starprod/star_product.hpp"

namespace starlb {

// Constant-coefficient differential operator Σ c_α ∂^α, stored by its symbol.
class DiffOperator {
 public:
  DiffOperator() = default;
  explicit DiffOperator(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static DiffOperator identity(std::vector<std::string> vars, const Scalar& c = Scalar(1)) {
    DiffOperator d(std::move(vars));
    d.add(std::vector<int>(d.vars_.size(), 0), c);
    return d;
  }
  static DiffOperator partial(std::vector<std::string> vars, const std::string& var, int order = 1) {
    DiffOperator d(std::move(vars));
    std::vector<int> a(d.vars_.size(), 0);
    bool found = false;
    for (std::size_t i = 0; i < d.vars_.size(); ++i)
      if (d.vars_[i] == var) {
        a[i] = order;
        found = true;
      }
    if (!found) throw MathError("unknown variable '" + var + "'");
    d.add(a, Scalar(1));
    return d;
  }
  // Σ ∂_i²
  static DiffOperator laplacian(const std::vector<std::string>& vars) {
    DiffOperator d(vars);
    for (const auto& v : vars) d = d + partial(vars, v, 2);
    return d;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<std::vector<int>, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Scalar constant_term() const {
    auto it = terms_.find(std::vector<int>(vars_.size(), 0));
    return it == terms_.end() ? Scalar() : it->second;
  }

  void add(const std::vector<int>& a, const Scalar& c) {
    if (a.size() != vars_.size()) throw MathError("multi-index length mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  ChartFunction apply(const ChartFunction& f) const {
    ChartFunction g = f.aligned(ChartFunction::merge_vars(vars_, f.vars()));
    ChartFunction out(g.vars());
    DerivativeCache cache(g.aligned(g.vars()));
    for (const auto& [a, c] : terms_) {
      std::vector<int> counts(g.vars().size(), 0);
      for (std::size_t i = 0; i < vars_.size(); ++i) counts[g.index_of(vars_[i])] = a[i];
      out += cache.get(counts) * c;
    }
    return out;
  }

  friend DiffOperator operator+(const DiffOperator& a, const DiffOperator& b) {
    a.require_same(b);
    DiffOperator r = a;
    for (const auto& [k, c] : b.terms_) r.add(k, c);
    return r;
  }
  friend DiffOperator operator-(const DiffOperator& a) {
    DiffOperator r(a.vars_);
    for (const auto& [k, c] : a.terms_) r.add(k, -c);
    return r;
  }
  friend DiffOperator operator*(const DiffOperator& a, const DiffOperator& b) {
    a.require_same(b);
    DiffOperator r(a.vars_);
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        std::vector<int> k = ka;
        for (std::size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
        r.add(k, ca * cb);
      }
    return r;
  }
  friend DiffOperator operator*(const DiffOperator& a, const Scalar& s) {
    DiffOperator r(a.vars_);
    for (const auto& [k, c] : a.terms_) r.add(k, c * s);
    return r;
  }
  friend bool operator==(const DiffOperator& a, const DiffOperator& b) = default;

 private:
  void require_same(const DiffOperator& o) const {
    if (vars_ != o.vars_) throw MathError("differential operators live on different charts");
  }

  std::vector<std::string> vars_;
  std::map<std::vector<int>, Scalar> terms_;
};

// T = Σ_{k=0}^{K} t^k D_k with constant-coefficient D_k. The leading term
// must be an invertible constant so the Neumann series for T^{-1} exists.
class GaugeOperator {
 public:
  GaugeOperator(std::vector<std::string> vars, std::vector<DiffOperator> orders) : vars_(std::move(vars)), D_(std::move(orders)) {
    if (D_.empty()) throw MathError("gauge operator needs an order-0 term");
    for (const auto& d : D_)
      if (d.vars() != vars_) throw MathError("gauge operator terms live on different charts");
    const DiffOperator& lead = D_[0];
    if (lead.terms().size() != 1 || !lead.constant_term().is_monomial())
      throw MathError("gauge operator is not formally invertible: order-0 term must be a nonzero constant");
    inverse_ = neumann_inverse();
  }

  // Id + Σ_{k>=1} t^k D_k
  static GaugeOperator from_corrections(std::vector<std::string> vars, std::vector<DiffOperator> corrections) {
    std::vector<DiffOperator> all{DiffOperator::identity(vars)};
    for (auto& d : corrections) all.push_back(std::move(d));
    return GaugeOperator(std::move(vars), std::move(all));
  }
  static GaugeOperator identity(std::vector<std::string> vars) { return from_corrections(std::move(vars), {}); }

  int order() const { return static_cast<int>(D_.size()) - 1; }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<DiffOperator>& terms() const { return D_; }
  const std::vector<DiffOperator>& inverse_terms() const { return inverse_; }

  // T(1) = 1
  bool preserves_unit() const {
    if (!(D_[0].constant_term() == Scalar(1))) return false;
    for (std::size_t k = 1; k < D_.size(); ++k)
      if (!D_[k].constant_term().is_zero()) return false;
    return true;
  }

  FormalSeries apply(const FormalSeries& a) const { return apply_with(D_, a); }
  FormalSeries apply_inverse(const FormalSeries& a) const { return apply_with(inverse_, a); }

 private:
  // E_0 = D_0^{-1}, E_k = -D_0^{-1} Σ_{m=1}^{k} D_m E_{k-m}; constant
  // coefficients commute, so left and right inverses agree.
  std::vector<DiffOperator> neumann_inverse() const {
    const Scalar inv0 = D_[0].constant_term().inverse();
    std::vector<DiffOperator> E{DiffOperator::identity(vars_, inv0)};
    for (int k = 1; k <= kInverseOrders; ++k) {
      DiffOperator acc(vars_);
      for (int m = 1; m <= k && m < static_cast<int>(D_.size()); ++m) acc = acc + D_[static_cast<std::size_t>(m)] * E[static_cast<std::size_t>(k - m)];
      E.push_back(-(acc * inv0));
    }
    return E;
  }

  FormalSeries apply_with(const std::vector<DiffOperator>& ops, const FormalSeries& a) const {
    FormalSeries out(a.order(), ChartFunction::merge_vars(vars_, a[0].vars()));
    for (int k = 0; k <= a.order(); ++k)
      for (int m = 0; m <= k && m < static_cast<int>(ops.size()); ++m)
        out[k] += ops[static_cast<std::size_t>(m)].apply(a[k - m]);
    return out;
  }

  static constexpr int kInverseOrders = PureStarProduct::kMaxOrder;

  std::vector<std::string> vars_;
  std::vector<DiffOperator> D_;
  std::vector<DiffOperator> inverse_;
};

// a ⋆' b = T^{-1}(T a ⋆ T b)
class GaugeTwistedProduct {
 public:
  GaugeTwistedProduct(PureStarProduct S, GaugeOperator T) : S_(std::move(S)), T_(std::move(T)) {
    if (T_.vars() != S_.vars()) throw MathError("gauge operator and star product live on different charts");
  }

  const PureStarProduct& base() const { return S_; }
  const GaugeOperator& gauge() const { return T_; }

  FormalSeries lift(const ChartFunction& f, int K) const { return S_.lift(f, K); }
  FormalSeries multiply(const FormalSeries& a, const FormalSeries& b) const {
    return T_.apply_inverse(S_.multiply(T_.apply(a), T_.apply(b)));
  }

 private:
  PureStarProduct S_;
  GaugeOperator T_;
};

inline GaugeTwistedProduct gauge_twist(const PureStarProduct& S, const GaugeOperator& T) { return GaugeTwistedProduct(S, T); }

}  // namespace starlb
