#pragma once

#include <string>
#include <vector>

#include "starlb/exactalg/chart_function.hpp"
#include "starlb/exactalg/form.hpp"

namespace starlb {

using ScalarMatrix = std::vector<std::vector<Scalar>>;

// Constant Poisson bivector Π on a chart of dimension 2n.
class PoissonStructure {
 public:
  PoissonStructure(std::vector<std::string> vars, ScalarMatrix bivector)
      : vars_(std::move(vars)), pi_(std::move(bivector)) {
    const std::size_t n = vars_.size();
    if (n == 0 || n % 2 != 0) throw MathError("Poisson structure needs an even-dimensional chart");
    if (pi_.size() != n) throw MathError("bivector has wrong size");
    for (const auto& row : pi_)
      if (row.size() != n) throw MathError("bivector has wrong size");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!(pi_[i][j] == -pi_[j][i])) throw MathError("bivector is not antisymmetric");
    omega_ = inverse_transpose();
  }

  // Canonical Π with {x_i, y_i} = 1 on R^{2n} (x, y when n = 1).
  static PoissonStructure standard(int n) {
    auto vars = Manifold::default_names(2 * n);
    ScalarMatrix pi(vars.size(), std::vector<Scalar>(vars.size()));
    for (std::size_t i = 0; i < vars.size(); i += 2) {
      pi[i][i + 1] = Scalar(1);
      pi[i + 1][i] = Scalar(-1);
    }
    return PoissonStructure(vars, pi);
  }

  const std::vector<std::string>& vars() const { return vars_; }
  int dim() const { return static_cast<int>(vars_.size()); }
  const ScalarMatrix& bivector() const { return pi_; }
  // ω = (Π^{-1})^T, so the canonical Π gives ω = dx∧dy.
  const ScalarMatrix& symplectic_matrix() const { return omega_; }

  DifferentialForm symplectic_form(const Manifold& m) const {
    DifferentialForm w(m);
    for (std::size_t i = 0; i < vars_.size(); ++i)
      for (std::size_t j = i + 1; j < vars_.size(); ++j)
        if (!omega_[i][j].is_zero())
          w += DifferentialForm::basis(m, {vars_[i], vars_[j]}, omega_[i][j]);
    return w;
  }

  // Functions must only involve the structure's variables.
  ChartFunction on_chart(const ChartFunction& f) const {
    for (const auto& v : f.support_vars()) {
      bool ok = false;
      for (const auto& w : vars_) ok = ok || w == v;
      if (!ok) throw MathError("dimension mismatch: variable '" + v + "' is not on the Poisson chart");
    }
    return f.aligned(vars_);
  }

 private:
  // Gauss-Jordan over Q[π, 1/π]; pivots must be single-term scalars.
  ScalarMatrix inverse_transpose() const {
    const std::size_t n = pi_.size();
    ScalarMatrix a = pi_;
    ScalarMatrix inv(n, std::vector<Scalar>(n));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Scalar(1);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = n;
      for (std::size_t r = col; r < n; ++r)
        if (a[r][col].is_monomial()) {
          piv = r;
          break;
        }
      if (piv == n) throw MathError("bivector is not invertible over exact scalars");
      std::swap(a[piv], a[col]);
      std::swap(inv[piv], inv[col]);
      Scalar s = a[col][col].inverse();
      for (std::size_t j = 0; j < n; ++j) {
        a[col][j] = a[col][j] * s;
        inv[col][j] = inv[col][j] * s;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a[r][col].is_zero()) continue;
        Scalar f = a[r][col];
        for (std::size_t j = 0; j < n; ++j) {
          a[r][j] -= f * a[col][j];
          inv[r][j] -= f * inv[col][j];
        }
      }
    }
    ScalarMatrix t(n, std::vector<Scalar>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) t[i][j] = inv[j][i];
    return t;
  }

  std::vector<std::string> vars_;
  ScalarMatrix pi_;
  ScalarMatrix omega_;
};

// {a, b} = Σ Π^{ij} ∂_i a ∂_j b
inline ChartFunction poisson_bracket(const ChartFunction& a, const ChartFunction& b, const PoissonStructure& P) {
  ChartFunction fa = P.on_chart(a);
  ChartFunction fb = P.on_chart(b);
  ChartFunction out(P.vars());
  const auto& vars = P.vars();
  std::vector<ChartFunction> db;
  for (const auto& v : vars) db.push_back(fb.derive(v));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    ChartFunction dai = fa.derive(vars[i]);
    if (dai.is_zero()) continue;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const Scalar& c = P.bivector()[i][j];
      if (c.is_zero() || db[j].is_zero()) continue;
      out += dai * db[j] * c;
    }
  }
  return out;
}

}  // namespace starlb
