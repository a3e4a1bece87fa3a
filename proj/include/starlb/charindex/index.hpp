#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "starlb/exactalg/cohomology.hpp"

namespace starlb {

// Coefficients of x/(1 - e^{-x}) = Σ b_k x^k up to order n.
inline std::vector<Rational> todd_series(int n) {
  // (1 - e^{-x})/x = Σ (-1)^k x^k/(k+1)!; invert the power series.
  std::vector<Rational> a(static_cast<std::size_t>(n) + 1);
  Rational fact = 1;
  for (int k = 0; k <= n; ++k) {
    fact *= (k + 1);
    a[static_cast<std::size_t>(k)] = Rational(k % 2 == 0 ? 1 : -1) / fact;
  }
  std::vector<Rational> b(static_cast<std::size_t>(n) + 1);
  b[0] = 1;
  for (int k = 1; k <= n; ++k) {
    Rational s = 0;
    for (int j = 1; j <= k; ++j) s += a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k - j)];
    b[static_cast<std::size_t>(k)] = -s;
  }
  return b;
}

// Td(TX ⊗ ℂ). Tori are parallelizable. On S2, TX ⊗ ℂ = L ⊕ L̄ with Chern
// roots ±x, x = c_1(TS2) = 2 [area]; the product Td(x) Td(-x) is truncated
// at degree 2.
inline CohomologyClass todd_class(const Manifold& X) {
  if (X.kind() == Manifold::Kind::Torus && X.dim() % 2 == 0) return CohomologyClass::one(X);
  if (X.kind() == Manifold::Kind::Sphere2) {
    auto b = todd_series(1);
    // degree-1 coefficient in x of Td(x) Td(-x)
    Rational lin = b[1] * b[0] - b[0] * b[1];
    DifferentialForm td = DifferentialForm::constant(X, Scalar(1)) + DifferentialForm::volume(X, Scalar(lin * 2));
    return CohomologyClass(td);
  }
  throw MathError("Todd class not available on " + X.name_str());
}

inline void require_real_closed(const DifferentialForm& w, const std::string& what) {
  if (!is_closed(w)) throw MathError(what + " is not closed");
  for (const auto& [idx, f] : w.terms())
    if (!f.is_real()) throw MathError(what + " is not real");
}

// exp(ω/2π) truncated at the top degree.
inline CohomologyClass exp_twist(const DifferentialForm& omega) {
  require_real_closed(omega, "twisting form");
  for (int d : omega.degrees())
    if (d != 2) throw MathError("twisting form must be a 2-form");
  const Manifold& X = omega.manifold();
  DifferentialForm w = omega * Scalar(Rational(1, 2), -1);
  DifferentialForm out = DifferentialForm::constant(X, Scalar(1));
  DifferentialForm power = out;
  for (int k = 1; 2 * k <= X.dim(); ++k) {
    power = wedge(power, w) * Scalar(Rational(1, k));
    out += power;
  }
  return CohomologyClass(out);
}

// Chern data of an elliptic symbol after integration over the cotangent
// fibres: an even closed class γ on X with integral degree-0 part.
struct EllipticSymbolClass {
  int rankE = 1, rankF = 1;
  DifferentialForm gamma;

  EllipticSymbolClass(int e, int f, DifferentialForm g) : rankE(e), rankF(f), gamma(std::move(g)) { validate(); }

  static EllipticSymbolClass identity(const Manifold& X, int rank = 1) {
    return EllipticSymbolClass(rank, rank, DifferentialForm(X));
  }

  void validate() const {
    if (rankE < 1 || rankF < 1) throw MathError("bundle ranks must be positive");
    if (rankE != rankF) throw MathError("elliptic symbols need rank E = rank F, got " + std::to_string(rankE) + " and " + std::to_string(rankF));
    for (int d : gamma.degrees())
      if (d % 2 != 0) throw MathError("symbol class must be even, found degree " + std::to_string(d));
    require_real_closed(gamma, "symbol class");
    ChartFunction g0 = gamma.coefficient(DifferentialForm::Index{});
    if (!g0.is_constant()) throw MathError("degree-0 part of the symbol class must be constant");
    ComplexScalar c = g0.constant_term();
    if (!c.is_real() || !c.re.is_integer()) throw MathError("degree-0 part of the symbol class must be an integer");
  }
};

struct IndexResult {
  Scalar value;
  std::map<int, Scalar> by_degree;  // contribution of γ_k
};

// ∫_X γ ∧ Td(X) ∧ exp(ω/2π)
inline IndexResult twisted_index(const EllipticSymbolClass& a, const DifferentialForm& omega, const Manifold& X) {
  a.validate();
  if (!(a.gamma.manifold() == X)) throw MathError("symbol class lives on " + a.gamma.manifold().name_str() + ", not " + X.name_str());
  if (!(omega.manifold() == X)) throw MathError("twisting form lives on " + omega.manifold().name_str() + ", not " + X.name_str());
  DifferentialForm kernel = wedge(todd_class(X).representative(), exp_twist(omega).representative());
  IndexResult r;
  const int n = X.dim();
  for (int k = 0; k <= n; k += 2) {
    DifferentialForm gk = a.gamma.part(k);
    if (gk.is_zero()) continue;
    Scalar c = integrate(wedge(gk, kernel.part(n - k)));
    r.by_degree[k] = c;
    r.value += c;
  }
  return r;
}

struct EqualityReport {
  Scalar lhs, rhs;
  bool passed() const { return lhs == rhs; }
};

// ind(a_2 a_1) = ind(a_1) + ind(a_2); composite Chern data is γ_1 + γ_2.
inline EqualityReport check_log_multiplicativity(const EllipticSymbolClass& a1, const EllipticSymbolClass& a2,
                                                 const DifferentialForm& omega, const Manifold& X) {
  if (a1.rankF != a2.rankE) throw MathError("ranks are not composable: " + std::to_string(a1.rankF) + " vs " + std::to_string(a2.rankE));
  EllipticSymbolClass comp(a1.rankE, a2.rankF, a1.gamma + a2.gamma);
  return {twisted_index(comp, omega, X).value, twisted_index(a1, omega, X).value + twisted_index(a2, omega, X).value};
}

struct Perturbation {
  enum class Target { Gamma, Omega } target = Target::Gamma;
  DifferentialForm primitive;  // β
  // expected dβ; left empty to use dβ
  std::optional<DifferentialForm> exact;
};

// Replacing a representative by representative + dβ leaves the index alone.
inline EqualityReport check_homotopy_invariance(const EllipticSymbolClass& a, const DifferentialForm& omega, const Manifold& X,
                                                const Perturbation& p) {
  DifferentialForm d = exterior_d(p.primitive);
  if (p.exact && !(*p.exact == d)) throw MathError("perturbation is not d of the supplied primitive");
  Scalar before = twisted_index(a, omega, X).value;
  Scalar after;
  if (p.target == Perturbation::Target::Gamma) {
    after = twisted_index(EllipticSymbolClass(a.rankE, a.rankF, a.gamma + d), omega, X).value;
  } else {
    after = twisted_index(a, omega + d, X).value;
  }
  return {after, before};
}

// Twisting by ω = 2πm dx∧dy on T2 equals the untwisted index of the honest
// tensor product, whose Chern data is γ ∧ exp(ω/2π).
inline EqualityReport check_tensor_consistency(const EllipticSymbolClass& a, const Rational& m) {
  if (denominator(m) != 1) throw MathError("tensor consistency needs an integral class, got m = " + rational_to_string(m));
  const Manifold X = Manifold::torus(2);
  DifferentialForm omega = DifferentialForm::volume(X, Scalar(2 * m, 1));
  DifferentialForm twisted = wedge(a.gamma, exp_twist(omega).representative());
  EllipticSymbolClass b(a.rankE, a.rankF, twisted);
  return {twisted_index(a, omega, X).value, twisted_index(b, DifferentialForm(X), X).value};
}

}  // namespace starlb
