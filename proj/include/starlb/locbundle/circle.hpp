#pragma once

#include <map>
#include <string>
#include <vector>

#include "starlb/exactalg/form.hpp"

namespace starlb {

// Coordinate `c` of the k-th point in a product M^n, e.g. "x#2".
inline std::string lifted(const std::string& c, int k) { return c + "#" + std::to_string(k); }

inline std::vector<std::string> lifted_vars(const std::vector<std::string>& coords, int points) {
  std::vector<std::string> out;
  for (int k = 1; k <= points; ++k)
    for (const auto& c : coords) out.push_back(lifted(c, k));
  return out;
}

// Renames point indices: {1 -> a, 2 -> b, ...}.
inline std::map<std::string, std::string> point_map(const std::vector<std::string>& coords, const std::vector<int>& to) {
  std::map<std::string, std::string> m;
  for (std::size_t k = 0; k < to.size(); ++k)
    for (const auto& c : coords) m[lifted(c, static_cast<int>(k) + 1)] = lifted(c, to[k]);
  return m;
}

// Function of a single point pulled back to point k.
inline ChartFunction at_point(const ChartFunction& f, const std::vector<std::string>& coords, int k) {
  std::map<std::string, std::string> m;
  for (const auto& c : coords) m[c] = lifted(c, k);
  return f.renamed(m);
}

inline bool is_integer_constant(const ChartFunction& f) {
  if (!f.is_constant()) return false;
  ComplexScalar c = f.constant_term();
  return c.is_real() && c.re.is_integer();
}

// A(x, y) = exp(2πi Φ(x̃, ỹ)) near the diagonal of a torus, Φ given on lifted
// coordinates "<coord>#1", "<coord>#2". The validity radius is bookkeeping: all
// identities are checked as exact polynomial/Fourier identities.
class LocalCircleFunction {
 public:
  LocalCircleFunction(Manifold base, ChartFunction phase, Rational radius = Rational(1, 4))
      : base_(std::move(base)), radius_(radius) {
    if (base_.kind() != Manifold::Kind::Torus) throw MathError("local circle functions live on tori");
    if (radius_ <= 0) throw MathError("validity radius must be positive");
    phase_ = phase.aligned(lifted_vars(base_.coords(), 2));
    if (!phase_.is_real()) throw MathError("phase must be real");
  }

  const Manifold& base() const { return base_; }
  const ChartFunction& phase() const { return phase_; }
  const Rational& radius() const { return radius_; }

  // Φ(x̃_a, x̃_b) on the points of M^3 (or M^n)
  ChartFunction phase_at(int a, int b, int points = 3) const {
    return phase_.renamed(point_map(base_.coords(), {a, b})).aligned(lifted_vars(base_.coords(), points));
  }

 private:
  Manifold base_;
  ChartFunction phase_;
  Rational radius_;
};

// β(x, y) + β(y, z) = β(x, z), real-valued.
class RealAdditiveFunction {
 public:
  RealAdditiveFunction(Manifold base, ChartFunction beta) : fn_(std::move(base), std::move(beta)) {}
  const LocalCircleFunction& as_phase() const { return fn_; }
  bool is_additive() const {
    return (fn_.phase_at(1, 2) + fn_.phase_at(2, 3) - fn_.phase_at(1, 3)).is_zero();
  }

 private:
  LocalCircleFunction fn_;
};

struct CircleCocycleReport {
  bool cocycle = false;       // Φ(1,2)+Φ(2,3)-Φ(1,3) ∈ ℤ
  bool diagonal = false;      // Φ(x,x) ∈ ℤ
  bool inverse = false;       // Φ(1,2)+Φ(2,1) ∈ ℤ
  bool periodic = false;      // Φ(x+e, y+e) - Φ(x, y) ∈ ℤ
  ChartFunction defect{std::vector<std::string>{}};
  std::vector<std::string> violations;
  bool passed() const { return cocycle && diagonal && inverse && periodic; }
};

inline CircleCocycleReport check_circle_cocycle(const LocalCircleFunction& A) {
  CircleCocycleReport r;
  const auto& coords = A.base().coords();
  r.defect = A.phase_at(1, 2) + A.phase_at(2, 3) - A.phase_at(1, 3);
  r.cocycle = is_integer_constant(r.defect);
  if (!r.cocycle) r.violations.push_back("cocycle defect is not an integer constant: " + r.defect.str());

  ChartFunction diag = A.phase().renamed(point_map(coords, {1, 1}));
  r.diagonal = is_integer_constant(diag);
  if (!r.diagonal) r.violations.push_back("phase on the diagonal is not an integer constant: " + diag.str());

  ChartFunction inv = A.phase_at(1, 2, 2) + A.phase_at(2, 1, 2);
  r.inverse = is_integer_constant(inv);
  if (!r.inverse) r.violations.push_back("A(x,y)A(y,x) != 1: " + inv.str());

  r.periodic = true;
  for (const auto& c : coords) {
    ChartFunction moved = A.phase().shifted(lifted(c, 1), 1).shifted(lifted(c, 2), 1) - A.phase();
    if (!is_integer_constant(moved)) {
      r.periodic = false;
      r.violations.push_back("phase not invariant under the lattice shift in " + c + ": " + moved.str());
    }
  }
  return r;
}

// α = (1/2πi) A⁻¹ d_x A on the diagonal = d_x̃ Φ. Throws unless the cocycle
// holds and the result is base-point independent.
inline DifferentialForm one_form_from_circle(const LocalCircleFunction& A) {
  auto rep = check_circle_cocycle(A);
  if (!rep.passed()) throw MathError("not a local circle function: " + rep.violations.front());
  const Manifold& m = A.base();
  const auto& coords = m.coords();
  std::map<std::string, std::string> down;
  for (const auto& c : coords) down[lifted(c, 1)] = c;
  DifferentialForm alpha(m);
  for (const auto& c : coords) {
    ChartFunction d = A.phase().derive(lifted(c, 1));
    for (const auto& c2 : coords)
      if (d.depends_on(lifted(c2, 2))) throw MathError("1-form depends on the base point");
    alpha += DifferentialForm::one_form(m, c, d.renamed(down).aligned(coords));
  }
  for (const auto& [idx, f] : alpha.terms())
    if (!f.is_trigonometric()) throw MathError("extracted 1-form is not periodic");
  return alpha;
}

// Periods of α over the lattice generators.
inline std::vector<Scalar> h1_class(const LocalCircleFunction& A) {
  DifferentialForm alpha = one_form_from_circle(A);
  std::vector<Scalar> out;
  for (const auto& c : A.base().coords()) {
    ComplexScalar p = alpha.coefficient(std::vector<std::string>{c}).torus_mean();
    out.push_back(p.re);
  }
  return out;
}

// e^{2πiβ} A
inline LocalCircleFunction twisted_by(const LocalCircleFunction& A, const RealAdditiveFunction& beta) {
  if (!(beta.as_phase().base() == A.base())) throw MathError("manifold mismatch");
  if (!beta.is_additive()) throw MathError("β is not additive");
  return LocalCircleFunction(A.base(), A.phase() + beta.as_phase().phase(), std::min(A.radius(), beta.as_phase().radius()));
}

// β = b(x) - b(y) for a global function b: the additive functions that do not
// move the class.
inline RealAdditiveFunction coboundary(const Manifold& m, const ChartFunction& b) {
  if (!b.is_trigonometric() || !b.is_real()) throw MathError("b must be a real periodic function");
  ChartFunction bb = b.aligned(m.coords());
  return RealAdditiveFunction(m, at_point(bb, m.coords(), 1) - at_point(bb, m.coords(), 2));
}

// Equal germs: compared on the smaller validity radius, where they agree iff
// the phases differ by an integer constant.
inline bool same_germ(const LocalCircleFunction& a, const LocalCircleFunction& b) {
  if (!(a.base() == b.base())) return false;
  return is_integer_constant(a.phase() - b.phase());
}

}  // namespace starlb
