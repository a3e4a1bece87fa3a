#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "starlb/exactalg/form.hpp"
#include "starlb/locbundle/cover.hpp"
#include "starlb/parallel.hpp"

namespace starlb {

inline Manifold chart_manifold(int dim) { return Manifold::euclidean(Manifold::default_names(dim)); }

// f(X - n), i.e. a chart-j function written in chart-i coordinates when
// n = lift(i, j).
inline ChartFunction translate(const ChartFunction& f, const std::vector<std::string>& coords, const Lattice& n) {
  ChartFunction r = f;
  for (std::size_t d = 0; d < coords.size(); ++d)
    if (n[d] != 0 && r.has_var(coords[d])) r = r.shifted(coords[d], Rational(-n[d]));
  return r;
}

inline DifferentialForm translate(const DifferentialForm& w, const Lattice& n) {
  DifferentialForm out(w.manifold());
  for (const auto& [idx, f] : w.terms()) out.add(idx, translate(f, w.manifold().coords(), n));
  return out;
}

// Čech-de Rham data for a closed 2-form: dα_i = ω, α_i - α_j = dφ_ij,
// φ_ij + φ_jk + φ_ki = φ_ijk. φ_ij is stored for both orders, each in the
// coordinates of its first chart.
struct CechConnectionData {
  GoodCover cover;
  DifferentialForm omega;                                         // on the torus
  std::vector<DifferentialForm> alpha;                            // chart coordinates
  std::map<std::pair<std::size_t, std::size_t>, ChartFunction> phi;
  std::map<std::array<std::size_t, 3>, Scalar> phi3;              // sorted triples

  const std::vector<std::string>& coords() const { return omega.manifold().coords(); }
  const ChartFunction& transition(std::size_t i, std::size_t j) const {
    auto it = phi.find({i, j});
    if (it == phi.end()) throw MathError("no transition function for charts " + std::to_string(i) + ", " + std::to_string(j));
    return it->second;
  }
  // φ_ij + φ_jk + φ_ki in chart-i coordinates, for any order of the charts.
  ChartFunction triple_sum(std::size_t i, std::size_t j, std::size_t k) const {
    const auto& c = coords();
    ChartFunction s = transition(i, j) + translate(transition(j, k), c, cover.lift(i, j)) +
                      translate(transition(k, i), c, cover.lift(i, k));
    return s.aligned(c);
  }
  Scalar triple_constant(std::size_t i, std::size_t j, std::size_t k) const {
    ChartFunction s = triple_sum(i, j, k);
    if (!s.is_constant() || !s.constant_term().is_real()) throw MathError("triple phase is not a real constant: " + s.str());
    return s.constant_term().re;
  }
};

struct CechReport {
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};

inline CechReport verify_cech(const CechConnectionData& D) {
  CechReport r;
  const auto& cover = D.cover;
  const Manifold chart = chart_manifold(cover.dim());
  const DifferentialForm omega = rebased(D.omega, chart);
  const auto& c = D.coords();
  if (D.alpha.size() != cover.size()) {
    r.violations.push_back("expected one 1-form per chart");
    return r;
  }
  for (std::size_t i = 0; i < cover.size(); ++i)
    if (!(exterior_d(D.alpha[i]) == omega)) r.violations.push_back("d alpha_" + std::to_string(i) + " != omega");
  for (const auto& o : cover.overlaps()) {
    for (auto [a, b] : {std::pair{o.i, o.j}, std::pair{o.j, o.i}}) {
      DifferentialForm lhs = D.alpha[a] - translate(D.alpha[b], cover.lift(a, b));
      if (!D.phi.count({a, b})) {
        r.violations.push_back("missing phi_" + std::to_string(a) + std::to_string(b));
        continue;
      }
      if (!(lhs == exterior_d(DifferentialForm::function(chart, D.transition(a, b)))))
        r.violations.push_back("alpha_" + std::to_string(a) + " - alpha_" + std::to_string(b) + " != d phi_" + std::to_string(a) + std::to_string(b));
    }
    if (D.phi.count({o.i, o.j}) && D.phi.count({o.j, o.i}) &&
        !(translate(D.transition(o.j, o.i), c, cover.lift(o.i, o.j)) == -D.transition(o.i, o.j)))
      r.violations.push_back("phi_" + std::to_string(o.j) + std::to_string(o.i) + " != -phi_" + std::to_string(o.i) + std::to_string(o.j));
  }
  if (!r.passed()) return r;
  for (const auto& t : cover.triples()) {
    ChartFunction s = D.triple_sum(t.i, t.j, t.k);
    auto it = D.phi3.find({t.i, t.j, t.k});
    std::string name = "phi_" + std::to_string(t.i) + std::to_string(t.j) + std::to_string(t.k);
    if (!s.is_constant()) r.violations.push_back(name + " is not constant: " + s.str());
    else if (it == D.phi3.end()) r.violations.push_back(name + " missing");
    else if (!(ComplexScalar(it->second) == s.constant_term())) r.violations.push_back(name + " does not match the stored constant");
  }
  return r;
}

// Solves the Čech-de Rham equations for ω = θ dx∧dy on T^2:
//   α_i = θ x dy in chart-i coordinates,
//   φ_ij = θ n^x_ij y (i < j),  φ_ji = -φ_ij,
// so that φ_ijk = -θ n^x_jk n^y_ij.
inline CechConnectionData solve_cech(const DifferentialForm& omega, const GoodCover& cover) {
  const Manifold& m = omega.manifold();
  if (!(m == Manifold::torus(2))) throw MathError("only closed 2-forms on T2 are supported, got " + m.name_str());
  if (cover.dim() != 2) throw MathError("cover dimension does not match the torus");
  if (!is_closed(omega)) throw MathError("2-form is not closed");
  for (int d : omega.degrees())
    if (d != 2) throw MathError("expected a 2-form");
  const ChartFunction& f = omega.coefficient(DifferentialForm::Index{0, 1});
  if (!f.is_constant()) throw MathError("unsupported 2-form: coefficients must be constant");
  if (!f.constant_term().is_real()) throw MathError("2-form must be real");
  const Scalar theta = f.constant_term().re;
  if (!theta.is_zero())
    for (std::size_t c = 0; c < cover.size(); ++c)
      if (cover.whole(c)) throw MathError("a whole-torus chart cannot carry a non-exact 2-form");

  const Manifold chart = chart_manifold(2);
  const auto& coords = chart.coords();
  CechConnectionData D{cover, omega, {}, {}, {}};
  ChartFunction X = ChartFunction::variable(coords, "x"), Y = ChartFunction::variable(coords, "y");
  for (std::size_t i = 0; i < cover.size(); ++i) D.alpha.push_back(DifferentialForm::one_form(chart, "y", X * theta));
  for (const auto& o : cover.overlaps()) {
    ChartFunction p = Y * (theta * Scalar(Rational(o.lift[0])));
    D.phi.emplace(std::pair{o.i, o.j}, p);
    D.phi.emplace(std::pair{o.j, o.i}, -translate(p, coords, cover.lift(o.j, o.i)));
  }
  for (const auto& t : cover.triples()) D.phi3[{t.i, t.j, t.k}] = D.triple_constant(t.i, t.j, t.k);
  return D;
}

// Oriented 2-cycle of the nerve of a 2-d grid cover: every cell (a, b) split
// into (a,b)(a+1,b)(a+1,b+1) and (a,b)(a+1,b+1)(a,b+1).
inline std::vector<std::array<std::size_t, 3>> fundamental_cycle(const GoodCover& cover) {
  if (!cover.grid_size() || cover.dim() != 2) throw MathError("fundamental cycle needs a 2-d grid cover");
  const int g = *cover.grid_size();
  std::vector<std::array<std::size_t, 3>> z;
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b) {
      std::size_t p = cover.grid_index({a, b}), q = cover.grid_index({a + 1, b}), r = cover.grid_index({a + 1, b + 1}),
                  s = cover.grid_index({a, b + 1});
      z.push_back({p, q, r});
      z.push_back({p, r, s});
    }
  return z;
}

// ⟨φ, Z⟩: unchanged by φ_ij -> φ_ij + c_ij, so its class mod 2πℤ is the
// obstruction to an honest line bundle.
inline Scalar cycle_pairing(const CechConnectionData& D) {
  Scalar s;
  for (const auto& t : fundamental_cycle(D.cover)) {
    if (!D.cover.has_triple(t[0], t[1], t[2])) throw MathError("grid triangle missing from the nerve");
    s += D.triple_constant(t[0], t[1], t[2]);
  }
  return s;
}

// All triple constants in 2πℤ: the one-sided cocycle e^{iφ_ij} closes.
inline bool integral_triples(const CechConnectionData& D) {
  for (const auto& [t, c] : D.phi3)
    if (!c.in_two_pi_z()) return false;
  return true;
}

// Adds constants c_ij (i < j) to the transition functions and recomputes the
// triple constants.
inline CechConnectionData regauge(CechConnectionData D, const std::map<std::pair<std::size_t, std::size_t>, Scalar>& shifts) {
  for (const auto& [ij, c] : shifts) {
    auto [i, j] = ij;
    ChartFunction k = ChartFunction::constant(D.coords(), c);
    D.phi.at({i, j}) += k;
    D.phi.at({j, i}) -= k;
  }
  for (auto& [t, c] : D.phi3) c = D.triple_constant(t[0], t[1], t[2]);
  return D;
}

}  // namespace starlb
