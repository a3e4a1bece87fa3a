#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "starlb/exactalg/cohomology.hpp"
#include "starlb/locbundle/bundle.hpp"

namespace starlb {

// (1/g)(1 + b cos 2πx + s sin 2πx): a raised cosine peaking near the chart
// center. b² + s² <= 1 is the nonnegativity certificate.
struct Window {
  Rational b, s;
  int count = 1;
  ChartFunction function(const std::vector<std::string>& coords, std::size_t axis) const {
    std::vector<int> k(coords.size(), 0);
    k[axis] = 1;
    return (ChartFunction::constant(coords, Scalar(1)) + ChartFunction::cos2pi(coords, k) * Scalar(b) +
            ChartFunction::sin2pi(coords, k) * Scalar(s)) *
           Scalar(Rational(1, count));
  }
  // Peak position in [0, 1).
  double peak() const {
    double t = std::atan2(static_cast<double>(s), static_cast<double>(b)) / (2 * std::numbers::pi);
    return t < 0 ? t + 1 : t;
  }
};

// Tensor products of per-axis windows, one per grid chart; Σρ = 1 exactly.
struct PartitionOfUnity {
  std::vector<ChartFunction> rho;
  std::vector<std::vector<Window>> axes;  // empty for a single chart
};

namespace detail {
inline Rational round_to(double v, long den) { return Rational(static_cast<long>(std::lround(v * static_cast<double>(den))), den); }
}  // namespace detail

// strength in (0, 1] scales the oscillating part; the coefficients are dyadic
// approximations of strength·(cos, sin)(2π c_a), with the mean removed so the
// windows sum to exactly 1.
inline PartitionOfUnity raised_cosine_partition(const GoodCover& cover, const Rational& strength = Rational(9, 10)) {
  if (strength <= 0 || strength > 1) throw MathError("window strength must lie in (0, 1]");
  const auto coords = Manifold::default_names(cover.dim());
  PartitionOfUnity P;
  if (cover.size() == 1) {
    P.rho.push_back(ChartFunction::constant(coords, Scalar(1)));
    return P;
  }
  if (!cover.grid_size()) throw MathError("raised-cosine partitions need a grid cover");
  const int g = *cover.grid_size();
  std::vector<Window> w;
  Rational mb = 0, ms = 0;
  for (int a = 0; a < g; ++a) {
    double c = (a + 0.5) / g;
    Window x{detail::round_to(static_cast<double>(strength) * std::cos(2 * std::numbers::pi * c), 1 << 12),
             detail::round_to(static_cast<double>(strength) * std::sin(2 * std::numbers::pi * c), 1 << 12), g};
    mb += x.b;
    ms += x.s;
    w.push_back(x);
  }
  for (auto& x : w) {
    x.b -= mb / g;
    x.s -= ms / g;
  }
  for (auto& x : w)
    while (x.b * x.b + x.s * x.s > 1) {
      for (auto& y : w) {
        y.b *= Rational(63, 64);
        y.s *= Rational(63, 64);
      }
    }
  P.axes.assign(static_cast<std::size_t>(cover.dim()), w);
  for (std::size_t c = 0; c < cover.size(); ++c) {
    ChartFunction r = ChartFunction::constant(coords, Scalar(1));
    std::size_t k = c;
    std::vector<int> cell(static_cast<std::size_t>(cover.dim()));
    for (int d = cover.dim() - 1; d >= 0; --d) {
      cell[static_cast<std::size_t>(d)] = static_cast<int>(k % static_cast<std::size_t>(g));
      k /= static_cast<std::size_t>(g);
    }
    for (std::size_t d = 0; d < cell.size(); ++d) r = r * P.axes[d][static_cast<std::size_t>(cell[d])].function(coords, d);
    P.rho.push_back(r);
  }
  return P;
}

// Throws unless P is a partition of unity adapted to the cover: one window
// per chart, exact sum 1, certified nonnegative, each window peaking inside
// its chart. Trigonometric windows cannot have compact support; the peak test
// stands in for subordination.
inline void check_subordinate(const GoodCover& cover, const PartitionOfUnity& P) {
  const auto coords = Manifold::default_names(cover.dim());
  if (P.rho.size() != cover.size()) throw MathError("partition has " + std::to_string(P.rho.size()) + " functions for " + std::to_string(cover.size()) + " charts");
  ChartFunction sum(coords);
  for (const auto& r : P.rho) {
    if (!r.is_trigonometric() || !r.is_real()) throw MathError("partition functions must be real trigonometric polynomials");
    sum += r;
  }
  if (!(sum == ChartFunction::constant(coords, Scalar(1)))) throw MathError("partition functions do not sum to 1");
  if (cover.size() == 1) return;
  if (!cover.grid_size() || P.axes.size() != static_cast<std::size_t>(cover.dim())) throw MathError("partition is not a window product");
  const int g = *cover.grid_size();
  for (std::size_t c = 0; c < cover.size(); ++c) {
    std::size_t k = c;
    ChartFunction r = ChartFunction::constant(coords, Scalar(1));
    for (int d = cover.dim() - 1; d >= 0; --d) {
      const auto a = k % static_cast<std::size_t>(g);
      k /= static_cast<std::size_t>(g);
      const Window& w = P.axes[static_cast<std::size_t>(d)].at(a);
      if (w.b * w.b + w.s * w.s > 1) throw MathError("window is not nonnegative");
      const ChartBox& box = cover.charts()[c];
      double lo = static_cast<double>(box.lo(static_cast<std::size_t>(d))), hi = static_cast<double>(box.hi(static_cast<std::size_t>(d)));
      double p = w.peak();
      bool inside = false;
      for (int n = -1; n <= 1; ++n) inside = inside || (p + n > lo && p + n < hi);
      if (!inside) throw MathError("partition function " + std::to_string(c) + " is not subordinate to its chart");
      r = r * w.function(coords, static_cast<std::size_t>(d));
    }
    if (!(r == P.rho[c])) throw MathError("partition function " + std::to_string(c) + " does not match its windows");
  }
}

// 1-form on M^n pulled back from M^2 (or M) along the point map.
inline DifferentialForm pull_points(const DifferentialForm& w, const std::vector<std::string>& coords, const std::vector<int>& to,
                                    int points) {
  const Manifold target = Manifold::euclidean(lifted_vars(coords, points));
  std::map<std::string, std::string> m;
  const bool single = w.manifold().coords() == coords;
  if (single) {
    for (const auto& c : coords) m[c] = lifted(c, to.at(0));
  } else {
    m = point_map(coords, to);
  }
  return substitute(w, target, m, m);
}

// 𝒜 = π_L* a - π_R* a on the two-point chart.
inline DifferentialForm two_point_form(const DifferentialForm& a, const std::vector<std::string>& coords) {
  return pull_points(a, coords, {1}, 2) - pull_points(a, coords, {2}, 2);
}

// Connection-form additivity π_S*𝒜 + π_F*𝒜 = π_C*𝒜 on M^3.
inline bool is_multiplicative(const DifferentialForm& A, const std::vector<std::string>& coords) {
  return pull_points(A, coords, {1, 2}, 3) + pull_points(A, coords, {2, 3}, 3) == pull_points(A, coords, {1, 3}, 3);
}

struct GluedConnection {
  std::vector<DifferentialForm> a;  // chart coordinates, connection d + i a_i on L_i
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};

// ∇ on L_i = Σ_j ρ_j ∇_j with ∇_j = d + i(α_j + γ_j) moved to L_i through the
// gluing; since α_j moved to chart i is α_i, a_i = α_i + Σ_j ρ_j γ_j.
// γ_j are global real 1-forms on the torus (zero when omitted).
inline GluedConnection glue_multiplicative_connection(const LocalLineBundle& L, const PartitionOfUnity& P,
                                                      const std::vector<DifferentialForm>& gamma = {}) {
  const GoodCover& cover = L.cover();
  check_subordinate(cover, P);
  const auto& coords = L.coords();
  const Manifold chart = chart_manifold(cover.dim());
  if (!gamma.empty() && gamma.size() != cover.size()) throw MathError("need one perturbation 1-form per chart");
  DifferentialForm shared(chart);
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (gamma[j].manifold().kind() != Manifold::Kind::Torus || gamma[j].manifold().dim() != cover.dim())
      throw MathError("perturbations must be forms on the torus");
    for (const auto& [idx, f] : gamma[j].terms())
      if (idx.size() != 1 || !f.is_trigonometric() || !f.is_real()) throw MathError("perturbations must be real periodic 1-forms");
    shared += rebased(gamma[j], chart) * P.rho[j];
  }
  GluedConnection G;
  for (std::size_t i = 0; i < cover.size(); ++i) G.a.push_back(L.data().alpha[i] + shared);
  for (const auto& o : cover.overlaps()) {
    DifferentialForm diff = G.a[o.i] - translate(G.a[o.j], cover.lift(o.i, o.j));
    if (!(diff == exterior_d(DifferentialForm::function(chart, L.data().transition(o.i, o.j)))))
      G.violations.push_back("glued connection disagrees on overlap " + std::to_string(o.i) + "," + std::to_string(o.j));
  }
  for (std::size_t i = 0; i < cover.size(); ++i)
    if (!is_multiplicative(two_point_form(G.a[i], coords), coords))
      G.violations.push_back("connection on chart " + std::to_string(i) + " is not multiplicative");
  return G;
}

// β with a_i - a'_i = β on every chart; 𝒜 - 𝒜' = π_L*β - π_R*β is checked.
inline DifferentialForm connection_difference(const GluedConnection& c1, const GluedConnection& c2, const std::vector<std::string>& coords) {
  if (c1.a.size() != c2.a.size() || c1.a.empty()) throw MathError("connections live on different covers");
  DifferentialForm beta = c1.a[0] - c2.a[0];
  for (std::size_t i = 1; i < c1.a.size(); ++i)
    if (!(c1.a[i] - c2.a[i] == beta)) throw MathError("connection difference is not a global 1-form");
  for (const auto& [idx, f] : beta.terms())
    if (!f.is_trigonometric()) throw MathError("connection difference is not periodic");
  for (std::size_t i = 0; i < c1.a.size(); ++i)
    if (!(two_point_form(c1.a[i], coords) - two_point_form(c2.a[i], coords) ==
          pull_points(beta, coords, {1}, 2) - pull_points(beta, coords, {2}, 2)))
      throw MathError("two-point connection difference does not factor");
  return rebased(beta, Manifold::torus(coords));
}

// Curvature restricted to left tangent vectors at the diagonal: d a_i, which
// must agree on all charts and be periodic.
inline DifferentialForm left_curvature(const LocalLineBundle& L) {
  if (!L.connection()) throw MathError("bundle has no connection");
  const auto& a = *L.connection();
  DifferentialForm F = exterior_d(a.at(0));
  for (std::size_t i = 1; i < a.size(); ++i)
    if (!(exterior_d(a[i]) == F)) throw MathError("left curvature differs between charts");
  for (const auto& [idx, f] : F.terms())
    if (!f.is_trigonometric()) throw MathError("left curvature is not periodic");
  return rebased(F, Manifold::torus(L.coords()));
}

// Class of F/2π via its harmonic representative; uses the canonical
// connection d + iα_i when none is attached.
inline CohomologyClass chern_class(const LocalLineBundle& L) {
  DifferentialForm F(Manifold::torus(L.coords()));
  if (L.connection()) {
    F = left_curvature(L);
  } else {
    LocalLineBundle copy = L;
    copy.attach_connection(L.data().alpha);
    F = left_curvature(copy);
  }
  CohomologyClass c(F * Scalar(Rational(1, 2), -1));
  return CohomologyClass(c.harmonic());
}

// Hermitian weights h_i on L_i; ⟨u, v⟩_i = h_i u v̄.
struct HermitianData {
  std::vector<ChartFunction> h;
};

// Exact sufficient positivity test for a real trigonometric polynomial with
// rational coefficients: mean > Σ |Re c_k| + |Im c_k|.
inline bool certified_positive(const ChartFunction& f) {
  if (!f.is_trigonometric() || !f.is_real()) return false;
  Rational mean = 0, mass = 0;
  for (const auto& [m, c] : f.terms()) {
    if (!c.re.is_rational() || !c.im.is_rational()) return false;
    if (m.is_one()) {
      mean = c.re.rational_value();
    } else {
      mass += abs(c.re.rational_value()) + abs(c.im.rational_value());
    }
  }
  return mean > mass;
}

// Two-point metric |u|²_(x,y) = N(x, y) / D(x, y).
struct TwoPointMetric {
  ChartFunction N, D;
};

inline bool is_multiplicative(const TwoPointMetric& M, const std::vector<std::string>& coords) {
  auto at = [&](const ChartFunction& f, int a, int b) { return f.renamed(point_map(coords, {a, b})).aligned(lifted_vars(coords, 3)); };
  return at(M.N, 1, 2) * at(M.N, 2, 3) * at(M.D, 1, 3) == at(M.N, 1, 3) * at(M.D, 1, 2) * at(M.D, 2, 3);
}

struct GluedMetric {
  ChartFunction h;  // global weight on every L_i
  TwoPointMetric metric;
  bool multiplicative = false;
};

// h = Σ_j ρ_j h_j on each L_i (the gluings are unitary, so h_j moves to L_i
// unchanged), and h(x)/h(y) on L_i ⊠ L_i⁻¹.
inline GluedMetric glue_hermitian(const LocalLineBundle& L, const PartitionOfUnity& P, const HermitianData& H) {
  check_subordinate(L.cover(), P);
  const auto& coords = L.coords();
  if (H.h.size() != L.cover().size()) throw MathError("need one Hermitian weight per chart");
  ChartFunction h(coords);
  for (std::size_t j = 0; j < H.h.size(); ++j) {
    if (!certified_positive(H.h[j])) throw MathError("Hermitian weight " + std::to_string(j) + " is not certified positive");
    h += P.rho[j] * H.h[j];
  }
  GluedMetric G{h, {at_point(h, coords, 1).aligned(lifted_vars(coords, 2)), at_point(h, coords, 2).aligned(lifted_vars(coords, 2))}, false};
  G.multiplicative = is_multiplicative(G.metric, coords);
  return G;
}

}  // namespace starlb
