// Acceptance run: one PASS/FAIL line per criterion with its tolerance and
// runtime limit. Exit status is 1 when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "starlb/charindex/index.hpp"
#include "starlb/exactalg/random.hpp"
#include "starlb/locbundle/circle.hpp"
#include "starlb/locbundle/connection.hpp"
#include "starlb/starprod/associativity.hpp"
#include "starlb/starprod/gauge.hpp"
#include "starlb/starprod/trace.hpp"
#include "starlb/toeplitz/berezin.hpp"
#include "starlb/toeplitz/hardy.hpp"

using namespace starlb;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  std::string tolerance;
  std::optional<double> limit;  // seconds
  std::function<Outcome()> run;
};

const Manifold S1 = Manifold::torus(1);
const Manifold T2 = Manifold::torus(2);
const std::vector<std::string> XY{"x", "y"};

std::vector<ChartFunction> monomials(const std::vector<std::string>& vars, int deg) {
  std::vector<ChartFunction> out;
  std::vector<int> e(vars.size(), 0);
  while (true) {
    int total = 0;
    for (int v : e) total += v;
    if (total <= deg) out.push_back(ChartFunction::monomial(vars, e, Scalar(1)));
    std::size_t i = 0;
    while (i < e.size() && ++e[i] > deg) e[i++] = 0;
    if (i == e.size()) break;
  }
  return out;
}

std::vector<FunctionTriple> random_triples(std::mt19937& rng, const std::vector<std::string>& vars, int n) {
  std::vector<FunctionTriple> out;
  for (int i = 0; i < n; ++i)
    out.push_back({gen::random_polynomial(rng, vars, 3), gen::random_polynomial(rng, vars, 3), gen::random_polynomial(rng, vars, 3)});
  return out;
}

Scalar over_two_pi(const Scalar& s) { return s * Scalar(Rational(1, 2), -1); }
DifferentialForm area(const Scalar& theta) { return DifferentialForm::volume(T2, theta); }

Outcome associativity() {
  Outcome o;
  std::mt19937 rng(101);
  for (int n : {1, 2}) {
    PureStarProduct S(PoissonStructure::standard(n));
    auto rep = check_associativity(S, random_triples(rng, S.vars(), 20), 5);
    o.require(rep.passed() && rep.verified_order == 5,
              "nonzero associator in dimension " + std::to_string(2 * n) + " at order " + std::to_string(rep.verified_order + 1));
  }
  if (o.ok) o.detail = "40 triples, discrepancy 0 through t^5";
  return o;
}

Outcome first_order_law() {
  Outcome o;
  std::size_t pairs = 0;
  for (int n : {1, 2}) {
    PureStarProduct S(PoissonStructure::standard(n));
    auto basis = monomials(S.vars(), 3);
    for (const auto& a : basis)
      for (const auto& b : basis) {
        FormalSeries p = S.multiply(S.lift(a, 1), S.lift(b, 1));
        o.require(p[0] == a * b, "B0 differs from the product for " + a.str() + ", " + b.str());
        o.require(antisymmetric_first_order(a, b, S) == poisson_bracket(a, b, S.poisson()),
                  "antisymmetric B1 differs from the bracket for " + a.str() + ", " + b.str());
        ++pairs;
      }
  }
  if (o.ok) o.detail = std::to_string(pairs) + " monomial pairs";
  return o;
}

Outcome gauge_twist_law() {
  Outcome o;
  PureStarProduct S(PoissonStructure::standard(1));
  GaugeOperator T = GaugeOperator::from_corrections(XY, {DiffOperator::laplacian(XY)});
  auto twisted = gauge_twist(S, T);
  std::mt19937 rng(103);
  auto rep = check_associativity(twisted, random_triples(rng, XY, 10), 4);
  o.require(rep.passed() && rep.verified_order == 4, "twisted product not associative through t^4");
  o.require(T.preserves_unit(), "gauge does not fix constants");
  FormalSeries unit = S.lift(ChartFunction::constant(XY, Scalar(1)), 4);
  auto basis = monomials(XY, 3);
  for (const auto& a : basis) {
    FormalSeries A = S.lift(a, 4);
    o.require(twisted.multiply(A, unit) == A && twisted.multiply(unit, A) == A, "unit lost for " + a.str());
    for (const auto& b : basis)
      o.require(antisymmetric_first_order(a, b, twisted) == poisson_bracket(a, b, S.poisson()),
                "antisymmetric B'1 differs from the bracket for " + a.str() + ", " + b.str());
  }
  if (o.ok) o.detail = "T = Id + t Laplacian, 10 triples, " + std::to_string(basis.size() * basis.size()) + " bracket pairs";
  return o;
}

Outcome trace_law() {
  Outcome o;
  PureStarProduct S(PoissonStructure::standard(1));
  std::mt19937 rng(104);
  for (int i = 0; i < 20; ++i) {
    ChartFunction a = gen::random_trig(rng, XY, 2, 4), b = gen::random_trig(rng, XY, 2, 4);
    FormalSeries c = star_commutator(S.lift(a, 5), S.lift(b, 5), S);
    o.require(star_trace(c, S).is_zero(), "trace of a commutator is nonzero for sample " + std::to_string(i));
  }
  if (o.ok) o.detail = "20 trigonometric pairs through t^5";
  return o;
}

Outcome circle_functions() {
  Outcome o;
  const std::vector<std::string> P1{"x#1", "x#2"};
  const std::vector<std::string> P2{"x#1", "y#1", "x#2", "y#2"};
  auto v = [](const std::vector<std::string>& vars, const std::string& n) { return ChartFunction::variable(vars, n); };
  auto diff1 = [&](const Rational& c) { return (v(P1, "x#1") - v(P1, "x#2")) * Scalar(c); };

  for (int m : {-2, 1, 5}) {
    LocalCircleFunction A(S1, diff1(m));
    o.require(check_circle_cocycle(A).passed(), "cocycle fails for period " + std::to_string(m));
    DifferentialForm alpha = one_form_from_circle(A);
    o.require(is_closed(alpha), "extracted form not closed");
    o.require(h1_class(A) == std::vector<Scalar>{Scalar(m)}, "period not recovered for m = " + std::to_string(m));
  }
  std::mt19937 rng(105);
  ChartFunction f = gen::random_trig(rng, T2.coords(), 2, 3, true);
  ChartFunction phase = (v(P2, "x#1") - v(P2, "x#2")) * Scalar(3) - (v(P2, "y#1") - v(P2, "y#2")) +
                        at_point(f, T2.coords(), 1) - at_point(f, T2.coords(), 2);
  LocalCircleFunction B(T2, phase);
  o.require(check_circle_cocycle(B).passed(), "cocycle fails on the torus example");
  o.require(is_closed(one_form_from_circle(B)), "torus form not closed");
  o.require(h1_class(B) == std::vector<Scalar>{Scalar(3), Scalar(-1)}, "torus periods not recovered");

  LocalCircleFunction third(S1, diff1(Rational(1, 3)));
  o.require(check_circle_cocycle(third).passed(), "cocycle fails for period 1/3");
  o.require(h1_class(third) == std::vector<Scalar>{Scalar(Rational(1, 3))}, "period 1/3 not recovered");
  if (o.ok) o.detail = "periods -2, 1, 5, (3, -1) and 1/3 recovered";
  return o;
}

Outcome cech_construction() {
  Outcome o;
  GoodCover cover = GoodCover::grid(2, 3);
  for (const Scalar& theta : {Scalar(), Scalar(Rational(2), 1), Scalar(Rational(3, 7))}) {
    const std::string t = "theta = " + theta.str() + ": ";
    CechConnectionData D = solve_cech(area(theta), cover);
    o.require(verify_cech(D).passed(), t + "Cech equations fail");
    LocalLineBundle L = build_local_line_bundle(D);
    o.require(check_triple_associativity(L).passed(), t + "triple products not associative");
    GluedConnection G = glue_multiplicative_connection(L, raised_cosine_partition(cover));
    o.require(G.passed(), t + "glued connection inconsistent");
    L.attach_connection(G.a);
    o.require(left_curvature(L) == area(theta), t + "curvature is not theta dx^dy");
    const bool integral = over_two_pi(theta).is_integer();
    o.require(chern_class(L).degree2_integral() == integral, t + "Chern class integrality is wrong");
    o.require(has_global_line_bundle(L) == integral, t + "line bundle existence is wrong");
    if (integral) o.require(check_gluing_cocycle(L).empty(), t + "gluing cocycle does not close");
  }
  if (o.ok) o.detail = "theta in {0, 2pi, 3/7} on a 3x3 grid";
  return o;
}

Outcome partition_change() {
  Outcome o;
  GoodCover cover = GoodCover::grid(2, 3);
  LocalLineBundle L = build_local_line_bundle(solve_cech(area(Scalar(Rational(3, 7))), cover));
  std::mt19937 rng(107);
  std::vector<DifferentialForm> gamma;
  for (std::size_t j = 0; j < cover.size(); ++j)
    gamma.push_back(DifferentialForm::one_form(T2, "x", gen::random_trig(rng, XY, 1, 2, true)) +
                    DifferentialForm::one_form(T2, "y", gen::random_trig(rng, XY, 1, 2, true)));
  GluedConnection G1 = glue_multiplicative_connection(L, raised_cosine_partition(cover), gamma);
  GluedConnection G2 = glue_multiplicative_connection(L, raised_cosine_partition(cover, Rational(1, 2)), gamma);
  o.require(G1.passed() && G2.passed(), "glued connections inconsistent");
  DifferentialForm beta = connection_difference(G1, G2, XY);
  o.require(!beta.is_zero(), "partitions gave identical connections");
  LocalLineBundle L1 = L, L2 = L;
  L1.attach_connection(G1.a);
  L2.attach_connection(G2.a);
  o.require(left_curvature(L1) - left_curvature(L2) == exterior_d(beta), "curvatures differ by more than d beta");
  o.require(chern_class(L1).representative() == chern_class(L2).representative(), "Chern classes differ");
  if (o.ok) o.detail = "difference factors as pi_L* beta - pi_R* beta";
  return o;
}

Outcome twisted_index_law() {
  Outcome o;
  auto one = [](const Scalar& c) { return DifferentialForm::constant(T2, c); };
  std::mt19937 rng(108);
  std::uniform_int_distribution<int> z(-6, 6);
  for (int n = 0; n < 30; ++n) {
    int d = z(rng), e = z(rng);
    Scalar theta(gen::random_rational(rng, 9));
    EllipticSymbolClass a(2, 2, one(Scalar(d)) + area(Scalar(e)));
    o.require(twisted_index(a, area(theta), T2).value == Scalar(e) + Scalar(d) * over_two_pi(theta), "closed form fails");
    o.require(twisted_index(a, DifferentialForm(T2), T2).value == Scalar(e), "untwisted index is not the integer e");
  }
  EllipticSymbolClass a(1, 1, one(Scalar(2)) + area(Scalar(5)));
  for (int m : {0, 1, 3}) o.require(check_tensor_consistency(a, m).passed(), "tensor consistency fails at m = " + std::to_string(m));
  const DifferentialForm w = area(Scalar(Rational(3, 7)));
  DifferentialForm beta = DifferentialForm::one_form(T2, "y", ChartFunction::sin2pi(XY, {1, 0}));
  o.require(check_homotopy_invariance(a, w, T2, {Perturbation::Target::Omega, beta, exterior_d(beta)}).passed(),
            "index moved under an exact change of the twist");
  o.require(check_homotopy_invariance(a, w, T2, {Perturbation::Target::Gamma, beta, {}}).passed(),
            "index moved under an exact change of the symbol class");
  EllipticSymbolClass a1(2, 2, one(Scalar(1)) + area(Scalar(2))), a2(2, 2, one(Scalar(-3)) + area(Scalar(1)));
  o.require(check_log_multiplicativity(a1, a2, w, T2).passed(), "log-multiplicativity fails");
  if (o.ok) o.detail = "30 random classes, m in {0, 1, 3}, exact perturbations";
  return o;
}

Outcome hardy() {
  Outcome o;
  const CircleSymbol shift = CircleSymbol::from_modes({{1, Scalar(1)}});
  const CircleSymbol two_plus = CircleSymbol::from_modes({{0, Scalar(2)}, {1, Scalar(1)}});
  const CircleSymbol inverse = CircleSymbol::from_modes({{-1, Scalar(1)}});
  const double a = hardy_index(shift, 512, 256).value, b = hardy_index(two_plus, 512, 256).value;
  o.require(std::abs(a + 1) < 1e-6, "index of e^{i theta} is " + std::to_string(a));
  o.require(std::abs(b) < 1e-6, "index of 2 + e^{i theta} is " + std::to_string(b));
  double worst = 0;
  for (const auto& [f, g] : {std::pair{shift, shift}, std::pair{shift, inverse}, std::pair{two_plus, shift}})
    worst = std::max(worst, hardy_index_additivity(f, g, 512, 256).defect());
  o.require(worst < 1e-6, "additivity defect " + std::to_string(worst));
  if (o.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "N = 512, M = 256: %.3g and %.3g, additivity defect %.2g", a, b, worst);
    o.detail = buf;
  }
  return o;
}

Outcome berezin_decay() {
  Outcome o;
  using B = BerezinFunction;
  B height = B::monomial(1, 1, 1);
  B re(1), im(1);
  re.add(1, 0, Scalar(Rational(1, 2)));
  re.add(0, 1, Scalar(Rational(1, 2)));
  im.add(1, 0, ComplexScalar(Scalar(), Scalar(Rational(-1, 2))));
  im.add(0, 1, ComplexScalar(Scalar(), Scalar(Rational(1, 2))));
  std::vector<int> ks;
  for (int k = 8; k <= 64; ++k) ks.push_back(k);
  std::string slopes;
  std::vector<int> signs;
  for (const auto& [f, g] : {std::pair{height, re}, std::pair{re, im}}) {
    DecayReport r = commutator_decay(f, g, ks);
    o.require(r.slope.has_value(), "no slope for a nonvanishing bracket");
    if (!r.slope) continue;
    o.require(*r.slope <= -0.8, "slope " + std::to_string(*r.slope) + " above -0.8");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.4f", slopes.empty() ? "" : ", ", *r.slope);
    slopes += buf;
    signs.push_back(r.sign);
  }
  o.require(signs.size() == 2 && signs[0] == signs[1] && signs[0] != 0, "sign not consistent across pairs");
  if (o.ok) o.detail = "k = 8..64, sign " + std::to_string(signs[0]) + ", slopes " + slopes;
  return o;
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "star product associativity", "exact", 10.0, associativity},
      {2, "first-order law", "exact", std::nullopt, first_order_law},
      {3, "gauge-twisted product", "exact", std::nullopt, gauge_twist_law},
      {4, "trace of commutators", "exact", std::nullopt, trace_law},
      {5, "circle functions and periods", "exact", std::nullopt, circle_functions},
      {6, "Cech line bundle construction", "exact", 30.0, cech_construction},
      {7, "partition independence", "exact", std::nullopt, partition_change},
      {8, "twisted index on T2", "exact", std::nullopt, twisted_index_law},
      {9, "Hardy space index", "1e-6", 60.0, hardy},
      {10, "Berezin commutator decay", "slope <= -0.8", 120.0, berezin_decay},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit && elapsed > *c.limit) {
      out.ok = false;
      out.detail = "runtime limit exceeded; " + out.detail;
    }
    if (!out.ok) ++failures;
    std::printf("%s [%d] %s | tolerance %s | runtime %s (limit %s) | %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                c.tolerance.c_str(), seconds(elapsed).c_str(), c.limit ? seconds(*c.limit).c_str() : "none", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
