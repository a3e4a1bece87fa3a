#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "starlb/locbundle/cech.hpp"
#include "starlb/locbundle/circle.hpp"

namespace starlb {

// Local line bundle over ⋃ U_i × U_i: on each chart the trivial line
// L_i ⊠ L_i⁻¹, glued by e^{iφ_ij(x)} e^{-iφ_ij(y)}, with H given by
// multiplication in any trivialization.
class LocalLineBundle {
 public:
  // Same as build_local_line_bundle but skips validation; lets tests inject
  // broken data.
  static LocalLineBundle unchecked(CechConnectionData data) { return LocalLineBundle(std::move(data)); }

  const CechConnectionData& data() const { return data_; }
  const GoodCover& cover() const { return data_.cover; }
  const std::vector<std::string>& coords() const { return data_.coords(); }

  // Phase of the gluing from chart d to chart c at (p_a, p_b), with every
  // point written in chart-r coordinates: φ_cd(p_a) - φ_cd(p_b).
  ChartFunction gluing_phase(std::size_t c, std::size_t d, int a, int b, std::size_t r, int points) const {
    const auto vars = lifted_vars(coords(), points);
    if (c == d) return ChartFunction(vars);
    ChartFunction f = translate(data_.transition(c, d), coords(), data_.cover.lift(r, c));
    return (at_point(f, coords(), a) - at_point(f, coords(), b)).aligned(vars);
  }

  const std::optional<std::vector<DifferentialForm>>& connection() const { return connection_; }
  void attach_connection(std::vector<DifferentialForm> a) { connection_ = std::move(a); }

 private:
  explicit LocalLineBundle(CechConnectionData d) : data_(std::move(d)) {}
  friend LocalLineBundle build_local_line_bundle(CechConnectionData data);

  CechConnectionData data_;
  std::optional<std::vector<DifferentialForm>> connection_;
};

inline LocalLineBundle build_local_line_bundle(CechConnectionData data) {
  CechReport r = verify_cech(data);
  if (!r.passed()) throw MathError("Cech data invalid: " + r.violations.front());
  return LocalLineBundle(std::move(data));
}

// A difference of phases is harmless iff it is a real constant in 2πℤ.
inline bool trivial_phase(const ChartFunction& f) {
  if (f.is_zero()) return true;
  return f.is_constant() && f.constant_term().is_real() && f.constant_term().re.in_two_pi_z();
}

struct AssociativityCheck {
  std::size_t cells = 0;
  std::size_t compared = 0;
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};

namespace detail {

// Maximal chart sets to test: triples, plus pairs and single charts that lie
// in no triple.
inline std::vector<std::vector<std::size_t>> nerve_cells(const GoodCover& cover) {
  std::vector<std::vector<std::size_t>> cells;
  std::set<std::pair<std::size_t, std::size_t>> in_triple;
  std::set<std::size_t> used;
  for (const auto& t : cover.triples()) {
    cells.push_back({t.i, t.j, t.k});
    in_triple.insert({t.i, t.j});
    in_triple.insert({t.i, t.k});
    in_triple.insert({t.j, t.k});
  }
  for (const auto& o : cover.overlaps()) {
    used.insert(o.i);
    used.insert(o.j);
    if (!in_triple.count({o.i, o.j})) cells.push_back({o.i, o.j});
  }
  for (std::size_t c = 0; c < cover.size(); ++c)
    if (!used.count(c)) cells.push_back({c});
  return cells;
}

}  // namespace detail

// For points x, y, z, t of a common overlap and every choice of input
// trivializations and of the charts in which each H is applied, the two
// composition orders L_xy ⊗ L_yz ⊗ L_zt -> L_xt agree.
inline AssociativityCheck check_triple_associativity(const LocalLineBundle& L) {
  const auto cells = detail::nerve_cells(L.cover());
  auto one = [&](std::size_t n) -> std::vector<std::string> {
    const auto& C = cells[n];
    const std::size_t r = C.front();
    const std::size_t m = C.size();
    // T[c][d][pair]: transport from chart C[d] to C[c]
    const std::vector<std::pair<int, int>> pairs{{1, 2}, {2, 3}, {3, 4}, {1, 3}, {2, 4}, {1, 4}};
    std::vector<std::vector<std::vector<ChartFunction>>> T(m, std::vector<std::vector<ChartFunction>>(m));
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t d = 0; d < m; ++d)
        for (auto [a, b] : pairs) T[c][d].push_back(L.gluing_phase(C[c], C[d], a, b, r, 4));
    enum { P12, P23, P34, P13, P24, P14 };
    std::vector<std::string> bad;
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < m; ++v)
        for (std::size_t w = 0; w < m; ++w) {
          std::optional<ChartFunction> ref;
          for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
              // (uv) in chart a, then (.. w) in chart b, read in chart r
              ChartFunction left = T[a][u][P12] + T[a][v][P23] + T[b][a][P13] + T[b][w][P34] + T[0][b][P14];
              // (vw) in chart a, then (u ..) in chart b
              ChartFunction right = T[a][v][P23] + T[a][w][P34] + T[b][u][P12] + T[b][a][P24] + T[0][b][P14];
              for (const ChartFunction* p : {&left, &right}) {
                if (!ref) {
                  ref = *p;
                  continue;
                }
                ChartFunction diff = *p - *ref;
                if (!trivial_phase(diff) && bad.size() < 4) {
                  std::string cell;
                  for (auto c : C) cell += (cell.empty() ? "" : ",") + std::to_string(c);
                  bad.push_back("charts {" + cell + "}: composition orders differ by phase " + diff.str());
                }
              }
            }
        }
    return bad;
  };
  auto results = parallel_map<std::vector<std::string>>(cells.size(), one);
  AssociativityCheck out;
  out.cells = cells.size();
  for (const auto& C : cells) out.compared += C.size() * C.size() * C.size() * 2 * C.size() * C.size();
  for (auto& r : results)
    for (auto& s : r) out.violations.push_back(std::move(s));
  return out;
}

// Gluings compose on squared triple overlaps: g_ij g_jk g_ki = 1.
inline std::vector<std::string> check_gluing_cocycle(const LocalLineBundle& L) {
  std::vector<std::string> bad;
  for (const auto& t : L.cover().triples()) {
    ChartFunction s = L.gluing_phase(t.i, t.j, 1, 2, t.i, 2) + L.gluing_phase(t.j, t.k, 1, 2, t.i, 2) +
                      L.gluing_phase(t.k, t.i, 1, 2, t.i, 2);
    if (!trivial_phase(s))
      bad.push_back("gluing cocycle fails on charts " + std::to_string(t.i) + "," + std::to_string(t.j) + "," + std::to_string(t.k));
  }
  return bad;
}

// One-sided cocycle e^{iφ_ij} closes: an honest line bundle with connection
// d + iα_i exists.
inline bool has_global_line_bundle(const LocalLineBundle& L) { return integral_triples(L.data()); }

// Section over the diagonal, by its constant value in each chart trivialization.
struct DiagonalSection {
  std::vector<ComplexScalar> value;
};

struct UnitReport {
  bool idempotent = true;   // H(e ⊗ e) = e
  bool identity = true;     // H(e ⊗ u) = u
  bool consistent = true;   // the chart values glue
  bool passed() const { return idempotent && identity && consistent; }
};

inline UnitReport check_diagonal_unit(const LocalLineBundle& L, const DiagonalSection& e) {
  UnitReport r;
  if (e.value.size() != L.cover().size()) throw MathError("section needs one value per chart");
  for (const auto& c : e.value) {
    r.idempotent = r.idempotent && c * c == c && !c.is_zero();
    r.identity = r.identity && c == ComplexScalar(Scalar(1));
  }
  for (const auto& o : L.cover().overlaps()) {
    // gluing phase restricted to the diagonal must vanish and the values agree
    ChartFunction ph = L.gluing_phase(o.i, o.j, 1, 2, o.i, 2).renamed(point_map(L.coords(), {1, 1}));
    r.consistent = r.consistent && ph.is_zero() && e.value[o.i] == e.value[o.j];
  }
  return r;
}

inline DiagonalSection diagonal_unit(const LocalLineBundle& L) {
  DiagonalSection e{std::vector<ComplexScalar>(L.cover().size(), ComplexScalar(Scalar(1)))};
  if (!check_diagonal_unit(L, e).passed()) throw MathError("diagonal unit check failed");
  return e;
}

}  // namespace starlb
