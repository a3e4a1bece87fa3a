#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "starlb/exactalg/chart_function.hpp"
#include "starlb/exactalg/manifold.hpp"

namespace starlb {

// Sorts a covector multi-index in place. Returns the permutation sign, or 0
// when an index repeats.
inline int normalize_index(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  return sign;
}

// Sum of f_I dx_I with strictly increasing multi-indices I. Coefficients are
// kept aligned to the manifold's coordinate names.
class DifferentialForm {
 public:
  using Index = std::vector<int>;

  explicit DifferentialForm(Manifold m) : manifold_(std::move(m)) {}

  static DifferentialForm function(const Manifold& m, const ChartFunction& f) {
    DifferentialForm w(m);
    w.add(Index{}, f);
    return w;
  }
  static DifferentialForm constant(const Manifold& m, const ComplexScalar& c) {
    return function(m, ChartFunction::constant(m.coords(), c));
  }
  // c dx_{names[0]} ∧ dx_{names[1]} ∧ ...
  static DifferentialForm basis(const Manifold& m, const std::vector<std::string>& names, const ComplexScalar& c = Scalar(1)) {
    Index idx;
    for (const auto& n : names) idx.push_back(static_cast<int>(m.coord_index(n)));
    DifferentialForm w(m);
    w.add(idx, ChartFunction::constant(m.coords(), c));
    return w;
  }
  static DifferentialForm one_form(const Manifold& m, const std::string& coord, const ChartFunction& f) {
    DifferentialForm w(m);
    w.add(Index{static_cast<int>(m.coord_index(coord))}, f);
    return w;
  }
  static DifferentialForm volume(const Manifold& m, const ComplexScalar& c = Scalar(1)) {
    return basis(m, m.coords(), c);
  }

  const Manifold& manifold() const { return manifold_; }
  const std::map<Index, ChartFunction>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Adds f dx_idx; idx may be unsorted (the sign is applied).
  void add(Index idx, const ChartFunction& f) {
    for (int i : idx)
      if (i < 0 || i >= manifold_.dim()) throw MathError("covector index out of range");
    int sign = normalize_index(idx);
    if (sign == 0 || f.is_zero()) return;
    ChartFunction g = f.aligned(manifold_.coords());
    if (manifold_.kind() == Manifold::Kind::Sphere2) {
      if (!g.is_constant()) throw MathError("forms on S2 are restricted to constant multiples of 1 and the area form");
      if (idx.size() == 1) throw MathError("forms on S2 are restricted to degrees 0 and 2");
    }
    if (sign < 0) g = -g;
    auto [it, inserted] = terms_.try_emplace(idx, g);
    if (!inserted) {
      it->second += g;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  std::set<int> degrees() const {
    std::set<int> out;
    for (const auto& [i, f] : terms_) out.insert(static_cast<int>(i.size()));
    return out;
  }
  // Homogeneous degree; zero forms report `fallback`.
  int degree(int fallback = 0) const {
    auto d = degrees();
    if (d.empty()) return fallback;
    if (d.size() != 1) throw MathError("form is not homogeneous");
    return *d.begin();
  }
  DifferentialForm part(int k) const {
    DifferentialForm w(manifold_);
    for (const auto& [i, f] : terms_)
      if (static_cast<int>(i.size()) == k) w.terms_.emplace(i, f);
    return w;
  }
  ChartFunction coefficient(const Index& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? ChartFunction(manifold_.coords()) : it->second;
  }
  ChartFunction coefficient(const std::vector<std::string>& names) const {
    Index idx;
    for (const auto& n : names) idx.push_back(static_cast<int>(manifold_.coord_index(n)));
    int sign = normalize_index(idx);
    if (sign == 0) return ChartFunction(manifold_.coords());
    ChartFunction f = coefficient(idx);
    return sign < 0 ? -f : f;
  }

  DifferentialForm& operator+=(const DifferentialForm& o) {
    require_same(o);
    for (const auto& [i, f] : o.terms_) add(i, f);
    return *this;
  }
  DifferentialForm& operator-=(const DifferentialForm& o) {
    require_same(o);
    for (const auto& [i, f] : o.terms_) add(i, -f);
    return *this;
  }
  friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
  friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
  friend DifferentialForm operator-(const DifferentialForm& a) {
    DifferentialForm w(a.manifold_);
    for (const auto& [i, f] : a.terms_) w.terms_.emplace(i, -f);
    return w;
  }
  friend DifferentialForm operator*(const DifferentialForm& a, const ChartFunction& g) {
    DifferentialForm w(a.manifold_);
    for (const auto& [i, f] : a.terms_) w.add(i, f * g);
    return w;
  }
  friend DifferentialForm operator*(const ChartFunction& g, const DifferentialForm& a) { return a * g; }
  friend DifferentialForm operator*(const DifferentialForm& a, const ComplexScalar& s) {
    DifferentialForm w(a.manifold_);
    for (const auto& [i, f] : a.terms_) w.add(i, f * s);
    return w;
  }
  friend DifferentialForm operator*(const ComplexScalar& s, const DifferentialForm& a) { return a * s; }
  friend DifferentialForm operator*(const DifferentialForm& a, const Scalar& s) { return a * ComplexScalar(s); }
  friend DifferentialForm operator*(const Scalar& s, const DifferentialForm& a) { return a * ComplexScalar(s); }
  friend bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
    return a.manifold_ == b.manifold_ && a.terms_ == b.terms_;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [idx, f] : terms_) {
      if (!first) out += " + ";
      first = false;
      std::string c = f.str();
      if (idx.empty()) {
        out += c;
        continue;
      }
      if (f.terms().size() > 1 || c.find(' ') != std::string::npos) c = "(" + c + ")";
      out += c + " ";
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k) out += "^";
        out += "d" + manifold_.coords()[static_cast<std::size_t>(idx[k])];
      }
    }
    return out;
  }

  void require_same(const DifferentialForm& o) const {
    if (!(manifold_ == o.manifold_))
      throw MathError("manifold mismatch: " + manifold_.name_str() + " vs " + o.manifold_.name_str());
  }

 private:
  Manifold manifold_;
  std::map<Index, ChartFunction> terms_;
};

// a ∧ b; terms above the manifold dimension vanish automatically.
inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  a.require_same(b);
  DifferentialForm w(a.manifold());
  for (const auto& [ia, fa] : a.terms())
    for (const auto& [ib, fb] : b.terms()) {
      DifferentialForm::Index idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      w.add(idx, fa * fb);
    }
  return w;
}

inline DifferentialForm exterior_d(const DifferentialForm& w) {
  const Manifold& m = w.manifold();
  DifferentialForm out(m);
  if (m.kind() == Manifold::Kind::Sphere2) return out;
  for (const auto& [idx, f] : w.terms())
    for (int j = 0; j < m.dim(); ++j) {
      ChartFunction df = f.derive(m.coords()[static_cast<std::size_t>(j)]);
      if (df.is_zero()) continue;
      DifferentialForm::Index n{j};
      n.insert(n.end(), idx.begin(), idx.end());
      out.add(n, df);
    }
  return out;
}

inline bool is_closed(const DifferentialForm& w) { return exterior_d(w).is_zero(); }

// ∫_M w for top-degree w on a compact manifold, as a complex scalar.
// Tori have unit volume; on S2 the area form is normalized to total mass 1.
inline ComplexScalar integrate_complex(const DifferentialForm& w) {
  const Manifold& m = w.manifold();
  if (!m.is_compact()) throw MathError("integration requires a compact manifold, got " + m.name_str());
  for (int d : w.degrees())
    if (d != m.dim()) throw MathError("integration requires a top-degree form");
  if (w.is_zero()) return {};
  const ChartFunction& f = w.terms().begin()->second;
  if (m.kind() == Manifold::Kind::Sphere2) return f.constant_term();
  return f.torus_mean();
}

inline Scalar integrate(const DifferentialForm& w) {
  ComplexScalar c = integrate_complex(w);
  if (!c.is_real()) throw MathError("integral is not real: " + c.str());
  return c.re;
}

// Pullback along a coordinate substitution. `coeff_map` renames coefficient
// variables into target coordinates (several sources may share one target);
// `diff_map` sends each source differential to a target differential, and a
// source coordinate missing from it has its differential sent to zero.
inline DifferentialForm substitute(const DifferentialForm& w, const Manifold& target,
                                   const std::map<std::string, std::string>& coeff_map,
                                   const std::map<std::string, std::string>& diff_map) {
  const Manifold& m = w.manifold();
  DifferentialForm out(target);
  for (const auto& [idx, f] : w.terms()) {
    DifferentialForm::Index n;
    bool dead = false;
    for (int i : idx) {
      auto it = diff_map.find(m.coords()[static_cast<std::size_t>(i)]);
      if (it == diff_map.end()) {
        dead = true;
        break;
      }
      n.push_back(static_cast<int>(target.coord_index(it->second)));
    }
    if (dead) continue;
    out.add(n, f.renamed(coeff_map));
  }
  return out;
}

// Moves a form onto another manifold with the same coordinate names.
inline DifferentialForm rebased(const DifferentialForm& w, const Manifold& target) {
  std::map<std::string, std::string> id;
  for (const auto& c : w.manifold().coords()) id[c] = c;
  return substitute(w, target, id, id);
}

inline std::ostream& operator<<(std::ostream& os, const DifferentialForm& w) { return os << w.str(); }

}  // namespace starlb
