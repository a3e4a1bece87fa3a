#pragma once

#include <set>
#include <vector>

#include "starlb/exactalg/form.hpp"

namespace starlb {

// de Rham class with a closed, even (or otherwise degree-consistent)
// representative. On tori the harmonic representative keeps the constant
// Fourier mode of every coefficient; on S2 forms are already constant.
class CohomologyClass {
 public:
  explicit CohomologyClass(DifferentialForm rep) : rep_(std::move(rep)) {
    if (!is_closed(rep_)) throw MathError("cohomology representative is not closed");
  }
  static CohomologyClass one(const Manifold& m) { return CohomologyClass(DifferentialForm::constant(m, Scalar(1))); }

  const Manifold& manifold() const { return rep_.manifold(); }
  const DifferentialForm& representative() const { return rep_; }
  DifferentialForm part(int k) const { return rep_.part(k); }
  bool is_even() const {
    for (int d : rep_.degrees())
      if (d % 2 != 0) return false;
    return true;
  }

  DifferentialForm harmonic() const {
    const Manifold& m = manifold();
    if (m.kind() == Manifold::Kind::Euclidean) return rep_.part(0);
    DifferentialForm h(m);
    for (const auto& [idx, f] : rep_.terms()) {
      if (!f.is_trigonometric()) throw MathError("representative is not periodic on " + m.name_str());
      h.add(idx, ChartFunction::constant(m.coords(), f.constant_term()));
    }
    return h;
  }

  bool same_class(const CohomologyClass& o) const {
    rep_.require_same(o.rep_);
    return harmonic() == o.harmonic();
  }

  // Degree-2 periods over the coordinate 2-tori, in index order (i < j).
  std::vector<Scalar> periods2() const {
    if (manifold().kind() != Manifold::Kind::Torus) throw MathError("2-periods are only tabulated on tori");
    std::vector<Scalar> out;
    DifferentialForm h = harmonic();
    const int n = manifold().dim();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        ComplexScalar c = h.coefficient(DifferentialForm::Index{i, j}).constant_term();
        if (!c.is_real()) throw MathError("class is not real");
        out.push_back(c.re);
      }
    return out;
  }

  // Integral degree-2 part: every 2-period is an integer.
  bool degree2_integral() const {
    if (manifold().kind() == Manifold::Kind::Sphere2) {
      ComplexScalar c = integrate_complex(rep_.part(2));
      return c.is_real() && c.re.is_integer();
    }
    for (const auto& p : periods2())
      if (!p.is_integer()) return false;
    return true;
  }

 private:
  DifferentialForm rep_;
};

}  // namespace starlb
