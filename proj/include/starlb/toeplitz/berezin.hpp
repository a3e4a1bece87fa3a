#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "starlb/exactalg/scalar.hpp"
#include "starlb/parallel.hpp"

namespace starlb {

// f = Σ p_AB z^A z̄^B / (1+u)^C on CP¹ in the affine chart, u = z z̄.
// Coefficients are exact complex rationals.
class BerezinFunction {
 public:
  using Key = std::pair<int, int>;

  BerezinFunction() = default;
  explicit BerezinFunction(int C) : C_(C) {
    if (C < 0) throw MathError("denominator exponent must be nonnegative");
  }

  // c z^a z̄^b / (1+u)^c
  static BerezinFunction monomial(int a, int b, int c, const ComplexScalar& coeff = Scalar(1)) {
    if (a < 0 || b < 0) throw MathError("exponents must be nonnegative");
    BerezinFunction f(c);
    f.add(a, b, coeff);
    return f;
  }
  static BerezinFunction one() { return monomial(0, 0, 0); }

  int denominator() const { return C_; }
  const std::map<Key, ComplexScalar>& numerator() const { return num_; }
  bool is_zero() const { return num_.empty(); }

  void add(int a, int b, const ComplexScalar& c) {
    if (c.is_zero()) return;
    if (!c.re.is_rational() || !c.im.is_rational()) throw MathError("coefficients must be rational");
    auto [it, inserted] = num_.try_emplace(Key{a, b}, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) num_.erase(it);
    }
  }

  bool is_real() const { return *this == conj(); }
  BerezinFunction conj() const {
    BerezinFunction f(C_);
    for (const auto& [k, c] : num_) f.add(k.second, k.first, c.conj());
    return f;
  }

  // Same function over (1+u)^{C+d}.
  BerezinFunction raised(int d) const {
    BerezinFunction f = *this;
    for (int i = 0; i < d; ++i) f = f.times_one_plus_u();
    f.C_ = C_ + d;
    return f;
  }

  // Cancels common factors of (1+u) and returns the canonical form.
  BerezinFunction reduced() const {
    BerezinFunction f = *this;
    while (f.C_ > 0 && !f.num_.empty()) {
      auto q = f.divide_one_plus_u();
      if (!q) break;
      f = *q;
    }
    if (f.num_.empty()) f.C_ = 0;
    return f;
  }

  // a, b ≤ c for every term, so f extends to a bounded function on CP¹ and
  // all matrix integrals for k ≥ c converge.
  bool admissible() const {
    BerezinFunction r = reduced();
    for (const auto& [k, c] : r.num_)
      if (k.first > r.C_ || k.second > r.C_) return false;
    return true;
  }

  friend BerezinFunction operator+(const BerezinFunction& a, const BerezinFunction& b) {
    int C = std::max(a.C_, b.C_);
    BerezinFunction x = a.raised(C - a.C_), y = b.raised(C - b.C_);
    for (const auto& [k, c] : y.num_) x.add(k.first, k.second, c);
    return x.reduced();
  }
  friend BerezinFunction operator-(const BerezinFunction& a) { return a * ComplexScalar(-1); }
  friend BerezinFunction operator-(const BerezinFunction& a, const BerezinFunction& b) { return a + (-b); }
  friend BerezinFunction operator*(const BerezinFunction& a, const ComplexScalar& s) {
    BerezinFunction f(a.C_);
    for (const auto& [k, c] : a.num_) f.add(k.first, k.second, c * s);
    return f;
  }
  friend BerezinFunction operator*(const BerezinFunction& a, const BerezinFunction& b) {
    BerezinFunction f(a.C_ + b.C_);
    for (const auto& [ka, ca] : a.num_)
      for (const auto& [kb, cb] : b.num_) f.add(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return f.reduced();
  }
  friend bool operator==(const BerezinFunction& a, const BerezinFunction& b) {
    BerezinFunction x = a.reduced(), y = b.reduced();
    return x.C_ == y.C_ && x.num_ == y.num_;
  }

  // ∂_z (N (1+u)^{-C}) = (N_z (1+u) - C z̄ N) / (1+u)^{C+1}
  BerezinFunction d_z() const {
    BerezinFunction f(C_ + 1);
    for (const auto& [k, c] : num_) {
      auto [a, b] = k;
      if (a > 0) {
        f.add(a - 1, b, c * Scalar(a));
        f.add(a, b + 1, c * Scalar(a));
      }
      f.add(a, b + 1, c * Scalar(-C_));
    }
    return f.reduced();
  }
  BerezinFunction d_zbar() const { return conj().d_z().conj(); }

  std::complex<double> value(std::complex<double> z) const {
    std::complex<double> s = 0;
    for (const auto& [k, c] : num_)
      s += std::complex<double>(c.re.to_double(), c.im.to_double()) * std::pow(z, k.first) * std::pow(std::conj(z), k.second);
    return s / std::pow(1.0 + std::norm(z), C_);
  }

  std::string str() const {
    if (num_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : num_) {
      if (!out.empty()) out += " + ";
      out += "(" + c.str() + ")";
      if (k.first) out += "*z" + (k.first > 1 ? "^" + std::to_string(k.first) : std::string());
      if (k.second) out += "*zb" + (k.second > 1 ? "^" + std::to_string(k.second) : std::string());
    }
    if (C_ == 0) return out;
    return "(" + out + ")/(1+u)" + (C_ > 1 ? "^" + std::to_string(C_) : std::string());
  }

 private:
  BerezinFunction times_one_plus_u() const {
    BerezinFunction f(C_);
    for (const auto& [k, c] : num_) {
      f.add(k.first, k.second, c);
      f.add(k.first + 1, k.second + 1, c);
    }
    return f;
  }

  // N = Σ_d z^{d+} z̄^{d-} P_d(u); divisible by 1+u iff every P_d(-1) = 0.
  std::optional<BerezinFunction> divide_one_plus_u() const {
    std::map<int, std::map<int, ComplexScalar>> groups;  // d -> {power of u -> coeff}
    for (const auto& [k, c] : num_) {
      int d = k.first - k.second;
      groups[d][std::min(k.first, k.second)] = c;
    }
    BerezinFunction q(C_ - 1);
    for (const auto& [d, poly] : groups) {
      int top = poly.rbegin()->first;
      // synthetic division by (u + 1) from the top down
      std::vector<ComplexScalar> p(static_cast<std::size_t>(top) + 1);
      for (const auto& [e, c] : poly) p[static_cast<std::size_t>(e)] = c;
      ComplexScalar carry;
      std::vector<ComplexScalar> out(static_cast<std::size_t>(top) + 1);
      for (int e = top; e >= 0; --e) {
        ComplexScalar v = p[static_cast<std::size_t>(e)] - carry;
        if (e == 0) {
          if (!v.is_zero()) return std::nullopt;
          break;
        }
        out[static_cast<std::size_t>(e - 1)] = v;
        carry = v;
      }
      int za = std::max(d, 0), zb = std::max(-d, 0);
      for (int e = 0; e < top; ++e) q.add(za + e, zb + e, out[static_cast<std::size_t>(e)]);
    }
    return q;
  }

  int C_ = 0;
  std::map<Key, ComplexScalar> num_;
};

// {f, g} = i (1+u)² (∂_z̄ f ∂_z g - ∂_z f ∂_z̄ g) for the Fubini-Study form.
inline BerezinFunction cp1_bracket(const BerezinFunction& f, const BerezinFunction& g) {
  BerezinFunction w = f.d_zbar() * g.d_z() - f.d_z() * g.d_zbar();
  BerezinFunction sq = BerezinFunction::monomial(0, 0, 0);
  sq.add(1, 1, Scalar(2));
  sq.add(2, 2, Scalar(1));
  return (w * sq * ComplexScalar::i()).reduced();
}

inline Integer factorial(int n) {
  Integer r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// B(p, q) = (p-1)!(q-1)!/(p+q-1)! for positive integers.
inline Rational beta_integer(int p, int q) {
  if (p < 1 || q < 1) throw MathError("Beta function needs positive integer arguments");
  return Rational(factorial(p - 1) * factorial(q - 1), factorial(p + q - 1));
}

// Level-k compression of f in the monomial basis z^0..z^k of H⁰(O(k)) with
// ⟨s, t⟩ = ∫ s̄ t (1+u)^{-k-2} dA/π. S is the exact matrix ⟨z^j, f z^l⟩, G the
// exact Gram diagonal; `matrix` is the orthonormal-basis version S/√(G_j G_l).
struct BerezinMatrix {
  int k = 0;
  std::vector<Rational> gram;
  std::map<std::pair<int, int>, ComplexScalar> exact;  // (row j, column l) -> S_jl, nonzero only
  Eigen::MatrixXcd matrix;

  ComplexScalar S(int j, int l) const {
    auto it = exact.find({j, l});
    return it == exact.end() ? ComplexScalar() : it->second;
  }
  bool is_diagonal() const {
    for (const auto& [jl, c] : exact)
      if (jl.first != jl.second) return false;
    return true;
  }
  bool is_hermitian() const {
    for (const auto& [jl, c] : exact) {
      // S is Hermitian iff the orthonormal matrix is, since G is real positive
      if (!(S(jl.second, jl.first) == c.conj())) return false;
    }
    return true;
  }
  // Offsets j - l that carry nonzero entries.
  std::vector<int> bands() const {
    std::vector<int> out;
    for (const auto& [jl, c] : exact) {
      int d = jl.first - jl.second;
      if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline double rational_to_double(const Rational& q) { return q.convert_to<double>(); }

inline BerezinMatrix berezin_matrix(const BerezinFunction& f0, int k) {
  if (!f0.admissible()) throw MathError("function is outside the admissible family z^a zb^b/(1+u)^c with a, b <= c");
  BerezinFunction f = f0.reduced();
  const int C = f.denominator();
  if (k < C) throw MathError("level k = " + std::to_string(k) + " is below the denominator exponent " + std::to_string(C));
  BerezinMatrix M;
  M.k = k;
  for (int j = 0; j <= k; ++j) M.gram.push_back(beta_integer(j + 1, k - j + 1));
  for (const auto& [key, c] : f.numerator()) {
    auto [A, B] = key;
    for (int l = 0; l <= k; ++l) {
      int j = l + A - B;
      if (j < 0 || j > k) continue;
      ComplexScalar v = c * Scalar(beta_integer(l + A + 1, C + k + 1 - l - A));
      auto [it, inserted] = M.exact.try_emplace({j, l}, v);
      if (!inserted) it->second += v;
    }
  }
  for (auto it = M.exact.begin(); it != M.exact.end();) it = it->second.is_zero() ? M.exact.erase(it) : std::next(it);
  M.matrix = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  for (const auto& [jl, c] : M.exact) {
    auto [j, l] = jl;
    const Rational& gj = M.gram[static_cast<std::size_t>(j)];
    const Rational& gl = M.gram[static_cast<std::size_t>(l)];
    // S/√(G_j G_l) = (S/G_j) √(G_j/G_l), each factor converted once
    double scale = std::sqrt(rational_to_double(gj / gl));
    M.matrix(j, l) = std::complex<double>(rational_to_double(c.re.rational_value() / gj), rational_to_double(c.im.rational_value() / gj)) * scale;
  }
  return M;
}

inline double operator_norm(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

struct DecayReport {
  std::vector<int> ks;
  std::vector<double> norms;      // D_k for the selected sign
  int sign = 0;                   // 0 when both signs give D ≡ 0
  std::optional<double> slope;    // absent when D ≡ 0
  BerezinFunction bracket;
  bool identically_zero = false;
};

// Least-squares slope of log y against log x.
inline std::optional<double> loglog_slope(const std::vector<int>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0)) continue;
    double x = std::log(static_cast<double>(xs[i])), y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  double den = n * sxx - sx * sx;
  if (den == 0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

// D_k = ‖k [T_f, T_g] - s i T_{f,g}‖ over the given levels. The sign s is
// chosen to minimize D at the largest level and then held fixed.
inline DecayReport commutator_decay(const BerezinFunction& f, const BerezinFunction& g, const std::vector<int>& ks) {
  if (ks.empty()) throw MathError("empty level range");
  for (const auto* h : {&f, &g}) {
    if (!h->is_real()) throw MathError("commutator decay needs real functions");
    if (!h->admissible()) throw MathError("function is outside the admissible family");
  }
  DecayReport rep;
  rep.ks = ks;
  rep.bracket = cp1_bracket(f, g);
  if (!rep.bracket.admissible()) throw MathError("Poisson bracket " + rep.bracket.str() + " leaves the admissible family");
  constexpr double kZero = 1e-12;
  struct Level {
    double plus, minus;
  };
  std::function<Level(std::size_t)> run = [&](std::size_t i) {
    int k = ks[i];
    auto Tf = berezin_matrix(f, k).matrix, Tg = berezin_matrix(g, k).matrix, Th = berezin_matrix(rep.bracket, k).matrix;
    Eigen::MatrixXcd comm = static_cast<double>(k) * (Tf * Tg - Tg * Tf);
    Eigen::MatrixXcd iTh = std::complex<double>(0, 1) * Th;
    return Level{operator_norm(comm - iTh), operator_norm(comm + iTh)};
  };
  auto levels = parallel_map<Level>(ks.size(), run);
  const Level& last = levels.back();
  if (last.plus < kZero && last.minus < kZero) {
    rep.identically_zero = true;
    for (const auto& l : levels) rep.identically_zero = rep.identically_zero && l.plus < kZero;
  }
  rep.sign = rep.identically_zero ? 0 : (last.minus < last.plus ? -1 : 1);
  for (const auto& l : levels) rep.norms.push_back(rep.sign < 0 ? l.minus : l.plus);
  if (!rep.identically_zero) rep.slope = loglog_slope(rep.ks, rep.norms);
  return rep;
}

}  // namespace starlb
