#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "starlb/exactalg/scalar.hpp"

namespace starlb {

// One term x^exp · e^{2πi freq·x} of a chart function.
struct Monomial {
  std::vector<int> exp;
  std::vector<int> freq;

  bool is_one() const {
    return std::all_of(exp.begin(), exp.end(), [](int e) { return e == 0; }) &&
           std::all_of(freq.begin(), freq.end(), [](int f) { return f == 0; });
  }
  int total_degree() const {
    int d = 0;
    for (int e : exp) d += e;
    return d;
  }
  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.exp != b.exp) return a.exp < b.exp;
    return a.freq < b.freq;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) = default;
};

// Exponential polynomial Σ c · x^a · e^{2πi k·x} over named real variables,
// with exact complex coefficients. Polynomials (k = 0) and trigonometric
// polynomials on a unit torus (a = 0) are the two distinguished subclasses.
class ChartFunction {
 public:
  using TermMap = std::map<Monomial, ComplexScalar>;

  ChartFunction() = default;
  explicit ChartFunction(std::vector<std::string> vars) : vars_(std::move(vars)) { check_vars(); }

  static ChartFunction constant(std::vector<std::string> vars, const ComplexScalar& c) {
    ChartFunction f(std::move(vars));
    f.add_term(f.unit_monomial(), c);
    return f;
  }
  static ChartFunction constant(const ComplexScalar& c) { return constant({}, c); }

  static ChartFunction variable(std::vector<std::string> vars, const std::string& name) {
    ChartFunction f(std::move(vars));
    Monomial m = f.unit_monomial();
    m.exp[f.index_of(name)] = 1;
    f.add_term(m, Scalar(1));
    return f;
  }

  static ChartFunction monomial(std::vector<std::string> vars, std::vector<int> exp, const ComplexScalar& c) {
    ChartFunction f(std::move(vars));
    if (exp.size() != f.vars_.size()) throw MathError("exponent vector length mismatch");
    f.add_term(Monomial{std::move(exp), std::vector<int>(f.vars_.size(), 0)}, c);
    return f;
  }

  // c · e^{2πi freq·x}
  static ChartFunction fourier(std::vector<std::string> vars, std::vector<int> freq, const ComplexScalar& c) {
    ChartFunction f(std::move(vars));
    if (freq.size() != f.vars_.size()) throw MathError("frequency vector length mismatch");
    f.add_term(Monomial{std::vector<int>(f.vars_.size(), 0), std::move(freq)}, c);
    return f;
  }

  // cos(2π k·x) and sin(2π k·x)
  static ChartFunction cos2pi(std::vector<std::string> vars, std::vector<int> freq) {
    std::vector<int> neg = freq;
    for (int& k : neg) k = -k;
    const Scalar half(Rational(1, 2));
    return fourier(vars, freq, half) + fourier(vars, neg, half);
  }
  static ChartFunction sin2pi(std::vector<std::string> vars, std::vector<int> freq) {
    std::vector<int> neg = freq;
    for (int& k : neg) k = -k;
    const Scalar half(Rational(1, 2));
    return fourier(vars, freq, ComplexScalar(Scalar(), -half)) + fourier(vars, neg, ComplexScalar(Scalar(), half));
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool has_var(const std::string& name) const {
    return std::find(vars_.begin(), vars_.end(), name) != vars_.end();
  }
  std::size_t index_of(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw MathError("unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - vars_.begin());
  }

  // Variables that actually occur in some term.
  std::set<std::string> support_vars() const {
    std::set<std::string> out;
    for (const auto& [m, c] : terms_)
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (m.exp[i] != 0 || m.freq[i] != 0) out.insert(vars_[i]);
    return out;
  }
  bool depends_on(const std::string& name) const { return support_vars().count(name) > 0; }

  bool is_polynomial() const {
    for (const auto& [m, c] : terms_)
      for (int k : m.freq)
        if (k != 0) return false;
    return true;
  }
  bool is_trigonometric() const {
    for (const auto& [m, c] : terms_)
      for (int e : m.exp)
        if (e != 0) return false;
    return true;
  }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }

  ComplexScalar constant_term() const {
    for (const auto& [m, c] : terms_)
      if (m.is_one()) return c;
    return {};
  }

  // Conjugate symmetry of Fourier coefficients with real polynomial parts.
  bool is_real() const { return *this == conj(); }

  ChartFunction conj() const {
    ChartFunction r(vars_);
    for (const auto& [m, c] : terms_) {
      Monomial n = m;
      for (int& k : n.freq) k = -k;
      r.add_term(n, c.conj());
    }
    return r;
  }

  // Torus mean; only defined for periodic functions.
  ComplexScalar torus_mean() const {
    if (!is_trigonometric()) throw MathError("function is not periodic on the torus");
    return constant_term();
  }

  ChartFunction aligned(const std::vector<std::string>& target) const {
    if (target == vars_) return *this;
    std::vector<std::size_t> where(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = std::find(target.begin(), target.end(), vars_[i]);
      if (it == target.end()) {
        bool used = false;
        for (const auto& [m, c] : terms_) used = used || m.exp[i] != 0 || m.freq[i] != 0;
        if (used) throw MathError("variable '" + vars_[i] + "' not present in target chart");
        where[i] = target.size();
      } else {
        where[i] = static_cast<std::size_t>(it - target.begin());
      }
    }
    ChartFunction r(target);
    for (const auto& [m, c] : terms_) {
      Monomial n{std::vector<int>(target.size(), 0), std::vector<int>(target.size(), 0)};
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (where[i] == target.size()) continue;
        n.exp[where[i]] = m.exp[i];
        n.freq[where[i]] = m.freq[i];
      }
      r.add_term(n, c);
    }
    return r;
  }

  static std::vector<std::string> merge_vars(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    for (const auto& v : b)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }

  ChartFunction& operator+=(const ChartFunction& o) {
    if (o.vars_ != vars_) {
      auto u = merge_vars(vars_, o.vars_);
      *this = aligned(u);
      ChartFunction b = o.aligned(u);
      for (const auto& [m, c] : b.terms_) add_term(m, c);
      return *this;
    }
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  ChartFunction& operator-=(const ChartFunction& o) { return *this += -o; }

  friend ChartFunction operator+(ChartFunction a, const ChartFunction& b) { return a += b; }
  friend ChartFunction operator-(ChartFunction a, const ChartFunction& b) { return a -= b; }
  friend ChartFunction operator-(const ChartFunction& a) {
    ChartFunction r(a.vars_);
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
    return r;
  }
  friend ChartFunction operator*(const ChartFunction& a, const ChartFunction& b) {
    if (a.vars_ != b.vars_) {
      auto u = merge_vars(a.vars_, b.vars_);
      return a.aligned(u) * b.aligned(u);
    }
    ChartFunction r(a.vars_);
    const std::size_t n = a.vars_.size();
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m{std::vector<int>(n), std::vector<int>(n)};
        for (std::size_t i = 0; i < n; ++i) {
          m.exp[i] = ma.exp[i] + mb.exp[i];
          m.freq[i] = ma.freq[i] + mb.freq[i];
        }
        r.add_term(m, ca * cb);
      }
    return r;
  }
  friend ChartFunction operator*(const ChartFunction& a, const ComplexScalar& s) {
    ChartFunction r(a.vars_);
    if (s.is_zero()) return r;
    for (const auto& [m, c] : a.terms_) r.add_term(m, c * s);
    return r;
  }
  friend ChartFunction operator*(const ComplexScalar& s, const ChartFunction& a) { return a * s; }
  friend ChartFunction operator*(const ChartFunction& a, const Scalar& s) { return a * ComplexScalar(s); }
  friend ChartFunction operator*(const Scalar& s, const ChartFunction& a) { return a * ComplexScalar(s); }

  friend bool operator==(const ChartFunction& a, const ChartFunction& b) {
    if (a.vars_ == b.vars_) return a.terms_ == b.terms_;
    auto u = merge_vars(a.vars_, b.vars_);
    return a.aligned(u).terms_ == b.aligned(u).terms_;
  }

  ChartFunction pow(int k) const {
    if (k < 0) throw MathError("negative power of a chart function");
    ChartFunction r = constant(vars_, Scalar(1));
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  // ∂/∂var. The exponential part contributes 2πi·k with the 2π held exactly.
  ChartFunction derive(const std::string& var) const {
    const std::size_t i = index_of(var);
    ChartFunction r(vars_);
    for (const auto& [m, c] : terms_) {
      if (m.exp[i] != 0) {
        Monomial n = m;
        n.exp[i] -= 1;
        r.add_term(n, c * Scalar(m.exp[i]));
      }
      if (m.freq[i] != 0) r.add_term(m, c.times_i() * Scalar(Rational(2 * m.freq[i]), 1));
    }
    return r;
  }

  // Repeated partial derivatives; counts[i] is the order in vars()[i].
  ChartFunction derive_multi(const std::vector<int>& counts) const {
    ChartFunction r = *this;
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (int k = 0; k < counts[i]; ++k) r = r.derive(vars_[i]);
    return r;
  }

  // Renames variables; a target already present is merged (f(x, y) -> f(x, x)).
  ChartFunction renamed(const std::map<std::string, std::string>& mapping) const {
    std::vector<std::string> target;
    for (const auto& v : vars_) {
      auto it = mapping.find(v);
      const std::string& nv = it == mapping.end() ? v : it->second;
      if (std::find(target.begin(), target.end(), nv) == target.end()) target.push_back(nv);
    }
    std::vector<std::size_t> where(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = mapping.find(vars_[i]);
      const std::string& nv = it == mapping.end() ? vars_[i] : it->second;
      where[i] = static_cast<std::size_t>(std::find(target.begin(), target.end(), nv) - target.begin());
    }
    ChartFunction r(target);
    for (const auto& [m, c] : terms_) {
      Monomial n{std::vector<int>(target.size(), 0), std::vector<int>(target.size(), 0)};
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        n.exp[where[i]] += m.exp[i];
        n.freq[where[i]] += m.freq[i];
      }
      r.add_term(n, c);
    }
    return r;
  }

  // f(x + amount e_var). Fourier factors pick up e^{2πi k·amount}, so
  // amounts acting on oscillating terms must be integers.
  ChartFunction shifted(const std::string& var, const Rational& amount) const {
    const std::size_t i = index_of(var);
    ChartFunction r(vars_);
    for (const auto& [m, c] : terms_) {
      if (m.freq[i] != 0 && denominator(amount) != 1)
        throw MathError("non-integer shift of a periodic factor in '" + var + "'");
      // binomial expansion of (x + a)^e
      Rational binom = 1;
      Rational apow = 1;
      const int e = m.exp[i];
      std::vector<Rational> powers(static_cast<std::size_t>(e) + 1);
      for (int j = 0; j <= e; ++j) {
        powers[static_cast<std::size_t>(j)] = apow;
        apow *= amount;
      }
      for (int j = 0; j <= e; ++j) {
        // term x^{e-j} a^j C(e, j)
        Monomial n = m;
        n.exp[i] = e - j;
        r.add_term(n, c * Scalar(binom * powers[static_cast<std::size_t>(j)]));
        binom = binom * (e - j) / (j + 1);
      }
    }
    return r;
  }

  // Substitutes a constant for a polynomial variable (no oscillating factor in it).
  ChartFunction evaluated(const std::string& var, const Rational& value) const {
    const std::size_t i = index_of(var);
    ChartFunction r(vars_);
    for (const auto& [m, c] : terms_) {
      if (m.freq[i] != 0) throw MathError("cannot evaluate oscillating factor in '" + var + "' exactly");
      Monomial n = m;
      n.exp[i] = 0;
      Rational p = 1;
      for (int k = 0; k < m.exp[i]; ++k) p *= value;
      r.add_term(n, c * Scalar(p));
    }
    return r;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
    return d;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      std::string factors;
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (m.exp[i] == 0) continue;
        if (!factors.empty()) factors += "*";
        factors += vars_[i];
        if (m.exp[i] != 1) factors += "^" + std::to_string(m.exp[i]);
      }
      bool osc = std::any_of(m.freq.begin(), m.freq.end(), [](int k) { return k != 0; });
      if (osc) {
        if (!factors.empty()) factors += "*";
        factors += "e[";
        for (std::size_t i = 0; i < m.freq.size(); ++i) factors += (i ? "," : "") + std::to_string(m.freq[i]);
        factors += "]";
      }
      std::string coeff = c.str();
      if (factors.empty()) {
        out += coeff;
      } else if (c == ComplexScalar(1)) {
        out += factors;
      } else {
        bool wrap = coeff.find(' ') != std::string::npos;
        out += (wrap ? "(" + coeff + ")" : coeff) + "*" + factors;
      }
    }
    return out;
  }

  void add_term(const Monomial& m, const ComplexScalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Monomial unit_monomial() const {
    return Monomial{std::vector<int>(vars_.size(), 0), std::vector<int>(vars_.size(), 0)};
  }

 private:
  void check_vars() const {
    std::set<std::string> seen(vars_.begin(), vars_.end());
    if (seen.size() != vars_.size()) throw MathError("duplicate variable names in chart");
  }

  std::vector<std::string> vars_;
  TermMap terms_;
};

inline std::ostream& operator<<(std::ostream& os, const ChartFunction& f) { return os << f.str(); }

}  // namespace starlb
