#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <ostream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "starlb/error.hpp"

namespace starlb {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline std::string rational_to_string(const Rational& q) {
  return q.str();
}

// Parses "p" or "p/q" with optional sign. Rejects zero denominators.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto is_int = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  auto slash = text.find('/');
  std::string_view num = trim(text.substr(0, slash));
  if (!is_int(num)) throw InputError("malformed rational '" + std::string(text) + "'");
  std::string ns(num);
  if (ns.front() == '+') ns.erase(0, 1);
  Integer p(ns);
  if (slash == std::string_view::npos) return Rational(p);
  std::string_view den = trim(text.substr(slash + 1));
  if (!is_int(den) || den.front() == '-' || den.front() == '+')
    throw InputError("malformed rational '" + std::string(text) + "'");
  Integer q{std::string(den)};
  if (q == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  return Rational(p, q);
}

// Exact number Σ q_m π^m with rational q_m and integer m. Terms are kept
// sorted by exponent with no zero coefficients, so equality is structural.
class Scalar {
 public:
  using Term = std::pair<int, Rational>;

  Scalar() = default;
  Scalar(int v) : Scalar(Rational(v)) {}  // NOLINT(google-explicit-constructor)
  Scalar(const Rational& q) {              // NOLINT(google-explicit-constructor)
    if (q != 0) terms_.emplace_back(0, q);
  }
  Scalar(const Rational& q, int pi_exponent) {
    if (q != 0) terms_.emplace_back(pi_exponent, q);
  }

  static Scalar pi(int exponent = 1) { return Scalar(Rational(1), exponent); }
  static Scalar from_terms(std::vector<Term> terms) {
    Scalar s;
    for (auto& [m, q] : terms) s.add_term(m, q);
    return s;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
  bool is_monomial() const { return terms_.size() == 1; }

  Rational rational_value() const {
    if (!is_rational()) throw MathError("scalar " + str() + " is not rational");
    return terms_.empty() ? Rational(0) : terms_[0].second;
  }

  bool is_integer() const {
    if (!is_rational()) return false;
    return denominator(rational_value()) == 1;
  }

  // Coefficient of π^m.
  Rational coefficient(int m) const {
    for (const auto& [e, q] : terms_)
      if (e == m) return q;
    return 0;
  }

  // True when the value lies in 2πℤ.
  bool in_two_pi_z() const {
    if (terms_.empty()) return true;
    if (terms_.size() != 1 || terms_[0].first != 1) return false;
    Rational half = terms_[0].second / 2;
    return denominator(half) == 1;
  }

  Scalar inverse() const {
    if (!is_monomial()) throw MathError("scalar " + str() + " is not invertible in Q[pi, 1/pi]");
    return Scalar(1 / terms_[0].second, -terms_[0].first);
  }

  double to_double() const {
    double v = 0;
    for (const auto& [m, q] : terms_) v += q.convert_to<double>() * std::pow(std::numbers::pi, m);
    return v;
  }

  Scalar& operator+=(const Scalar& o) {
    for (const auto& [m, q] : o.terms_) add_term(m, q);
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    for (const auto& [m, q] : o.terms_) add_term(m, -q);
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    *this = *this * o;
    return *this;
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator-(Scalar a) {
    for (auto& t : a.terms_) t.second = -t.second;
    return a;
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Scalar r;
    if (a.terms_.size() == 1 && b.terms_.size() == 1) {
      r.terms_.emplace_back(a.terms_[0].first + b.terms_[0].first, a.terms_[0].second * b.terms_[0].second);
      return r;
    }
    for (const auto& [ma, qa] : a.terms_)
      for (const auto& [mb, qb] : b.terms_) r.add_term(ma + mb, qa * qb);
    return r;
  }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.terms_ == b.terms_; }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::vector<Term> order;
    for (const auto& t : terms_)
      if (t.first == 0) order.push_back(t);
    for (const auto& t : terms_)
      if (t.first != 0) order.push_back(t);
    std::string out;
    bool first = true;
    for (const auto& [m, q] : order) {
      Rational mag = q < 0 ? Rational(-q) : q;
      if (first) {
        if (q < 0) out += "-";
      } else {
        out += q < 0 ? " - " : " + ";
      }
      first = false;
      if (m == 0) {
        out += rational_to_string(mag);
        continue;
      }
      if (mag != 1) out += rational_to_string(mag) + "*";
      out += "pi";
      if (m != 1) out += "^" + std::to_string(m);
    }
    return out;
  }

  // Grammar: term (('+'|'-') term)*, term := [rational ['*']] ['pi' ['^' int]].
  static Scalar parse(std::string_view text) {
    std::string s;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw InputError("empty scalar");
    Scalar out;
    std::size_t pos = 0;
    while (pos < s.size()) {
      int sign = 1;
      if (s[pos] == '+' || s[pos] == '-') {
        sign = s[pos] == '-' ? -1 : 1;
        ++pos;
      } else if (pos != 0) {
        throw InputError("malformed scalar '" + std::string(text) + "'");
      }
      std::size_t start = pos;
      while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/')) ++pos;
      Rational q = 1;
      bool have_q = pos > start;
      if (have_q) q = parse_rational(s.substr(start, pos - start));
      int m = 0;
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        if (s.compare(pos, 2, "pi") != 0) throw InputError("expected 'pi' in '" + std::string(text) + "'");
      }
      if (s.compare(pos, 2, "pi") == 0) {
        pos += 2;
        m = 1;
        if (pos < s.size() && s[pos] == '^') {
          ++pos;
          std::size_t e0 = pos;
          if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
          if (pos == e0 || (pos == e0 + 1 && !std::isdigit(static_cast<unsigned char>(s[e0]))))
            throw InputError("malformed pi exponent in '" + std::string(text) + "'");
          m = std::stoi(s.substr(e0, pos - e0));
        }
      } else if (!have_q) {
        throw InputError("malformed scalar '" + std::string(text) + "'");
      }
      out.add_term(m, sign * q);
    }
    return out;
  }

 private:
  void add_term(int m, const Rational& q) {
    if (q == 0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, int e) { return t.first < e; });
    if (it != terms_.end() && it->first == m) {
      it->second += q;
      if (it->second == 0) terms_.erase(it);
    } else {
      terms_.insert(it, Term{m, q});
    }
  }

  std::vector<Term> terms_;
};

// (re, im) pair of exact scalars.
struct ComplexScalar {
  Scalar re;
  Scalar im;

  ComplexScalar() = default;
  ComplexScalar(Scalar r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  ComplexScalar(int r) : re(r) {}                 // NOLINT(google-explicit-constructor)
  ComplexScalar(Scalar r, Scalar i) : re(std::move(r)), im(std::move(i)) {}

  static ComplexScalar i() { return {Scalar(), Scalar(1)}; }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_real() const { return im.is_zero(); }
  ComplexScalar conj() const { return {re, -im}; }
  ComplexScalar times_i() const { return {-im, re}; }

  ComplexScalar& operator+=(const ComplexScalar& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ComplexScalar& operator-=(const ComplexScalar& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend ComplexScalar operator+(ComplexScalar a, const ComplexScalar& b) { return a += b; }
  friend ComplexScalar operator-(ComplexScalar a, const ComplexScalar& b) { return a -= b; }
  friend ComplexScalar operator-(const ComplexScalar& a) { return {-a.re, -a.im}; }
  friend ComplexScalar operator*(const ComplexScalar& a, const ComplexScalar& b) {
    if (a.im.is_zero() && b.im.is_zero()) return {a.re * b.re, Scalar()};
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexScalar operator*(const ComplexScalar& a, const Scalar& s) { return {a.re * s, a.im * s}; }
  friend bool operator==(const ComplexScalar& a, const ComplexScalar& b) { return a.re == b.re && a.im == b.im; }

  std::string str() const {
    if (im.is_zero()) return re.str();
    if (re.is_zero()) return "(" + im.str() + ")i";
    return "(" + re.str() + ") + (" + im.str() + ")i";
  }
};

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }
inline std::ostream& operator<<(std::ostream& os, const ComplexScalar& s) { return os << s.str(); }

}  // namespace starlb
