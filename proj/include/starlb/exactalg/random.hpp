#pragma once

#include <random>
#include <string>
#include <vector>

#include "starlb/exactalg/chart_function.hpp"

namespace starlb::gen {

inline Rational random_rational(std::mt19937& rng, int range = 5) {
  std::uniform_int_distribution<int> num(-range, range), den(1, range);
  return Rational(num(rng), den(rng));
}

inline Scalar random_scalar(std::mt19937& rng, int max_terms = 2) {
  std::uniform_int_distribution<int> nt(0, max_terms), ex(-2, 2);
  std::vector<Scalar::Term> terms;
  int n = nt(rng);
  for (int i = 0; i < n; ++i) terms.emplace_back(ex(rng), random_rational(rng));
  return Scalar::from_terms(terms);
}

// Dense-ish random polynomial of total degree <= deg with rational coefficients.
inline ChartFunction random_polynomial(std::mt19937& rng, const std::vector<std::string>& vars, int deg, int terms = 5) {
  ChartFunction f(vars);
  std::uniform_int_distribution<int> e(0, deg);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> exp(vars.size(), 0);
    int budget = deg;
    for (auto& x : exp) {
      int v = std::uniform_int_distribution<int>(0, budget)(rng);
      x = v;
      budget -= v;
    }
    (void)e;
    f += ChartFunction::monomial(vars, exp, Scalar(random_rational(rng)));
  }
  return f;
}

// Random trigonometric polynomial with frequencies in [-range, range]^n and
// complex rational coefficients.
inline ChartFunction random_trig(std::mt19937& rng, const std::vector<std::string>& vars, int range = 2, int terms = 4,
                                 bool real = false) {
  ChartFunction f(vars);
  std::uniform_int_distribution<int> fr(-range, range);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> k(vars.size());
    for (auto& x : k) x = fr(rng);
    ComplexScalar c(Scalar(random_rational(rng)), Scalar(random_rational(rng)));
    f += ChartFunction::fourier(vars, k, c);
  }
  if (real) f = (f + f.conj()) * Scalar(Rational(1, 2));
  return f;
}

// Mixed exponential polynomial.
inline ChartFunction random_mixed(std::mt19937& rng, const std::vector<std::string>& vars) {
  return random_polynomial(rng, vars, 2, 3) * random_trig(rng, vars, 1, 2) + random_trig(rng, vars, 2, 2);
}

}  // namespace starlb::gen
