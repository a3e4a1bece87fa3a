#pragma once

// Brute-force geometry on the torus, independent of the nerve construction:
// sample points, record which charts contain them and evaluate functions
// numerically at the lifted coordinates.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <set>
#include <vector>

#include "starlb/exactalg/chart_function.hpp"

namespace oracle {

struct Box {
  double cx, cy, wx, wy;
};

// lift of p into the box, if any
inline std::optional<std::array<double, 2>> lift(const Box& b, double px, double py) {
  std::optional<double> lx, ly;
  for (int n = -2; n <= 2; ++n) {
    if (std::abs(px + n - b.cx) < b.wx) lx = px + n;
    if (std::abs(py + n - b.cy) < b.wy) ly = py + n;
  }
  if (!lx || !ly) return std::nullopt;
  return std::array<double, 2>{*lx, *ly};
}

struct Nerve {
  std::set<std::array<std::size_t, 2>> pairs;
  std::set<std::array<std::size_t, 3>> triples;
  // one witness point per triple
  std::vector<std::pair<std::array<std::size_t, 3>, std::array<double, 2>>> witness;
};

inline Nerve sample_nerve(const std::vector<Box>& boxes, int n = 97) {
  Nerve N;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double px = (a + 0.37) / n, py = (b + 0.61) / n;
      std::vector<std::size_t> in;
      for (std::size_t c = 0; c < boxes.size(); ++c)
        if (lift(boxes[c], px, py)) in.push_back(c);
      for (std::size_t i = 0; i < in.size(); ++i)
        for (std::size_t j = i + 1; j < in.size(); ++j) {
          N.pairs.insert({in[i], in[j]});
          for (std::size_t k = j + 1; k < in.size(); ++k)
            if (N.triples.insert({in[i], in[j], in[k]}).second) N.witness.push_back({{in[i], in[j], in[k]}, {px, py}});
        }
    }
  return N;
}

inline std::complex<double> eval(const starlb::ChartFunction& f, const std::vector<double>& point) {
  std::complex<double> s = 0;
  for (const auto& [m, c] : f.terms()) {
    std::complex<double> t(c.re.to_double(), c.im.to_double());
    for (std::size_t i = 0; i < point.size(); ++i) {
      t *= std::pow(point[i], m.exp[i]);
      t *= std::exp(std::complex<double>(0, 2 * M_PI * m.freq[i] * point[i]));
    }
    s += t;
  }
  return s;
}

}  // namespace oracle
