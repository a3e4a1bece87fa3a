#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "starlb/exactalg/chart_function.hpp"

namespace starlb {

using cplx = std::complex<double>;

// Trigonometric polynomial on S¹ = ℝ/ℤ, f(x) = Σ c_m e^{2πi m x}, kept exact.
class CircleSymbol {
 public:
  explicit CircleSymbol(const ChartFunction& f) {
    if (f.support_vars().size() > 1) throw MathError("circle symbols depend on a single variable");
    if (!f.is_trigonometric()) throw MathError("circle symbols must be trigonometric polynomials");
    std::string v = f.support_vars().empty() ? "x" : *f.support_vars().begin();
    fn_ = f.renamed({{v, "x"}}).aligned({"x"});
    for (const auto& [m, c] : fn_.terms()) coeff_[m.freq[0]] = c;
  }
  // Σ c_m e^{imθ} from {m: c_m}
  static CircleSymbol from_modes(const std::map<int, ComplexScalar>& modes) {
    ChartFunction f({"x"});
    for (const auto& [m, c] : modes) f += ChartFunction::fourier({"x"}, {m}, c);
    return CircleSymbol(f);
  }

  const ChartFunction& function() const { return fn_; }
  const std::map<int, ComplexScalar>& modes() const { return coeff_; }
  ComplexScalar coefficient(int m) const {
    auto it = coeff_.find(m);
    return it == coeff_.end() ? ComplexScalar() : it->second;
  }
  cplx coefficient_d(int m) const {
    ComplexScalar c = coefficient(m);
    return {c.re.to_double(), c.im.to_double()};
  }
  int bandwidth() const {
    int b = 0;
    for (const auto& [m, c] : coeff_) b = std::max(b, std::abs(m));
    return b;
  }
  cplx operator()(double x) const {
    cplx s = 0;
    for (const auto& [m, c] : coeff_) s += cplx(c.re.to_double(), c.im.to_double()) * std::polar(1.0, 2 * std::numbers::pi * m * x);
    return s;
  }
  CircleSymbol conj() const { return CircleSymbol(fn_.conj()); }
  friend CircleSymbol operator*(const CircleSymbol& a, const CircleSymbol& b) {
    return CircleSymbol(a.fn_ * b.fn_);
  }

 private:
  ChartFunction fn_{std::vector<std::string>{"x"}};
  std::map<int, ComplexScalar> coeff_;
};

// Projector onto modes 0..N, represented on the window of modes -W..W.
struct HardyTruncation {
  int N;
  std::vector<std::vector<int>> matrix(int W) const {
    std::vector<std::vector<int>> P(static_cast<std::size_t>(2 * W + 1), std::vector<int>(static_cast<std::size_t>(2 * W + 1), 0));
    for (int m = -W; m <= W; ++m)
      if (m >= 0 && m <= N) P[static_cast<std::size_t>(m + W)][static_cast<std::size_t>(m + W)] = 1;
    return P;
  }
  bool idempotent(int W) const {
    auto P = matrix(W);
    const std::size_t n = P.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        int s = 0;
        for (std::size_t k = 0; k < n; ++k) s += P[i][k] * P[k][j];
        if (s != P[i][j]) return false;
      }
    return true;
  }
};

// Banded compression P M_f P on modes 0..N: entry (j, k) = f̂(j - k).
class ToeplitzMatrix {
 public:
  ToeplitzMatrix(int size, std::map<int, ComplexScalar> bands) : size_(size), bands_(std::move(bands)) {}
  int size() const { return size_; }
  const std::map<int, ComplexScalar>& bands() const { return bands_; }
  ComplexScalar entry(int j, int k) const {
    auto it = bands_.find(j - k);
    return it == bands_.end() ? ComplexScalar() : it->second;
  }
  ToeplitzMatrix adjoint() const {
    std::map<int, ComplexScalar> b;
    for (const auto& [d, c] : bands_) b[-d] = c.conj();
    return ToeplitzMatrix(size_, b);
  }
  friend bool operator==(const ToeplitzMatrix& a, const ToeplitzMatrix& b) { return a.size_ == b.size_ && a.bands_ == b.bands_; }

 private:
  int size_;
  std::map<int, ComplexScalar> bands_;
};

inline ToeplitzMatrix toeplitz_matrix(const CircleSymbol& f, int N) {
  if (N < 0) throw MathError("truncation must be nonnegative");
  if (N < f.bandwidth()) throw MathError("truncation N = " + std::to_string(N) + " is below the symbol bandwidth " + std::to_string(f.bandwidth()));
  std::map<int, ComplexScalar> b;
  for (const auto& [m, c] : f.modes())
    if (!c.is_zero()) b[m] = c;
  return ToeplitzMatrix(N + 1, b);
}

struct EllipticityMargin {
  double sampled_min = 0;
  double lipschitz = 0;
  int samples = 0;
  double margin() const { return sampled_min - lipschitz / (2.0 * samples); }
};

// min |f| on a uniform grid minus the largest possible dip between samples.
inline EllipticityMargin ellipticity_margin(const CircleSymbol& f) {
  EllipticityMargin m;
  for (const auto& [k, c] : f.modes()) m.lipschitz += 2 * std::numbers::pi * std::abs(k) * std::abs(cplx(c.re.to_double(), c.im.to_double()));
  for (int S = 1024; S <= (1 << 18); S *= 4) {
    m.samples = S;
    m.sampled_min = INFINITY;
    for (int i = 0; i < S; ++i) m.sampled_min = std::min(m.sampled_min, std::abs(f(static_cast<double>(i) / S)));
    if (m.margin() > 0 || m.sampled_min < 1e-12) break;
  }
  return m;
}

struct Reciprocal {
  std::map<int, cplx> coeff;  // modes -M..M of 1/f
  std::string method;         // "neumann" or "quadrature"
  double tail = 0;            // size of the outermost retained coefficients
};

// Order-M Fourier truncation of 1/f: a Neumann series around the constant
// term when it dominates, otherwise trapezoidal quadrature of 1/f.
inline Reciprocal reciprocal(const CircleSymbol& f, int M) {
  Reciprocal r;
  cplx c0 = f.coefficient_d(0);
  double rest = 0;
  for (const auto& [k, c] : f.modes())
    if (k != 0) rest += std::abs(cplx(c.re.to_double(), c.im.to_double()));
  for (int m = -M; m <= M; ++m) r.coeff[m] = 0;
  if (std::abs(c0) > 0 && rest < 0.9 * std::abs(c0)) {
    r.method = "neumann";
    // 1/f = (1/c0) Σ (-h/c0)^n, h = f - c0
    std::map<int, cplx> q;
    for (const auto& [k, c] : f.modes())
      if (k != 0) q[k] = -cplx(c.re.to_double(), c.im.to_double()) / c0;
    std::map<int, cplx> term{{0, 1.0 / c0}};
    for (int n = 0; n < 10000; ++n) {
      double size = 0;
      for (const auto& [k, v] : term) {
        if (std::abs(k) <= M) r.coeff[k] += v;
        size += std::abs(v);
      }
      if (size < 1e-18 * std::abs(1.0 / c0)) break;
      std::map<int, cplx> next;
      for (const auto& [k, v] : term)
        for (const auto& [l, w] : q)
          if (std::abs(k + l) <= M + f.bandwidth()) next[k + l] += v * w;
      term = std::move(next);
    }
  } else {
    r.method = "quadrature";
    const int L = std::max(8 * (M + f.bandwidth()) + 8, 4096);
    std::vector<cplx> inv(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) inv[static_cast<std::size_t>(l)] = 1.0 / f(static_cast<double>(l) / L);
    for (int m = -M; m <= M; ++m) {
      cplx s = 0;
      for (int l = 0; l < L; ++l) s += inv[static_cast<std::size_t>(l)] * std::polar(1.0, -2 * std::numbers::pi * m * static_cast<double>(l) / L);
      r.coeff[m] = s / static_cast<double>(L);
    }
  }
  r.tail = std::max(std::abs(r.coeff[M]), std::abs(r.coeff[-M]));
  return r;
}

struct HardyIndex {
  double value = 0;
  EllipticityMargin margin;
  std::string method;
  double tail = 0;
};

// Tr(T_f T_g - I) - Tr(T_g T_f - I) summed over modes 0..N with the products
// taken on the full Hardy space, g ≈ 1/f. Finite sections P_N T_f P_N all
// have index 0, so the naive matrix kernel count would be useless; the trace
// difference converges to ind T_f = -winding(f).
inline HardyIndex hardy_index(const CircleSymbol& f, int N, int M) {
  if (N < 0 || M < 1) throw MathError("need N >= 0 and M >= 1");
  HardyIndex out;
  out.margin = ellipticity_margin(f);
  if (!(out.margin.margin() > 0)) throw MathError("symbol is not elliptic: min |f| is not bounded away from 0");
  Reciprocal g = reciprocal(f, M);
  out.method = g.method;
  out.tail = g.tail;
  auto gh = [&](int m) {
    auto it = g.coeff.find(m);
    return it == g.coeff.end() ? cplx(0) : it->second;
  };
  const int band = std::max(f.bandwidth(), M);
  // (T_a T_b)_{jj} = Σ_{k >= 0} â(j-k) b̂(k-j); the I and full-convolution
  // parts cancel in the difference, leaving only k < 0 contributions.
  double total = 0;
  for (int j = 0; j <= N; ++j) {
    cplx s = 0;
    for (int k = std::max(j - band, -band - 1); k < 0; ++k) {
      int m = j - k;
      s += gh(m) * f.coefficient_d(-m) - f.coefficient_d(m) * gh(-m);
    }
    total += s.real();
  }
  out.value = total;
  return out;
}

struct HardyAdditivity {
  double product = 0, first = 0, second = 0;
  double defect() const { return std::abs(product - first - second); }
};

inline HardyAdditivity hardy_index_additivity(const CircleSymbol& f1, const CircleSymbol& f2, int N, int M) {
  return {hardy_index(f1 * f2, N, M).value, hardy_index(f1, N, M).value, hardy_index(f2, N, M).value};
}

}  // namespace starlb
