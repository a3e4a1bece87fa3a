#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "starlb/exactalg/chart_function.hpp"

namespace starlb {

// Σ_{k=0}^{K} a_k t^k with chart-function coefficients. Binary operations
// truncate to the smaller K of their operands.
class FormalSeries {
 public:
  FormalSeries(int K, std::vector<std::string> vars) : K_(K), coeffs_(static_cast<std::size_t>(check_order(K)) + 1, ChartFunction(vars)) {}
  FormalSeries(int K, const ChartFunction& leading) : FormalSeries(K, leading.vars()) { coeffs_[0] = leading; }
  explicit FormalSeries(std::vector<ChartFunction> coeffs) : K_(static_cast<int>(coeffs.size()) - 1), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw MathError("formal series needs at least one coefficient");
  }

  int order() const { return K_; }
  const std::vector<ChartFunction>& coeffs() const { return coeffs_; }
  const ChartFunction& operator[](int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
  ChartFunction& operator[](int k) { return coeffs_.at(static_cast<std::size_t>(k)); }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const ChartFunction& f) { return f.is_zero(); });
  }
  // Lowest order with a nonzero coefficient, or -1.
  int first_nonzero() const {
    for (int k = 0; k <= K_; ++k)
      if (!coeffs_[static_cast<std::size_t>(k)].is_zero()) return k;
    return -1;
  }

  FormalSeries truncated(int K) const {
    K = std::min(K, K_);
    return FormalSeries(std::vector<ChartFunction>(coeffs_.begin(), coeffs_.begin() + K + 1));
  }

  friend FormalSeries operator+(const FormalSeries& a, const FormalSeries& b) {
    const int K = std::min(a.K_, b.K_);
    std::vector<ChartFunction> c;
    for (int k = 0; k <= K; ++k) c.push_back(a[k] + b[k]);
    return FormalSeries(std::move(c));
  }
  friend FormalSeries operator-(const FormalSeries& a, const FormalSeries& b) {
    const int K = std::min(a.K_, b.K_);
    std::vector<ChartFunction> c;
    for (int k = 0; k <= K; ++k) c.push_back(a[k] - b[k]);
    return FormalSeries(std::move(c));
  }
  friend FormalSeries operator*(const FormalSeries& a, const ComplexScalar& s) {
    std::vector<ChartFunction> c;
    for (const auto& f : a.coeffs_) c.push_back(f * s);
    return FormalSeries(std::move(c));
  }
  friend bool operator==(const FormalSeries& a, const FormalSeries& b) {
    return a.K_ == b.K_ && a.coeffs_ == b.coeffs_;
  }

  std::string str() const {
    std::string out;
    for (int k = 0; k <= K_; ++k) {
      const auto& f = coeffs_[static_cast<std::size_t>(k)];
      if (f.is_zero()) continue;
      if (!out.empty()) out += " + ";
      std::string s = f.str();
      if (k == 0) {
        out += s;
      } else {
        out += "(" + s + ")*t" + (k > 1 ? "^" + std::to_string(k) : "");
      }
    }
    return out.empty() ? "0" : out;
  }

 private:
  static int check_order(int K) {
    if (K < 0) throw MathError("negative truncation order");
    return K;
  }

  int K_;
  std::vector<ChartFunction> coeffs_;
};

}  // namespace starlb
