#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "starlb/exactalg/manifold.hpp"
#include "starlb/exactalg/scalar.hpp"

namespace starlb {

using Lattice = std::vector<long>;

inline long floor_rational(const Rational& q) {
  Integer n = numerator(q), d = denominator(q);
  Integer f = n / d;
  if (n < 0 && f * d != n) f -= 1;
  return static_cast<long>(f);
}

// Open box center ± halfwidth in lifted coordinates.
struct ChartBox {
  std::vector<Rational> center;
  std::vector<Rational> halfwidth;
  Rational lo(std::size_t d) const { return center[d] - halfwidth[d]; }
  Rational hi(std::size_t d) const { return center[d] + halfwidth[d]; }
};

struct Overlap {
  std::size_t i, j;  // i < j
  Lattice lift;      // chart-j coordinates = chart-i coordinates - lift
};

struct TripleOverlap {
  std::size_t i, j, k;  // i < j < k
};

// Box cover of the unit torus T^n with the lifts of every pairwise overlap.
// A box wider than the torus in every direction is a single whole-torus chart.
class GoodCover {
 public:
  GoodCover(int dim, std::vector<ChartBox> charts) : dim_(dim), charts_(std::move(charts)) {
    if (dim_ < 1) throw InputError("cover dimension must be >= 1", "/dim");
    if (charts_.empty()) throw InputError("cover has no charts", "/charts");
    for (std::size_t c = 0; c < charts_.size(); ++c) {
      const auto& b = charts_[c];
      const std::string at = "/charts/" + std::to_string(c);
      if (b.center.size() != static_cast<std::size_t>(dim_)) throw InputError("center has wrong dimension", at + "/center");
      if (b.halfwidth.size() != static_cast<std::size_t>(dim_)) throw InputError("halfwidth has wrong dimension", at + "/halfwidth");
      for (const auto& w : b.halfwidth)
        if (w <= 0) throw InputError("halfwidth must be positive", at + "/halfwidth");
      if (!whole(c) && std::any_of(b.halfwidth.begin(), b.halfwidth.end(), [](const Rational& w) { return w > Rational(1, 4); }))
        throw InputError("halfwidth must not exceed 1/4 so that overlaps stay connected", at + "/halfwidth");
    }
    if (charts_.size() > 1)
      for (std::size_t c = 0; c < charts_.size(); ++c)
        if (whole(c)) throw InputError("a whole-torus chart must be the only chart", "/charts/" + std::to_string(c));
    build_nerve();
    if (!covers()) throw InputError("charts do not cover the torus", "/charts");
  }

  // g_1 x ... x g_n grid: centers (a + 1/2)/g, halfwidth 3/(4g).
  static GoodCover grid(int dim, int g) {
    if (g < 3) throw InputError("grid size must be at least 3", "/grid");
    std::vector<ChartBox> charts;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    while (true) {
      ChartBox b;
      for (int d = 0; d < dim; ++d) {
        b.center.push_back(Rational(2 * idx[static_cast<std::size_t>(d)] + 1, 2 * g));
        b.halfwidth.push_back(Rational(3, 4 * g));
      }
      charts.push_back(b);
      int d = dim - 1;
      while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == g) idx[static_cast<std::size_t>(d--)] = 0;
      if (d < 0) break;
    }
    GoodCover c(dim, std::move(charts));
    c.grid_ = g;
    return c;
  }

  static GoodCover single(int dim) {
    ChartBox b{std::vector<Rational>(static_cast<std::size_t>(dim), Rational(1, 2)),
               std::vector<Rational>(static_cast<std::size_t>(dim), Rational(1, 2))};
    return GoodCover(dim, {b});
  }

  int dim() const { return dim_; }
  std::size_t size() const { return charts_.size(); }
  const std::vector<ChartBox>& charts() const { return charts_; }
  const std::vector<Overlap>& overlaps() const { return overlaps_; }
  const std::vector<TripleOverlap>& triples() const { return triples_; }
  std::optional<int> grid_size() const { return grid_; }
  bool whole(std::size_t c) const {
    return std::all_of(charts_[c].halfwidth.begin(), charts_[c].halfwidth.end(), [](const Rational& w) { return w >= Rational(1, 2); });
  }
  // Chart index of grid cell (a, b, ...).
  std::size_t grid_index(const std::vector<int>& cell) const {
    if (!grid_) throw MathError("cover is not a grid");
    std::size_t k = 0;
    for (int a : cell) k = k * static_cast<std::size_t>(*grid_) + static_cast<std::size_t>(((a % *grid_) + *grid_) % *grid_);
    return k;
  }

  bool overlapping(std::size_t i, std::size_t j) const { return i == j || lift_.count(key(i, j)) > 0; }
  // n with chart-j coordinates = chart-i coordinates - n on their overlap.
  Lattice lift(std::size_t i, std::size_t j) const {
    if (i == j) return Lattice(static_cast<std::size_t>(dim_), 0);
    auto it = lift_.find(key(i, j));
    if (it == lift_.end()) throw MathError("charts " + std::to_string(i) + " and " + std::to_string(j) + " do not overlap");
    if (i < j) return it->second;
    Lattice n = it->second;
    for (auto& v : n) v = -v;
    return n;
  }
  bool has_triple(std::size_t i, std::size_t j, std::size_t k) const {
    std::array<std::size_t, 3> t{i, j, k};
    std::sort(t.begin(), t.end());
    return triple_set_.count(t) > 0;
  }

  // Replaces the computed lifts by the given ones after checking they agree.
  void require_lifts(const std::map<std::pair<std::size_t, std::size_t>, Lattice>& given) const {
    for (const auto& [ij, n] : given) {
      auto [i, j] = ij;
      const std::string at = "/lifts/" + std::to_string(i) + "," + std::to_string(j);
      if (i >= size() || j >= size() || i == j) throw InputError("lift refers to unknown chart pair", at);
      if (!overlapping(i, j)) throw InputError("lift given for non-overlapping charts", at);
      if (lift(i, j) != n) throw InputError("lift is inconsistent with the chart geometry", at);
    }
  }

  // Some lift of point p (mod 1) into chart c, if any.
  std::optional<std::vector<Rational>> lift_into(std::size_t c, const std::vector<Rational>& p) const {
    const auto& b = charts_[c];
    std::vector<Rational> out;
    for (std::size_t d = 0; d < p.size(); ++d) {
      if (whole(c)) {
        Rational q = p[d] - floor_rational(p[d]);
        out.push_back(q);
        continue;
      }
      long base = floor_rational(b.center[d] - p[d]);
      bool found = false;
      for (long n = base - 1; n <= base + 2 && !found; ++n) {
        Rational q = p[d] + n;
        if (q > b.lo(d) && q < b.hi(d)) {
          out.push_back(q);
          found = true;
        }
      }
      if (!found) return std::nullopt;
    }
    return out;
  }

 private:
  static std::pair<std::size_t, std::size_t> key(std::size_t i, std::size_t j) { return {std::min(i, j), std::max(i, j)}; }

  void build_nerve() {
    const std::size_t n = charts_.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Lattice lift;
        bool ok = true;
        for (std::size_t d = 0; d < static_cast<std::size_t>(dim_) && ok; ++d) {
          Rational diff = charts_[i].center[d] - charts_[j].center[d];
          Rational reach = charts_[i].halfwidth[d] + charts_[j].halfwidth[d];
          std::vector<long> cands;
          long base = floor_rational(diff);
          for (long m = base - 1; m <= base + 2; ++m) {
            Rational gap = diff - m;
            if (gap < 0) gap = -gap;
            if (gap < reach) cands.push_back(m);
          }
          if (cands.empty()) ok = false;
          else if (cands.size() > 1) throw InputError("charts " + std::to_string(i) + " and " + std::to_string(j) + " overlap in several components", "/charts");
          else lift.push_back(cands[0]);
        }
        if (ok) {
          lift_[{i, j}] = lift;
          overlaps_.push_back({i, j, lift});
        }
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!overlapping(i, j)) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
          if (!overlapping(i, k) || !overlapping(j, k)) continue;
          Lattice nij = lift(i, j), nik = lift(i, k), njk = lift(j, k);
          bool ok = true;
          for (std::size_t d = 0; d < static_cast<std::size_t>(dim_) && ok; ++d) {
            // R_i ∩ (R_j + n_ij) ∩ (R_k + n_ik)
            Rational lo = std::max({charts_[i].lo(d), charts_[j].lo(d) + nij[d], charts_[k].lo(d) + nik[d]});
            Rational hi = std::min({charts_[i].hi(d), charts_[j].hi(d) + nij[d], charts_[k].hi(d) + nik[d]});
            ok = lo < hi && nik[d] == nij[d] + njk[d];
          }
          if (ok) {
            triples_.push_back({i, j, k});
            triple_set_.insert({i, j, k});
          }
        }
      }
  }

  // Exact coverage test: membership only changes at box edges, so testing all
  // edges and midpoints between consecutive edges (mod 1) is enough.
  bool covers() const {
    if (charts_.size() == 1 && whole(0)) return true;
    std::vector<std::vector<Rational>> samples(static_cast<std::size_t>(dim_));
    for (std::size_t d = 0; d < static_cast<std::size_t>(dim_); ++d) {
      std::set<Rational> edges{Rational(0)};
      for (const auto& b : charts_)
        for (Rational e : {b.lo(d), b.hi(d)}) edges.insert(e - floor_rational(e));
      std::vector<Rational> ev(edges.begin(), edges.end());
      ev.push_back(Rational(1));
      for (std::size_t a = 0; a + 1 < ev.size(); ++a) {
        samples[d].push_back(ev[a]);
        samples[d].push_back((ev[a] + ev[a + 1]) / 2);
      }
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim_), 0);
    while (true) {
      std::vector<Rational> p;
      for (std::size_t d = 0; d < idx.size(); ++d) p.push_back(samples[d][idx[d]]);
      bool inside = false;
      for (std::size_t c = 0; c < charts_.size() && !inside; ++c) inside = lift_into(c, p).has_value();
      if (!inside) return false;
      std::size_t d = 0;
      while (d < idx.size() && ++idx[d] == samples[d].size()) idx[d++] = 0;
      if (d == idx.size()) break;
    }
    return true;
  }

  int dim_;
  std::vector<ChartBox> charts_;
  std::optional<int> grid_;
  std::vector<Overlap> overlaps_;
  std::vector<TripleOverlap> triples_;
  std::set<std::array<std::size_t, 3>> triple_set_;
  std::map<std::pair<std::size_t, std::size_t>, Lattice> lift_;
};

}  // namespace starlb
