#pragma once

#include <string>
#include <vector>

#include "starlb/error.hpp"

namespace starlb {

// Desk-scale manifolds. Tori carry the unit lattice and unit volume; the
// round sphere only supports forms spanned by 1 and its normalized area form.
class Manifold {
 public:
  enum class Kind { Torus, Sphere2, Euclidean };

  static Manifold torus(int n) { return Manifold(Kind::Torus, default_names(n)); }
  static Manifold torus(std::vector<std::string> names) { return Manifold(Kind::Torus, std::move(names)); }
  static Manifold euclidean(int n) { return Manifold(Kind::Euclidean, default_names(n)); }
  static Manifold euclidean(std::vector<std::string> names) { return Manifold(Kind::Euclidean, std::move(names)); }
  static Manifold sphere2() { return Manifold(Kind::Sphere2, {"s", "t"}); }

  // "T2", "T4", "S2", "R3", ...
  static Manifold parse(const std::string& name) {
    if (name == "S2") return sphere2();
    if (name.size() >= 2 && (name[0] == 'T' || name[0] == 'R')) {
      int n = 0;
      try {
        std::size_t used = 0;
        n = std::stoi(name.substr(1), &used);
        if (used != name.size() - 1) n = 0;
      } catch (const std::exception&) {
        n = 0;
      }
      if (n >= 1) return name[0] == 'T' ? torus(n) : euclidean(n);
    }
    throw InputError("unknown manifold '" + name + "'");
  }

  static std::vector<std::string> default_names(int n) {
    if (n < 1) throw MathError("manifold dimension must be >= 1");
    if (n == 1) return {"x"};
    if (n == 2) return {"x", "y"};
    std::vector<std::string> out;
    if (n % 2 == 0) {
      for (int i = 1; i <= n / 2; ++i) {
        out.push_back("x" + std::to_string(i));
        out.push_back("y" + std::to_string(i));
      }
    } else {
      for (int i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
    }
    return out;
  }

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const { return coords_; }
  bool is_compact() const { return kind_ != Kind::Euclidean; }

  std::size_t coord_index(const std::string& name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == name) return i;
    throw MathError("unknown coordinate '" + name + "' on " + name_str());
  }

  std::string name_str() const {
    switch (kind_) {
      case Kind::Torus: return "T" + std::to_string(dim());
      case Kind::Sphere2: return "S2";
      case Kind::Euclidean: return "R" + std::to_string(dim());
    }
    return "?";
  }

  friend bool operator==(const Manifold& a, const Manifold& b) = default;

 private:
  Manifold(Kind k, std::vector<std::string> names) : kind_(k), coords_(std::move(names)) {
    if (coords_.empty()) throw MathError("manifold dimension must be >= 1");
    if (kind_ == Kind::Sphere2 && coords_.size() != 2) throw MathError("sphere must be two-dimensional");
  }

  Kind kind_ = Kind::Euclidean;
  std::vector<std::string> coords_;
};

}  // namespace starlb
