#pragma once

#include <json.hpp>

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "starlb/charindex/index.hpp"
#include "starlb/locbundle/cech.hpp"
#include "starlb/locbundle/circle.hpp"
#include "starlb/starprod/formal_series.hpp"
#include "starlb/toeplitz/berezin.hpp"
#include "starlb/toeplitz/hardy.hpp"

namespace starlb::io {

using json = nlohmann::ordered_json;

// ---- reading -------------------------------------------------------------

// Re-roots an error raised while parsing a sub-document at `ptr`.
template <typename F>
auto at(const std::string& ptr, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(e.message(), ptr + e.pointer());
  } catch (const MathError& e) {
    throw InputError(e.what(), ptr);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON value: ") + e.what(), ptr);
  }
}

inline const json& field(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.is_object()) throw InputError("expected an object", ptr);
  auto it = j.find(key);
  if (it == j.end()) throw InputError("missing required field '" + key + "'", ptr + "/" + key);
  return *it;
}

inline bool has(const json& j, const std::string& key) { return j.is_object() && j.contains(key); }

inline int get_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw InputError("expected an integer", ptr);
  return j.get<int>();
}

inline std::string get_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw InputError("expected a string", ptr);
  return j.get<std::string>();
}

// "3/7", "2*pi", "1/2 - pi^-1" or a JSON integer.
inline Scalar parse_scalar(const json& j, const std::string& ptr) {
  if (j.is_number_integer()) return Scalar(Rational(j.get<long long>()));
  if (!j.is_string()) throw InputError("expected a scalar string", ptr);
  return at(ptr, [&] { return Scalar::parse(j.get<std::string>()); });
}

inline Rational parse_rational_value(const json& j, const std::string& ptr) {
  Scalar s = parse_scalar(j, ptr);
  if (!s.is_rational()) throw InputError("expected a rational number", ptr);
  return s.rational_value();
}

// scalar, or {"re": scalar, "im": scalar}
inline ComplexScalar parse_complex(const json& j, const std::string& ptr) {
  if (j.is_object()) {
    ComplexScalar c;
    if (has(j, "re")) c.re = parse_scalar(j["re"], ptr + "/re");
    if (has(j, "im")) c.im = parse_scalar(j["im"], ptr + "/im");
    return c;
  }
  return parse_scalar(j, ptr);
}

inline std::vector<int> parse_int_list(const json& j, const std::string& ptr, std::size_t n) {
  if (!j.is_array()) throw InputError("expected an array of integers", ptr);
  if (j.size() != n) throw InputError("expected " + std::to_string(n) + " entries", ptr);
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

// {"vars": [...], "terms": [{"coeff": c, "exp": [...], "freq": [...]}]};
// a bare scalar is a constant function.
inline ChartFunction parse_function(const json& j, const std::string& ptr, const std::vector<std::string>& default_vars = {}) {
  if (!j.is_object()) return ChartFunction::constant(default_vars, parse_complex(j, ptr));
  std::vector<std::string> vars = default_vars;
  if (has(j, "vars")) {
    const json& v = j["vars"];
    if (!v.is_array()) throw InputError("expected an array of names", ptr + "/vars");
    vars.clear();
    for (std::size_t i = 0; i < v.size(); ++i) vars.push_back(get_string(v[i], ptr + "/vars/" + std::to_string(i)));
  } else if (default_vars.empty()) {
    throw InputError("missing required field 'vars'", ptr + "/vars");
  }
  ChartFunction f = at(ptr + "/vars", [&] { return ChartFunction(vars); });
  const json& terms = field(j, "terms", ptr);
  if (!terms.is_array()) throw InputError("expected an array of terms", ptr + "/terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = ptr + "/terms/" + std::to_string(t);
    const json& term = terms[t];
    ComplexScalar c = parse_complex(field(term, "coeff", tp), tp + "/coeff");
    std::vector<int> e(vars.size(), 0), k(vars.size(), 0);
    if (has(term, "exp")) e = parse_int_list(term["exp"], tp + "/exp", vars.size());
    if (has(term, "freq")) k = parse_int_list(term["freq"], tp + "/freq", vars.size());
    for (int x : e)
      if (x < 0) throw InputError("exponents must be nonnegative", tp + "/exp");
    f += at(tp, [&] { return ChartFunction::monomial(vars, e, c) * ChartFunction::fourier(vars, k, Scalar(1)); });
  }
  return f;
}

inline Manifold parse_manifold(const json& j, const std::string& ptr) {
  return at(ptr, [&] { return Manifold::parse(get_string(j, "")); });
}

// {"manifold": "T2", "terms": [{"d": ["x", "y"], "coeff": function or scalar}]}
inline DifferentialForm parse_form(const json& j, const std::string& ptr, const std::optional<Manifold>& fallback = std::nullopt) {
  if (!j.is_object()) throw InputError("expected a form object", ptr);
  Manifold m = has(j, "manifold") || !fallback ? parse_manifold(field(j, "manifold", ptr), ptr + "/manifold") : *fallback;
  DifferentialForm w(m);
  const json& terms = field(j, "terms", ptr);
  if (!terms.is_array()) throw InputError("expected an array of terms", ptr + "/terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = ptr + "/terms/" + std::to_string(t);
    const json& d = field(terms[t], "d", tp);
    if (!d.is_array()) throw InputError("expected an array of coordinate names", tp + "/d");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < d.size(); ++i) names.push_back(get_string(d[i], tp + "/d/" + std::to_string(i)));
    ChartFunction f = parse_function(field(terms[t], "coeff", tp), tp + "/coeff", m.coords());
    at(tp, [&] {
      DifferentialForm::Index idx;
      for (const auto& n : names) idx.push_back(static_cast<int>(m.coord_index(n)));
      w.add(idx, f);
      return 0;
    });
  }
  return w;
}

// {"K": 2, "vars": [...], "coeffs": [function, ...]}
inline FormalSeries parse_series(const json& j, const std::string& ptr) {
  const json& cs = field(j, "coeffs", ptr);
  if (!cs.is_array() || cs.empty()) throw InputError("expected a nonempty coefficient array", ptr + "/coeffs");
  std::vector<std::string> vars;
  if (has(j, "vars")) vars = parse_function(json{{"vars", j["vars"]}, {"terms", json::array()}}, ptr).vars();
  std::vector<ChartFunction> fs;
  for (std::size_t k = 0; k < cs.size(); ++k) fs.push_back(parse_function(cs[k], ptr + "/coeffs/" + std::to_string(k), vars));
  FormalSeries s(fs);
  if (has(j, "K")) {
    int K = get_int(j["K"], ptr + "/K");
    if (K < 0) throw InputError("truncation order must be nonnegative", ptr + "/K");
    if (K + 1 < static_cast<int>(fs.size())) return s.truncated(K);
    for (int k = static_cast<int>(fs.size()); k <= K; ++k) fs.push_back(ChartFunction(fs[0].vars()));
    return FormalSeries(fs);
  }
  return s;
}

// {"dim": 2, "grid": 3} or {"dim": 2, "charts": [{"center": [...], "halfwidth": [...]}], "lifts": {"0,1": [0, 0]}}
inline GoodCover parse_cover(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw InputError("expected a cover object", ptr);
  int dim = get_int(field(j, "dim", ptr), ptr + "/dim");
  if (has(j, "grid") && !has(j, "charts")) return at(ptr, [&] { return GoodCover::grid(dim, get_int(j["grid"], "/grid")); });
  const json& charts = field(j, "charts", ptr);
  if (!charts.is_array()) throw InputError("expected an array of charts", ptr + "/charts");
  std::vector<ChartBox> boxes;
  for (std::size_t c = 0; c < charts.size(); ++c) {
    const std::string cp = ptr + "/charts/" + std::to_string(c);
    ChartBox b;
    for (const char* key : {"center", "halfwidth"}) {
      const json& v = field(charts[c], key, cp);
      if (!v.is_array()) throw InputError("expected an array of rationals", cp + "/" + key);
      auto& dst = std::string(key) == "center" ? b.center : b.halfwidth;
      for (std::size_t i = 0; i < v.size(); ++i) dst.push_back(parse_rational_value(v[i], cp + "/" + key + "/" + std::to_string(i)));
    }
    boxes.push_back(std::move(b));
  }
  GoodCover cover = at(ptr, [&] { return GoodCover(dim, boxes); });
  if (has(j, "lifts")) {
    const json& l = j["lifts"];
    if (!l.is_object()) throw InputError("expected an object keyed by 'i,j'", ptr + "/lifts");
    std::map<std::pair<std::size_t, std::size_t>, Lattice> given;
    for (auto it = l.begin(); it != l.end(); ++it) {
      const std::string lp = ptr + "/lifts/" + it.key();
      std::size_t comma = it.key().find(',');
      std::size_t i = 0, k = 0;
      try {
        if (comma == std::string::npos) throw std::invalid_argument("no comma");
        i = std::stoul(it.key().substr(0, comma));
        k = std::stoul(it.key().substr(comma + 1));
      } catch (const std::exception&) {
        throw InputError("lift key must look like 'i,j'", lp);
      }
      auto n = parse_int_list(it.value(), lp, static_cast<std::size_t>(dim));
      given[{i, k}] = Lattice(n.begin(), n.end());
    }
    at(ptr, [&] {
      cover.require_lifts(given);
      return 0;
    });
  }
  return cover;
}

// {"manifold": "T2", "rankE": 1, "rankF": 1, "gamma": form}
inline EllipticSymbolClass parse_symbol_class(const json& j, const std::string& ptr, const std::optional<Manifold>& fallback = std::nullopt) {
  if (!j.is_object()) throw InputError("expected a symbol class object", ptr);
  std::optional<Manifold> m = fallback;
  if (has(j, "manifold")) m = parse_manifold(j["manifold"], ptr + "/manifold");
  int e = has(j, "rankE") ? get_int(j["rankE"], ptr + "/rankE") : 1;
  int f = has(j, "rankF") ? get_int(j["rankF"], ptr + "/rankF") : 1;
  DifferentialForm g = parse_form(field(j, "gamma", ptr), ptr + "/gamma", m);
  return at(ptr, [&] { return EllipticSymbolClass(e, f, g); });
}

// {"manifold": "T2", "phase": function of x#1, y#1, x#2, y#2, "radius": "1/4"}
inline LocalCircleFunction parse_circle(const json& j, const std::string& ptr) {
  Manifold m = parse_manifold(field(j, "manifold", ptr), ptr + "/manifold");
  ChartFunction phase = parse_function(field(j, "phase", ptr), ptr + "/phase", lifted_vars(m.coords(), 2));
  Rational r = has(j, "radius") ? parse_rational_value(j["radius"], ptr + "/radius") : Rational(1, 4);
  return at(ptr, [&] { return LocalCircleFunction(m, phase, r); });
}

// {"modes": {"0": "2", "1": "1"}} (values may be complex objects) or a function of one variable
inline CircleSymbol parse_circle_symbol(const json& j, const std::string& ptr) {
  if (has(j, "modes")) {
    const json& md = j["modes"];
    if (!md.is_object()) throw InputError("expected an object keyed by mode", ptr + "/modes");
    std::map<int, ComplexScalar> modes;
    for (auto it = md.begin(); it != md.end(); ++it) {
      int m = 0;
      try {
        std::size_t used = 0;
        m = std::stoi(it.key(), &used);
        if (used != it.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InputError("mode key must be an integer", ptr + "/modes/" + it.key());
      }
      modes[m] = parse_complex(it.value(), ptr + "/modes/" + it.key());
    }
    return CircleSymbol::from_modes(modes);
  }
  ChartFunction f = parse_function(j, ptr, {"x"});
  return at(ptr, [&] { return CircleSymbol(f); });
}

// {"C": 1, "terms": [{"a": 1, "b": 1, "coeff": "1"}]}
inline BerezinFunction parse_berezin(const json& j, const std::string& ptr) {
  int C = get_int(field(j, "C", ptr), ptr + "/C");
  if (C < 0) throw InputError("denominator exponent must be nonnegative", ptr + "/C");
  BerezinFunction f(C);
  const json& terms = field(j, "terms", ptr);
  if (!terms.is_array()) throw InputError("expected an array of terms", ptr + "/terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = ptr + "/terms/" + std::to_string(t);
    int a = get_int(field(terms[t], "a", tp), tp + "/a"), b = get_int(field(terms[t], "b", tp), tp + "/b");
    if (a < 0 || b < 0) throw InputError("exponents must be nonnegative", tp);
    ComplexScalar c = parse_complex(field(terms[t], "coeff", tp), tp + "/coeff");
    at(tp + "/coeff", [&] {
      f.add(a, b, c);
      return 0;
    });
  }
  return f;
}

struct Sweep {
  BerezinFunction f, g;
  std::vector<int> ks;
};

// {"f": berezin, "g": berezin, "k_range": [8, 64]}
inline Sweep parse_sweep(const json& j, const std::string& ptr) {
  Sweep s{parse_berezin(field(j, "f", ptr), ptr + "/f"), parse_berezin(field(j, "g", ptr), ptr + "/g"), {}};
  auto r = parse_int_list(field(j, "k_range", ptr), ptr + "/k_range", 2);
  if (r[0] < 1 || r[1] < r[0]) throw InputError("k_range must be [lo, hi] with 1 <= lo <= hi", ptr + "/k_range");
  for (int k = r[0]; k <= r[1]; ++k) s.ks.push_back(k);
  return s;
}

// ---- writing -------------------------------------------------------------

inline json scalar_json(const Scalar& s) { return json{{"exact", s.str()}, {"approx", s.to_double()}}; }

inline json complex_json(const ComplexScalar& c) {
  if (c.is_real()) return scalar_json(c.re);
  return json{{"exact", c.str()}, {"re", scalar_json(c.re)}, {"im", scalar_json(c.im)}};
}

inline json complex_value(const ComplexScalar& c) {
  if (c.is_real()) return c.re.str();
  return json{{"re", c.re.str()}, {"im", c.im.str()}};
}

inline json function_json(const ChartFunction& f) {
  json terms = json::array();
  for (const auto& [m, c] : f.terms()) {
    json t{{"coeff", complex_value(c)}};
    if (std::any_of(m.exp.begin(), m.exp.end(), [](int e) { return e != 0; })) t["exp"] = m.exp;
    if (std::any_of(m.freq.begin(), m.freq.end(), [](int e) { return e != 0; })) t["freq"] = m.freq;
    terms.push_back(t);
  }
  return json{{"vars", f.vars()}, {"terms", terms}, {"display", f.str()}};
}

inline json form_json(const DifferentialForm& w) {
  json terms = json::array();
  const auto& coords = w.manifold().coords();
  for (const auto& [idx, f] : w.terms()) {
    json d = json::array();
    for (int i : idx) d.push_back(coords[static_cast<std::size_t>(i)]);
    terms.push_back(json{{"d", d}, {"coeff", f.is_constant() ? complex_value(f.constant_term()) : function_json(f)}});
  }
  return json{{"manifold", w.manifold().name_str()}, {"terms", terms}, {"display", w.str()}};
}

inline json series_json(const FormalSeries& s) {
  json cs = json::array();
  for (const auto& c : s.coeffs()) cs.push_back(function_json(c));
  return json{{"K", s.order()}, {"coeffs", cs}, {"display", s.str()}};
}

inline json cover_json(const GoodCover& c) {
  if (c.grid_size()) return json{{"dim", c.dim()}, {"grid", *c.grid_size()}};
  json charts = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    json ce = json::array(), hw = json::array();
    for (const auto& q : c.charts()[i].center) ce.push_back(rational_to_string(q));
    for (const auto& q : c.charts()[i].halfwidth) hw.push_back(rational_to_string(q));
    charts.push_back(json{{"center", ce}, {"halfwidth", hw}});
  }
  return json{{"dim", c.dim()}, {"charts", charts}};
}

inline json berezin_json(const BerezinFunction& f) {
  json terms = json::array();
  for (const auto& [k, c] : f.numerator()) terms.push_back(json{{"a", k.first}, {"b", k.second}, {"coeff", complex_value(c)}});
  return json{{"C", f.denominator()}, {"terms", terms}, {"display", f.str()}};
}

inline std::string pair_key(std::size_t i, std::size_t j) { return std::to_string(i) + "," + std::to_string(j); }

// Čech data round trip: {"cover", "omega", "alpha": [form], "phi": {"i,j": function}, "phi3": {"i,j,k": scalar}}
inline json cech_json(const CechConnectionData& D) {
  json alpha = json::array(), phi = json::object(), phi3 = json::object();
  for (const auto& a : D.alpha) alpha.push_back(form_json(a));
  for (const auto& [ij, f] : D.phi) phi[pair_key(ij.first, ij.second)] = function_json(f);
  for (const auto& [t, c] : D.phi3) phi3[pair_key(t[0], t[1]) + "," + std::to_string(t[2])] = c.str();
  return json{{"kind", "cech"}, {"cover", cover_json(D.cover)}, {"omega", form_json(D.omega)}, {"alpha", alpha}, {"phi", phi}, {"phi3", phi3}};
}

inline std::vector<std::size_t> parse_index_key(const std::string& key, std::size_t n, const std::string& ptr) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  try {
    while (true) {
      std::size_t comma = key.find(',', pos);
      std::string part = key.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      std::size_t used = 0;
      out.push_back(std::stoul(part, &used));
      if (used != part.size()) throw std::invalid_argument("trailing");
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } catch (const std::exception&) {
    throw InputError("malformed chart index key", ptr);
  }
  if (out.size() != n) throw InputError("expected " + std::to_string(n) + " chart indices", ptr);
  return out;
}

inline CechConnectionData parse_cech(const json& j, const std::string& ptr) {
  GoodCover cover = parse_cover(field(j, "cover", ptr), ptr + "/cover");
  DifferentialForm omega = parse_form(field(j, "omega", ptr), ptr + "/omega");
  const Manifold chart = chart_manifold(omega.manifold().dim());
  CechConnectionData D{cover, omega, {}, {}, {}};
  const json& alpha = field(j, "alpha", ptr);
  if (!alpha.is_array()) throw InputError("expected one form per chart", ptr + "/alpha");
  for (std::size_t i = 0; i < alpha.size(); ++i) D.alpha.push_back(parse_form(alpha[i], ptr + "/alpha/" + std::to_string(i), chart));
  const json& phi = field(j, "phi", ptr);
  if (!phi.is_object()) throw InputError("expected an object keyed by 'i,j'", ptr + "/phi");
  for (auto it = phi.begin(); it != phi.end(); ++it) {
    auto ij = parse_index_key(it.key(), 2, ptr + "/phi/" + it.key());
    D.phi[{ij[0], ij[1]}] = parse_function(it.value(), ptr + "/phi/" + it.key(), chart.coords());
  }
  const json& phi3 = field(j, "phi3", ptr);
  if (!phi3.is_object()) throw InputError("expected an object keyed by 'i,j,k'", ptr + "/phi3");
  for (auto it = phi3.begin(); it != phi3.end(); ++it) {
    auto t = parse_index_key(it.key(), 3, ptr + "/phi3/" + it.key());
    D.phi3[{t[0], t[1], t[2]}] = parse_scalar(it.value(), ptr + "/phi3/" + it.key());
  }
  return D;
}

// Parses a descriptor by its "kind" without running anything.
inline std::string validate_descriptor(const json& j) {
  const std::string kind = get_string(field(j, "kind", ""), "/kind");
  if (kind == "function") parse_function(j, "");
  else if (kind == "form") parse_form(j, "");
  else if (kind == "series") parse_series(j, "");
  else if (kind == "cover") parse_cover(j, "");
  else if (kind == "symbol_class") parse_symbol_class(j, "");
  else if (kind == "circle") parse_circle(j, "");
  else if (kind == "circle_symbol") parse_circle_symbol(j, "");
  else if (kind == "berezin_function") parse_berezin(j, "");
  else if (kind == "sweep") parse_sweep(j, "");
  else if (kind == "cech") parse_cech(j, "");
  else throw InputError("unknown descriptor kind '" + kind + "'", "/kind");
  return kind;
}

}  // namespace starlb::io
