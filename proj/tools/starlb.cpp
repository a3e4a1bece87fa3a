#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "starlb/charindex/index.hpp"
#include "starlb/exactalg/random.hpp"
#include "starlb/io/json.hpp"
#include "starlb/locbundle/bundle.hpp"
#include "starlb/locbundle/connection.hpp"
#include "starlb/starprod/associativity.hpp"
#include "starlb/starprod/gauge.hpp"
#include "starlb/starprod/trace.hpp"

using namespace starlb;
using io::json;

namespace {

// Thrown when reading a descriptor file fails.
struct Unreadable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Unreadable("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what(), "");
  }
}

// Inline JSON when the argument looks like it, otherwise a file path.
json json_arg(const std::string& arg, const std::string& flag) {
  std::size_t p = arg.find_first_not_of(" \t\n");
  if (p != std::string::npos && (arg[p] == '{' || arg[p] == '[')) {
    try {
      return json::parse(arg);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed JSON: ") + e.what(), flag);
    }
  }
  return read_json_file(arg);
}

template <typename F>
auto flag(const std::string& name, F&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(e.message(), name + (e.pointer().empty() ? "" : " " + e.pointer()));
  } catch (const MathError& e) {
    throw InputError(e.what(), name);
  }
}

Scalar scalar_flag(const std::string& text, const std::string& name) {
  return flag(name, [&] { return Scalar::parse(text); });
}

std::vector<int> int_list(const std::string& text, const std::string& name) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("expected a comma-separated integer list", name);
    }
  }
  if (out.empty()) throw InputError("expected a comma-separated integer list", name);
  return out;
}

json bool_map(const std::vector<std::pair<std::string, bool>>& checks) {
  json j = json::object();
  for (const auto& [k, v] : checks) j[k] = v;
  return j;
}

bool all_true(const json& checks) {
  for (const auto& [k, v] : checks.items())
    if (!v.get<bool>()) return false;
  return true;
}

json report(const std::string& command, json job, json result, json checks) {
  bool passed = all_true(checks);
  return json{{"command", command}, {"job", std::move(job)}, {"result", std::move(result)}, {"checks", std::move(checks)}, {"passed", passed}};
}

json string_list(const std::vector<std::string>& v) { return json(v); }

// ---- star ------------------------------------------------------------------

PoissonStructure standard_poisson(int dim) {
  if (dim < 2 || dim % 2) throw InputError("chart dimension must be even and positive", "--dim");
  return PoissonStructure::standard(dim / 2);
}

FormalSeries series_arg(const std::string& arg, const std::string& name, const PureStarProduct& S, int K) {
  json j = json_arg(arg, name);
  if (io::has(j, "coeffs")) {
    FormalSeries s = flag(name, [&] { return io::parse_series(j, ""); });
    FormalSeries out(K, S.vars());
    for (int k = 0; k <= std::min(K, s.order()); ++k) out[k] = flag(name, [&] { return S.poisson().on_chart(s[k]); });
    return out;
  }
  ChartFunction f = flag(name, [&] { return io::parse_function(j, "", S.vars()); });
  return flag(name, [&] { return S.lift(f, K); });
}

json star_mul(int dim, int K, const std::string& a, const std::string& b) {
  PureStarProduct S(standard_poisson(dim));
  if (K < 0 || K > PureStarProduct::kMaxOrder) throw InputError("K must lie in 0.." + std::to_string(PureStarProduct::kMaxOrder), "--K");
  FormalSeries A = series_arg(a, "--a", S, K), B = series_arg(b, "--b", S, K);
  // a ⋆ b with a series of lower order is padded by the lift above
  FormalSeries C = S.multiply(A, B);
  return report("star mul", json{{"dim", dim}, {"K", K}}, json{{"product", io::series_json(C)}}, json::object());
}

json star_assoc(int K, int samples, unsigned seed, const std::vector<int>& dims, int degree) {
  if (K < 0 || K > PureStarProduct::kMaxOrder) throw InputError("K must lie in 0.." + std::to_string(PureStarProduct::kMaxOrder), "--K");
  if (samples < 1) throw InputError("need at least one sample", "--samples");
  json per = json::array();
  int verified = K;
  bool ok = true;
  for (int d : dims) {
    PureStarProduct S(standard_poisson(d));
    std::mt19937 rng(seed + static_cast<unsigned>(d));
    std::vector<FunctionTriple> trip;
    for (int i = 0; i < samples; ++i)
      trip.push_back({gen::random_polynomial(rng, S.vars(), degree), gen::random_polynomial(rng, S.vars(), degree), gen::random_polynomial(rng, S.vars(), degree)});
    AssociativityReport r = check_associativity(S, trip, K);
    json viol = json::array();
    for (const auto& v : r.violations) viol.push_back(json{{"sample", v.sample}, {"order", v.order}, {"discrepancy", v.discrepancy.str()}});
    per.push_back(json{{"dim", d}, {"samples", r.samples}, {"verified_order", r.verified_order}, {"violations", viol}});
    verified = std::min(verified, r.verified_order);
    ok = ok && r.passed();
  }
  return report("star assoc-check", json{{"K", K}, {"samples", samples}, {"seed", seed}, {"dims", dims}, {"degree", degree}},
                json{{"verified_order", verified}, {"by_dim", per}}, bool_map({{"associative", ok}}));
}

json star_trace(int K, int samples, unsigned seed, const std::optional<std::string>& a) {
  PureStarProduct S(PoissonStructure::standard(1));
  if (K < 0 || K > PureStarProduct::kMaxOrder) throw InputError("K must lie in 0.." + std::to_string(PureStarProduct::kMaxOrder), "--K");
  json result = json::object();
  if (a) result["trace"] = io::series_json(star_trace(series_arg(*a, "--a", S, K), S));
  std::mt19937 rng(seed);
  int nonzero = 0;
  for (int i = 0; i < samples; ++i) {
    ChartFunction f = gen::random_trig(rng, S.vars(), 2, 3), g = gen::random_trig(rng, S.vars(), 2, 3);
    if (!star_trace(star_commutator(S.lift(f, K), S.lift(g, K), S), S).is_zero()) ++nonzero;
  }
  result["commutator_samples"] = samples;
  result["nonzero_commutator_traces"] = nonzero;
  return report("star trace", json{{"K", K}, {"samples", samples}, {"seed", seed}}, result, bool_map({{"traceless_commutators", nonzero == 0}}));
}

std::vector<ChartFunction> monomials(const std::vector<std::string>& xy, int deg) {
  std::vector<ChartFunction> out;
  for (int p = 0; p <= deg; ++p)
    for (int q = 0; p + q <= deg; ++q) out.push_back(ChartFunction::monomial(xy, {p, q}, Scalar(1)));
  return out;
}

json star_twist(int K, int samples, unsigned seed) {
  PureStarProduct S(PoissonStructure::standard(1));
  const auto& xy = S.vars();
  GaugeOperator T = GaugeOperator::from_corrections(xy, {DiffOperator::laplacian(xy)});
  auto tw = gauge_twist(S, T);
  std::mt19937 rng(seed);
  std::vector<FunctionTriple> trip;
  for (int i = 0; i < samples; ++i) trip.push_back({gen::random_polynomial(rng, xy, 3), gen::random_polynomial(rng, xy, 3), gen::random_polynomial(rng, xy, 3)});
  AssociativityReport r = check_associativity(tw, trip, K);
  const ChartFunction one = ChartFunction::constant(xy, Scalar(1));
  bool unit = true, bracket = true, order0 = true;
  auto mons = monomials(xy, 3);
  for (const auto& f : mons) {
    unit = unit && tw.multiply(tw.lift(one, K), tw.lift(f, K)) == tw.lift(f, K) && tw.multiply(tw.lift(f, K), tw.lift(one, K)) == tw.lift(f, K);
    for (const auto& g : mons) {
      bracket = bracket && antisymmetric_first_order(f, g, tw) == poisson_bracket(f, g, S.poisson());
      order0 = order0 && tw.multiply(tw.lift(f, 0), tw.lift(g, 0))[0] == f * g;
    }
  }
  return report("star twist", json{{"K", K}, {"samples", samples}, {"seed", seed}, {"gauge", "Id + t*Laplacian"}},
                json{{"verified_order", r.verified_order}, {"violations", r.violations.size()}, {"spanning_monomials", mons.size()}},
                bool_map({{"associative", r.passed()}, {"unit_preserved", unit}, {"order0_is_product", order0}, {"antisym_first_order_is_bracket", bracket}}));
}

// ---- circle ----------------------------------------------------------------

LocalCircleFunction circle_arg(const std::string& arg) {
  return flag("--input", [&] { return io::parse_circle(json_arg(arg, "--input"), ""); });
}

json circle_check(const std::string& input) {
  auto A = circle_arg(input);
  auto r = check_circle_cocycle(A);
  return report("circle check", json{{"phase", A.phase().str()}}, json{{"defect", io::function_json(r.defect)}, {"violations", string_list(r.violations)}},
                bool_map({{"cocycle", r.cocycle}, {"diagonal", r.diagonal}, {"inverse", r.inverse}, {"periodic", r.periodic}}));
}

json circle_oneform(const std::string& input) {
  auto A = circle_arg(input);
  DifferentialForm alpha = one_form_from_circle(A);
  return report("circle oneform", json{{"phase", A.phase().str()}}, json{{"alpha", io::form_json(alpha)}}, bool_map({{"closed", is_closed(alpha)}}));
}

json circle_class(const std::string& input) {
  auto A = circle_arg(input);
  auto periods = h1_class(A);
  json p = json::object();
  bool integral = true;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    p[A.base().coords()[i]] = io::scalar_json(periods[i]);
    integral = integral && periods[i].is_integer();
  }
  return report("circle class", json{{"phase", A.phase().str()}}, json{{"periods", p}, {"integral", integral}}, json::object());
}

// ---- llb -------------------------------------------------------------------

struct BundleJob {
  GoodCover cover;
  DifferentialForm omega;
  json echo;
};

BundleJob bundle_job(const std::string& theta, int grid, const std::optional<std::string>& cover, const std::optional<std::string>& omega) {
  const Manifold T2 = Manifold::torus(2);
  BundleJob job{cover ? flag("--cover", [&] { return io::parse_cover(json_arg(*cover, "--cover"), ""); }) : flag("--grid", [&] { return GoodCover::grid(2, grid); }),
                DifferentialForm(T2), json::object()};
  if (omega) {
    job.omega = flag("--omega", [&] { return io::parse_form(json_arg(*omega, "--omega"), "", T2); });
    job.echo["omega"] = job.omega.str();
  } else {
    job.omega = DifferentialForm::volume(T2, scalar_flag(theta, "--theta"));
    job.echo["theta"] = scalar_flag(theta, "--theta").str();
  }
  job.echo["cover"] = io::cover_json(job.cover);
  return job;
}

json cech_checks(const LocalLineBundle& L, const CechConnectionData& D, json& result) {
  auto cech = verify_cech(D);
  auto assoc = check_triple_associativity(L);
  auto glue = check_gluing_cocycle(L);
  auto unit = check_diagonal_unit(L, diagonal_unit(L));
  result["triple_associativity"] = json{{"cells", assoc.cells}, {"compared", assoc.compared}, {"violations", string_list(assoc.violations)}};
  result["cech_violations"] = string_list(cech.violations);
  result["honest_bundle"] = has_global_line_bundle(L);
  result["gluing_cocycle_violations"] = string_list(glue);
  return bool_map({{"cech_equations", cech.violations.empty()}, {"triple_associativity", assoc.violations.empty()},
                   {"diagonal_unit", unit.idempotent && unit.identity && unit.consistent}});
}

json chern_json(const CohomologyClass& c) {
  json periods = json::array();
  for (const auto& p : c.periods2()) periods.push_back(io::scalar_json(p));
  return json{{"representative", io::form_json(c.representative())}, {"periods", periods}, {"integral", c.degree2_integral()}};
}

json llb_build(const BundleJob& job, bool emit) {
  CechConnectionData D = flag("--cover", [&] { return solve_cech(job.omega, job.cover); });
  LocalLineBundle L = build_local_line_bundle(D);
  json result = json::object();
  json checks = cech_checks(L, D, result);
  bool grid = job.cover.grid_size().has_value();
  if (grid) {
    result["cycle_pairing"] = io::scalar_json(cycle_pairing(D));
    GluedConnection G = glue_multiplicative_connection(L, raised_cosine_partition(job.cover));
    L.attach_connection(G.a);
    DifferentialForm F = left_curvature(L);
    result["curvature"] = F.str();
    checks["connection_gluing"] = G.violations.empty();
    checks["curvature_is_omega"] = F == job.omega;
  }
  CohomologyClass c = chern_class(L);
  result["chern_class"] = chern_json(c);
  result["chern_integral"] = c.degree2_integral();
  if (!c.degree2_integral()) result["flags"] = json::array({"non-integral chern class"});
  // an integral class must come with an honest cocycle and vice versa
  checks["integrality_consistent"] = c.degree2_integral() == result["honest_bundle"].get<bool>();
  if (emit) result["data"] = io::cech_json(D);
  return report("llb build", job.echo, result, checks);
}

json llb_verify(const std::string& input) {
  // accepts a bare cech descriptor or a report written by llb build --emit-data
  CechConnectionData D = flag("--input", [&] {
    json j = json_arg(input, "--input");
    if (j.contains("result") && j["result"].contains("data")) return io::parse_cech(j["result"]["data"], "/result/data");
    return io::parse_cech(j, "");
  });
  json result = json::object();
  auto cech = verify_cech(D);
  if (!cech.violations.empty()) {
    result["cech_violations"] = string_list(cech.violations);
    return report("llb verify", json{{"cover", io::cover_json(D.cover)}}, result, bool_map({{"cech_equations", false}}));
  }
  LocalLineBundle L = build_local_line_bundle(D);
  json checks = cech_checks(L, D, result);
  result["chern_class"] = chern_json(chern_class(L));
  return report("llb verify", json{{"cover", io::cover_json(D.cover)}, {"omega", D.omega.str()}}, result, checks);
}

json llb_connection(const BundleJob& job, const std::vector<Rational>& strengths) {
  if (!job.cover.grid_size()) throw InputError("connections need a grid cover", "--cover");
  LocalLineBundle L = build_local_line_bundle(solve_cech(job.omega, job.cover));
  std::vector<GluedConnection> G;
  for (const auto& s : strengths) G.push_back(flag("--strengths", [&] { return glue_multiplicative_connection(L, raised_cosine_partition(job.cover, s)); }));
  json conns = json::array();
  bool glued = true;
  std::vector<DifferentialForm> chern;
  for (std::size_t i = 0; i < G.size(); ++i) {
    json a = json::array();
    for (const auto& f : G[i].a) a.push_back(f.str());
    conns.push_back(json{{"strength", rational_to_string(strengths[i])}, {"charts", a}, {"violations", string_list(G[i].violations)}});
    glued = glued && G[i].violations.empty();
    LocalLineBundle Li = L;
    Li.attach_connection(G[i].a);
    chern.push_back(chern_class(Li).representative());
  }
  json result{{"connections", conns}};
  bool same_chern = std::all_of(chern.begin(), chern.end(), [&](const DifferentialForm& c) { return c == chern[0]; });
  bool beta_ok = true;
  json betas = json::array();
  for (std::size_t i = 1; i < G.size(); ++i) {
    try {
      betas.push_back(connection_difference(G[0], G[i], L.coords()).str());
    } catch (const MathError& e) {
      beta_ok = false;
      betas.push_back(std::string("not a two-point difference: ") + e.what());
    }
  }
  result["beta"] = betas;
  result["chern_class"] = chern[0].str();
  json echo = job.echo;
  json st = json::array();
  for (const auto& s : strengths) st.push_back(rational_to_string(s));
  echo["strengths"] = st;
  return report("llb connection", echo, result, bool_map({{"glued", glued}, {"difference_is_two_point", beta_ok}, {"chern_class_independent", same_chern}}));
}

json llb_curvature(const BundleJob& job) {
  if (!job.cover.grid_size()) throw InputError("connections need a grid cover", "--cover");
  LocalLineBundle L = build_local_line_bundle(solve_cech(job.omega, job.cover));
  GluedConnection G = glue_multiplicative_connection(L, raised_cosine_partition(job.cover));
  L.attach_connection(G.a);
  DifferentialForm F = left_curvature(L);
  return report("llb curvature", job.echo, json{{"curvature", io::form_json(F)}}, bool_map({{"connection_gluing", G.violations.empty()}, {"curvature_is_omega", F == job.omega}}));
}

json llb_chern(const BundleJob& job) {
  LocalLineBundle L = build_local_line_bundle(solve_cech(job.omega, job.cover));
  CohomologyClass c = chern_class(L);
  return report("llb chern", job.echo, json{{"chern_class", chern_json(c)}}, bool_map({{"integral_iff_honest", c.degree2_integral() == has_global_line_bundle(L)}}));
}

// ---- index -----------------------------------------------------------------

DifferentialForm standard_omega(const Manifold& X, const Scalar& theta) {
  if (X.kind() == Manifold::Kind::Sphere2 || X.dim() == 2) return DifferentialForm::volume(X, theta);
  if (X.kind() != Manifold::Kind::Torus || X.dim() % 2) throw InputError("theta shorthand needs an even torus or S2", "--theta");
  DifferentialForm w(X);
  for (int i = 0; i < X.dim(); i += 2) w += DifferentialForm::basis(X, {X.coords()[static_cast<std::size_t>(i)], X.coords()[static_cast<std::size_t>(i + 1)]}, theta);
  return w;
}

// "d=2,e=5": d is the degree-0 part, e the top-degree coefficient; anything
// else is read as a symbol-class descriptor.
EllipticSymbolClass gamma_arg(const std::string& arg, const std::string& name, const Manifold& X) {
  if (arg.find('=') != std::string::npos && arg.find('{') == std::string::npos) {
    Scalar d, e;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw InputError("expected d=<int>,e=<scalar>", name);
      std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      if (key == "d") d = scalar_flag(val, name);
      else if (key == "e") e = scalar_flag(val, name);
      else throw InputError("unknown key '" + key + "' (expected d or e)", name);
    }
    return flag(name, [&] { return EllipticSymbolClass(1, 1, DifferentialForm::constant(X, d) + DifferentialForm::volume(X, e)); });
  }
  return flag(name, [&] { return io::parse_symbol_class(json_arg(arg, name), "", X); });
}

DifferentialForm omega_arg(const Manifold& X, const std::string& theta, const std::optional<std::string>& omega) {
  if (omega) return flag("--omega", [&] { return io::parse_form(json_arg(*omega, "--omega"), "", X); });
  return standard_omega(X, scalar_flag(theta, "--theta"));
}

json index_compute(const std::string& manifold, const std::string& gamma, const std::string& theta, const std::optional<std::string>& omega) {
  Manifold X = flag("--manifold", [&] { return Manifold::parse(manifold); });
  auto a = gamma_arg(gamma, "--gamma", X);
  DifferentialForm w = omega_arg(X, theta, omega);
  IndexResult r = flag("--omega", [&] { return twisted_index(a, w, X); });
  json by = json::object();
  for (const auto& [k, v] : r.by_degree) by[std::to_string(k)] = io::scalar_json(v);
  return report("index compute", json{{"manifold", X.name_str()}, {"gamma", a.gamma.str()}, {"omega", w.str()}},
                json{{"value", io::scalar_json(r.value)}, {"integer", r.value.is_integer()}, {"by_degree", by}}, json::object());
}

json equality(const std::string& cmd, json echo, const EqualityReport& r) {
  return report(cmd, std::move(echo), json{{"lhs", io::scalar_json(r.lhs)}, {"rhs", io::scalar_json(r.rhs)}}, bool_map({std::pair<std::string, bool>{"equal", r.passed()}}));
}

json index_mult(const std::string& manifold, const std::string& g1, const std::string& g2, const std::string& theta, const std::optional<std::string>& omega) {
  Manifold X = flag("--manifold", [&] { return Manifold::parse(manifold); });
  auto a1 = gamma_arg(g1, "--gamma1", X), a2 = gamma_arg(g2, "--gamma2", X);
  DifferentialForm w = omega_arg(X, theta, omega);
  return equality("index multiplicativity", json{{"manifold", X.name_str()}, {"gamma1", a1.gamma.str()}, {"gamma2", a2.gamma.str()}, {"omega", w.str()}},
                  flag("--gamma2", [&] { return check_log_multiplicativity(a1, a2, w, X); }));
}

json index_homotopy(const std::string& manifold, const std::string& gamma, const std::string& theta, const std::optional<std::string>& omega,
                    const std::string& primitive, const std::string& target) {
  Manifold X = flag("--manifold", [&] { return Manifold::parse(manifold); });
  auto a = gamma_arg(gamma, "--gamma", X);
  DifferentialForm w = omega_arg(X, theta, omega);
  Perturbation p{Perturbation::Target::Gamma, flag("--primitive", [&] { return io::parse_form(json_arg(primitive, "--primitive"), "", X); }), std::nullopt};
  if (target == "gamma") p.target = Perturbation::Target::Gamma;
  else if (target == "omega") p.target = Perturbation::Target::Omega;
  else throw InputError("target must be gamma or omega", "--target");
  return equality("index homotopy", json{{"manifold", X.name_str()}, {"gamma", a.gamma.str()}, {"omega", w.str()}, {"primitive", p.primitive.str()}, {"target", target}},
                  flag("--primitive", [&] { return check_homotopy_invariance(a, w, X, p); }));
}

json index_tensor(const std::string& gamma, const std::string& m) {
  const Manifold T2 = Manifold::torus(2);
  auto a = gamma_arg(gamma, "--gamma", T2);
  Scalar ms = scalar_flag(m, "--m");
  if (!ms.is_rational()) throw InputError("m must be rational", "--m");
  return equality("index tensor-consistency", json{{"gamma", a.gamma.str()}, {"m", ms.str()}}, flag("--m", [&] { return check_tensor_consistency(a, ms.rational_value()); }));
}

// ---- toeplitz --------------------------------------------------------------

// "0:2,1:1,-1:0:1/2" (mode:re[:im]) or a descriptor.
CircleSymbol symbol_arg(const std::string& arg, const std::string& name) {
  std::size_t p = arg.find_first_not_of(" \t");
  if (p != std::string::npos && arg[p] != '{' && arg.find(':') != std::string::npos) {
    std::map<int, ComplexScalar> modes;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::vector<std::string> parts;
      std::stringstream is(item);
      std::string part;
      while (std::getline(is, part, ':')) parts.push_back(part);
      if (parts.size() < 2 || parts.size() > 3) throw InputError("expected mode:re[:im]", name);
      int m = int_list(parts[0], name).at(0);
      ComplexScalar c(scalar_flag(parts[1], name), parts.size() == 3 ? scalar_flag(parts[2], name) : Scalar());
      modes[m] += c;
    }
    return CircleSymbol::from_modes(modes);
  }
  return flag(name, [&] { return io::parse_circle_symbol(json_arg(arg, name), ""); });
}

json toeplitz_matrix_cmd(const std::string& sym, int N) {
  CircleSymbol f = symbol_arg(sym, "--symbol");
  ToeplitzMatrix T = flag("--N", [&] { return toeplitz_matrix(f, N); });
  json bands = json::object();
  for (const auto& [d, c] : T.bands()) bands[std::to_string(d)] = io::complex_json(c);
  json rows = json::array();
  if (T.size() <= 16)
    for (int j = 0; j < T.size(); ++j) {
      json row = json::array();
      for (int k = 0; k < T.size(); ++k) row.push_back(T.entry(j, k).str());
      rows.push_back(row);
    }
  json result{{"size", T.size()}, {"bands", bands}};
  if (!rows.empty()) result["entries"] = rows;
  return report("toeplitz matrix", json{{"symbol", f.function().str()}, {"N", N}}, result,
                bool_map({{"adjoint_is_conjugate_symbol", T.adjoint() == toeplitz_matrix(f.conj(), N)}, {"projector_idempotent", HardyTruncation{N}.idempotent(N + f.bandwidth())}}));
}

json hardy_json(const HardyIndex& h) {
  return json{{"value", h.value}, {"nearest_integer", std::lround(h.value)}, {"margin", h.margin.margin()}, {"sampled_min_modulus", h.margin.sampled_min},
              {"parametrix", h.method}, {"parametrix_tail", h.tail}};
}

json toeplitz_index(const std::string& sym, int N, int M, double tol) {
  CircleSymbol f = symbol_arg(sym, "--symbol");
  HardyIndex h = flag("--symbol", [&] { return hardy_index(f, N, M); });
  return report("toeplitz index", json{{"symbol", f.function().str()}, {"N", N}, {"M", M}, {"tol", tol}}, hardy_json(h),
                bool_map({{"near_integer", std::abs(h.value - std::round(h.value)) < tol}}));
}

json toeplitz_additivity(const std::string& s1, const std::string& s2, int N, int M, double tol) {
  CircleSymbol f1 = symbol_arg(s1, "--f1"), f2 = symbol_arg(s2, "--f2");
  HardyAdditivity a = flag("--f1", [&] { return hardy_index_additivity(f1, f2, N, M); });
  return report("toeplitz additivity", json{{"f1", f1.function().str()}, {"f2", f2.function().str()}, {"N", N}, {"M", M}, {"tol", tol}},
                json{{"product", a.product}, {"first", a.first}, {"second", a.second}, {"defect", a.defect()}}, bool_map({{"additive", a.defect() < tol}}));
}

// ---- berezin ---------------------------------------------------------------

// "a,b,c" for z^a zb^b/(1+u)^c, or a descriptor.
BerezinFunction berezin_arg(const std::string& arg, const std::string& name) {
  std::size_t p = arg.find_first_not_of(" \t");
  if (p != std::string::npos && arg[p] != '{' && arg.find(',') != std::string::npos) {
    auto v = int_list(arg, name);
    if (v.size() != 3) throw InputError("expected a,b,c", name);
    return flag(name, [&] { return BerezinFunction::monomial(v[0], v[1], v[2]); });
  }
  return flag(name, [&] { return io::parse_berezin(json_arg(arg, name), ""); });
}

json berezin_matrix_cmd(const std::string& fn, int k) {
  BerezinFunction f = berezin_arg(fn, "--function");
  BerezinMatrix M = flag("--k", [&] { return berezin_matrix(f, k); });
  json gram = json::array(), entries = json::array();
  for (const auto& g : M.gram) gram.push_back(rational_to_string(g));
  for (const auto& [jl, c] : M.exact) entries.push_back(json{{"row", jl.first}, {"col", jl.second}, {"S", c.str()}, {"orthonormal", json{{"re", M.matrix(jl.first, jl.second).real()}, {"im", M.matrix(jl.first, jl.second).imag()}}}});
  json checks = json::object();
  if (f.is_real()) checks["hermitian"] = M.is_hermitian();
  return report("berezin matrix", json{{"function", f.str()}, {"k", k}},
                json{{"dimension", k + 1}, {"bands", M.bands()}, {"diagonal", M.is_diagonal()}, {"operator_norm", operator_norm(M.matrix)}, {"gram", gram}, {"entries", entries}}, checks);
}

json berezin_decay(const io::Sweep& s, const std::optional<double>& max_slope) {
  DecayReport r = commutator_decay(s.f, s.g, s.ks);
  json norms = json::array();
  for (std::size_t i = 0; i < r.ks.size(); ++i) norms.push_back(json{{"k", r.ks[i]}, {"D", r.norms[i]}});
  json result{{"bracket", io::berezin_json(r.bracket)}, {"sign", r.sign}, {"identically_zero", r.identically_zero}, {"norms", norms}};
  result["slope"] = r.slope ? json(*r.slope) : json(nullptr);
  json checks = json::object();
  if (max_slope) checks["slope_bound"] = r.identically_zero || (r.slope && *r.slope <= *max_slope);
  json echo{{"f", s.f.str()}, {"g", s.g.str()}, {"k_range", {s.ks.front(), s.ks.back()}}};
  if (max_slope) echo["max_slope"] = *max_slope;
  return report("berezin decay", echo, result, checks);
}

// ---- validate --------------------------------------------------------------

json validate(const std::string& path) {
  json doc = read_json_file(path);
  try {
    std::string kind = io::validate_descriptor(doc);
    return report("validate", json{{"path", path}}, json{{"kind", kind}, {"errors", json::array()}}, bool_map({{"valid", true}}));
  } catch (const InputError& e) {
    return report("validate", json{{"path", path}}, json{{"errors", json::array({json{{"pointer", e.pointer()}, {"message", e.message()}}})}}, bool_map({{"valid", false}}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact star products, local line bundles, twisted indices and Toeplitz sandboxes"};
  app.require_subcommand(1);
  std::string output;
  app.add_option("-o,--output", output, "write the JSON report here instead of stdout");

  std::function<json()> job;
  auto leaf = [&](CLI::App* group, const std::string& name, const std::string& desc) {
    CLI::App* c = group->add_subcommand(name, desc);
    return c;
  };

  // star
  auto* star = app.add_subcommand("star", "pure star products")->require_subcommand(1);
  int dim = 2, K_mul = 2, K_assoc = 5, K_trace = 5, K_twist = 4, samples = 20, twist_samples = 10, degree = 3;
  unsigned seed = 1;
  std::string a, b, dims = "2,4";
  std::optional<std::string> trace_a;
  {
    auto* c = leaf(star, "mul", "a*b through order K");
    c->add_option("--dim", dim, "chart dimension (even)");
    c->add_option("--K", K_mul, "truncation order");
    c->add_option("--a", a, "function or series (JSON or file)")->required();
    c->add_option("--b", b, "function or series (JSON or file)")->required();
    c->callback([&] { job = [&] { return star_mul(dim, K_mul, a, b); }; });
  }
  {
    auto* c = leaf(star, "assoc-check", "associativity on random polynomial triples");
    c->add_option("--K", K_assoc, "truncation order");
    c->add_option("--samples", samples, "triples per dimension");
    c->add_option("--seed", seed);
    c->add_option("--dims", dims, "comma-separated chart dimensions");
    c->add_option("--degree", degree, "maximal polynomial degree");
    c->callback([&] { job = [&] { return star_assoc(K_assoc, samples, seed, int_list(dims, "--dims"), degree); }; });
  }
  {
    auto* c = leaf(star, "trace", "formal trace; checks Tr[a,b] = 0 on random trig pairs");
    c->add_option("--K", K_trace);
    c->add_option("--samples", samples);
    c->add_option("--seed", seed);
    c->add_option("--a", trace_a, "function or series to trace");
    c->callback([&] { job = [&] { return star_trace(K_trace, samples, seed, trace_a); }; });
  }
  {
    auto* c = leaf(star, "twist", "gauge twist by Id + t*Laplacian");
    c->add_option("--K", K_twist);
    c->add_option("--samples", twist_samples);
    c->add_option("--seed", seed);
    c->callback([&] { job = [&] { return star_twist(K_twist, twist_samples, seed); }; });
  }

  // circle
  auto* circle = app.add_subcommand("circle", "local circle functions")->require_subcommand(1);
  std::string input;
  for (auto [name, desc, fn] : std::vector<std::tuple<std::string, std::string, json (*)(const std::string&)>>{
           {"check", "cocycle, diagonal and inverse identities", circle_check},
           {"oneform", "extract the closed 1-form", circle_oneform},
           {"class", "periods of the H1 class", circle_class}}) {
    auto* c = leaf(circle, name, desc);
    c->add_option("--input", input, "circle descriptor (JSON or file)")->required();
    c->callback([&, fn] { job = [&, fn] { return fn(input); }; });
  }

  // llb
  auto* llb = app.add_subcommand("llb", "local line bundles")->require_subcommand(1);
  std::string theta = "0", strengths = "9/10,1/2";
  int grid = 3;
  std::optional<std::string> cover, omega;
  bool emit = false;
  auto bundle_opts = [&](CLI::App* c) {
    c->add_option("--theta", theta, "omega = theta dx^dy");
    c->add_option("--grid", grid, "g x g cover");
    c->add_option("--cover", cover, "cover descriptor");
    c->add_option("--omega", omega, "closed 2-form descriptor (overrides --theta)");
  };
  {
    auto* c = leaf(llb, "build", "solve the Cech equations and check the bundle");
    bundle_opts(c);
    c->add_flag("--emit-data", emit, "include the Cech data in the report");
    c->callback([&] { job = [&] { return llb_build(bundle_job(theta, grid, cover, omega), emit); }; });
  }
  {
    auto* c = leaf(llb, "verify", "check supplied Cech data");
    c->add_option("--input", input, "cech descriptor")->required();
    c->callback([&] { job = [&] { return llb_verify(input); }; });
  }
  {
    auto* c = leaf(llb, "connection", "glued connections for several partitions of unity");
    bundle_opts(c);
    c->add_option("--strengths", strengths, "comma-separated partition strengths in (0, 1]");
    c->callback([&] {
      job = [&] {
        std::vector<Rational> st;
        std::stringstream ss(strengths);
        std::string item;
        while (std::getline(ss, item, ',')) {
          Scalar s = scalar_flag(item, "--strengths");
          if (!s.is_rational()) throw InputError("strengths must be rational", "--strengths");
          st.push_back(s.rational_value());
        }
        if (st.empty()) throw InputError("need at least one strength", "--strengths");
        return llb_connection(bundle_job(theta, grid, cover, omega), st);
      };
    });
  }
  {
    auto* c = leaf(llb, "curvature", "left curvature of the glued connection");
    bundle_opts(c);
    c->callback([&] { job = [&] { return llb_curvature(bundle_job(theta, grid, cover, omega)); }; });
  }
  {
    auto* c = leaf(llb, "chern", "Chern class and integrality");
    bundle_opts(c);
    c->callback([&] { job = [&] { return llb_chern(bundle_job(theta, grid, cover, omega)); }; });
  }

  // index
  auto* index = app.add_subcommand("index", "twisted index pairing")->require_subcommand(1);
  std::string manifold = "T2", gamma = "d=1,e=0", gamma2 = "d=1,e=0", primitive, target = "gamma", m = "1";
  auto index_opts = [&](CLI::App* c) {
    c->add_option("--manifold", manifold, "T2, T4, S2, ...");
    c->add_option("--theta", theta, "omega = theta times the standard symplectic form");
    c->add_option("--omega", omega, "twist 2-form descriptor (overrides --theta)");
  };
  {
    auto* c = leaf(index, "compute", "integral of gamma Td exp(omega/2pi)");
    index_opts(c);
    c->add_option("--gamma", gamma, "d=<int>,e=<scalar> or symbol-class descriptor");
    c->callback([&] { job = [&] { return index_compute(manifold, gamma, theta, omega); }; });
  }
  {
    auto* c = leaf(index, "multiplicativity", "index of a composite equals the sum");
    index_opts(c);
    c->add_option("--gamma1", gamma)->required();
    c->add_option("--gamma2", gamma2)->required();
    c->callback([&] { job = [&] { return index_mult(manifold, gamma, gamma2, theta, omega); }; });
  }
  {
    auto* c = leaf(index, "homotopy", "exact perturbations leave the index alone");
    index_opts(c);
    c->add_option("--gamma", gamma);
    c->add_option("--primitive", primitive, "form whose d is added")->required();
    c->add_option("--target", target, "gamma or omega");
    c->callback([&] { job = [&] { return index_homotopy(manifold, gamma, theta, omega, primitive, target); }; });
  }
  {
    auto* c = leaf(index, "tensor-consistency", "integral twist equals the honest tensor product");
    c->add_option("--gamma", gamma);
    c->add_option("--m", m, "omega = 2 pi m dx^dy");
    c->callback([&] { job = [&] { return index_tensor(gamma, m); }; });
  }

  // toeplitz
  auto* toe = app.add_subcommand("toeplitz", "Hardy-space Toeplitz operators on the circle")->require_subcommand(1);
  std::string symbol = "0:1", f1, f2;
  int N = 512, M = 256, N_matrix = 8;
  double tol = 1e-6;
  {
    auto* c = leaf(toe, "matrix", "banded compression");
    c->add_option("--symbol", symbol, "mode:re[:im],... or descriptor")->required();
    c->add_option("--N", N_matrix);
    c->callback([&] { job = [&] { return toeplitz_matrix_cmd(symbol, N_matrix); }; });
  }
  {
    auto* c = leaf(toe, "index", "stabilized trace-difference index");
    c->add_option("--symbol", symbol)->required();
    c->add_option("--N", N);
    c->add_option("--M", M);
    c->add_option("--tol", tol);
    c->callback([&] { job = [&] { return toeplitz_index(symbol, N, M, tol); }; });
  }
  {
    auto* c = leaf(toe, "additivity", "ind(f1 f2) = ind f1 + ind f2");
    c->add_option("--f1", f1)->required();
    c->add_option("--f2", f2)->required();
    c->add_option("--N", N);
    c->add_option("--M", M);
    c->add_option("--tol", tol);
    c->callback([&] { job = [&] { return toeplitz_additivity(f1, f2, N, M, tol); }; });
  }

  // berezin
  auto* ber = app.add_subcommand("berezin", "Berezin-Toeplitz matrices on CP1")->require_subcommand(1);
  std::string function, fg_f, fg_g, k_range = "8,64";
  int k = 8;
  std::optional<double> max_slope;
  {
    auto* c = leaf(ber, "matrix", "level-k matrix of z^a zb^b/(1+u)^c combinations");
    c->add_option("--function", function, "a,b,c or descriptor")->required();
    c->add_option("--k", k);
    c->callback([&] { job = [&] { return berezin_matrix_cmd(function, k); }; });
  }
  {
    auto* c = leaf(ber, "decay", "norm of k[T_f,T_g] - s i T_{f,g} across levels");
    c->add_option("--input", input, "sweep descriptor");
    c->add_option("--f", fg_f, "a,b,c or descriptor");
    c->add_option("--g", fg_g, "a,b,c or descriptor");
    c->add_option("--k-range", k_range, "lo,hi");
    c->add_option("--max-slope", max_slope, "fail when the fitted slope is above this");
    c->callback([&] {
      job = [&] {
        io::Sweep s;
        if (!input.empty()) {
          s = flag("--input", [&] { return io::parse_sweep(json_arg(input, "--input"), ""); });
        } else {
          if (fg_f.empty() || fg_g.empty()) throw InputError("need --input or both --f and --g", "--f");
          auto r = int_list(k_range, "--k-range");
          if (r.size() != 2 || r[0] < 1 || r[1] < r[0]) throw InputError("expected lo,hi with 1 <= lo <= hi", "--k-range");
          s.f = berezin_arg(fg_f, "--f");
          s.g = berezin_arg(fg_g, "--g");
          for (int q = r[0]; q <= r[1]; ++q) s.ks.push_back(q);
        }
        return berezin_decay(s, max_slope);
      };
    });
  }

  // validate
  {
    auto* c = app.add_subcommand("validate", "schema-check a descriptor without running it");
    c->add_option("path", input, "descriptor file")->required();
    c->callback([&] { job = [&] { return validate(input); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  json out;
  int code = 0;
  try {
    out = job();
    code = out["passed"].get<bool>() ? 0 : 1;
  } catch (const InputError& e) {
    out = json{{"error", e.message()}, {"pointer", e.pointer()}};
    std::cerr << "input error: " << e.what() << "\n";
    code = 2;
  } catch (const Unreadable& e) {
    out = json{{"error", e.what()}};
    std::cerr << "input error: " << e.what() << "\n";
    code = 2;
  } catch (const MathError& e) {
    out = json{{"error", e.what()}};
    std::cerr << "precondition failed: " << e.what() << "\n";
    code = 2;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "elapsed " << secs << " s\n";

  std::string text = out.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(output);
    if (!f) {
      std::cerr << "cannot write '" << output << "'\n";
      return 2;
    }
    f << text;
  }
  return code;
}
