#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "symflow/json_io.hpp"
#include "symflow/model.hpp"
#include "symflow/suites.hpp"

namespace symflow {

enum class Outcome { Pass = 0, IdentityFailure = 1, InputError = 2, ResolutionFailure = 3 };

inline int exit_code(Outcome o) { return static_cast<int>(o); }

// Worst of two outcomes for the process exit code.
inline Outcome worse(Outcome a, Outcome b) {
  auto rank = [](Outcome o) {
    switch (o) {
      case Outcome::Pass: return 0;
      case Outcome::IdentityFailure: return 1;
      case Outcome::ResolutionFailure: return 2;
      case Outcome::InputError: return 3;
    }
    return 0;
  };
  return rank(a) >= rank(b) ? a : b;
}

// Violated preconditions on the inputs count as input errors.
inline Outcome outcome_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::SchemaError:
    case ErrorKind::InvalidGamma:
    case ErrorKind::UnbalancedEigenspaces:
    case ErrorKind::NotLagrangian:
    case ErrorKind::NotUnitary:
    case ErrorKind::NotHermitian:
    case ErrorKind::NotCoisotropic:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::AnticommutationFailure:
    case ErrorKind::AsymmetricSpectrum:
    case ErrorKind::IncompatibleBoundary:
    case ErrorKind::ResonanceViolation:
      return Outcome::InputError;
    case ErrorKind::RefinementExhausted:
    case ErrorKind::ConvergenceTooSlow:
      return Outcome::ResolutionFailure;
    default:
      return Outcome::IdentityFailure;
  }
}

struct Scenario {
  std::string name;
  std::string op;
  Json inputs = Json::object();
  std::optional<std::uint64_t> seed;
  double tol = default_tol();
  double eta_tol = 5e-3;
};

struct ScenarioResult {
  Json report;
  Outcome outcome = Outcome::Pass;
};

inline const std::vector<std::string>& scenario_ops() {
  static const std::vector<std::string> ops{
      "phi",         "intersection_dim", "m_H",          "m",          "tsig",           "tau_mu",       "tau_w",
      "conversion",  "triple_relations", "wind",         "wind_inverse",   "maslov",       "spectral_flow",
      "eta",         "model_spectrum",   "model_cauchy", "model_stretch",  "model_glue",   "model_caldconst",
      "model_modz",  "suite"};
  return ops;
}

inline Scenario parse_scenario(const Json& j, const std::string& where, double tol_override = -1.0) {
  require_keys(j, where, {"name", "op", "inputs", "seed", "tolerances"});
  Scenario s;
  const Json& op = field(j, "op", where);
  if (!op.is_string()) throw schema_error(where + ".op", "expected a string");
  s.op = op.get<std::string>();
  const auto& ops = scenario_ops();
  if (std::find(ops.begin(), ops.end(), s.op) == ops.end()) throw schema_error(where + ".op", "unknown operation '" + s.op + "'");
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw schema_error(where + ".name", "expected a string");
    s.name = j["name"].get<std::string>();
  } else {
    s.name = s.op;
  }
  if (j.contains("inputs")) {
    if (!j["inputs"].is_object()) throw schema_error(where + ".inputs", "expected an object");
    s.inputs = j["inputs"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) throw schema_error(where + ".seed", "expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    require_keys(t, where + ".tolerances", {"tol", "eta"});
    s.tol = number_or(t, "tol", s.tol, where + ".tolerances");
    s.eta_tol = number_or(t, "eta", s.eta_tol, where + ".tolerances");
    if (!(s.tol > 0) || !(s.eta_tol > 0)) throw schema_error(where + ".tolerances", "tolerances must be positive");
  }
  if (tol_override > 0) s.tol = tol_override;
  return s;
}

namespace scenario_detail {

struct Ctx {
  const Scenario& sc;
  Json values = Json::object();
  Json residues = Json::object();
  Json log = Json::object();
  Json checks = Json::array();

  std::string at(const std::string& key) const { return sc.name + ".inputs." + key; }
  const Json& in(const std::string& key) const { return field(sc.inputs, key, sc.name + ".inputs"); }
  bool has(const std::string& key) const { return sc.inputs.contains(key); }
  void check(const std::string& identity, bool pass) { checks.push_back(Json{{"identity", identity}, {"pass", pass}}); }
  void allow(std::initializer_list<const char*> keys) const { require_keys(sc.inputs, sc.name + ".inputs", keys); }

  // Explicit "space", else the first Lagrangian that names one.
  SpacePtr space() const {
    if (has("space")) return parse_space(in("space"), at("space"), sc.tol);
    if (const Json* found = find_space(sc.inputs)) return parse_space(*found, sc.name + ".inputs", sc.tol);
    throw schema_error(sc.name + ".inputs", "no symplectic space given: add 'space' or a Lagrangian with 'space'");
  }
  static const Json* find_space(const Json& j) {
    if (j.is_object() && j.contains("space") && j.contains("frame")) return &j["space"];
    if (j.is_object() || j.is_array())
      for (const Json& x : j)
        if (const Json* f = find_space(x)) return f;
    return nullptr;
  }
  Lagrangian lagrangian(const std::string& key, const SpacePtr& s) const {
    return parse_lagrangian(in(key), s, at(key), sc.tol);
  }
  Mat matrix(const std::string& key) const { return parse_matrix(in(key), at(key)); }
  double num(const std::string& key, double dflt) const { return number_or(sc.inputs, key, dflt, sc.name + ".inputs"); }
};

inline Json crossing_log_json(const CrossingLog& log) {
  Json c = Json::array();
  for (const Crossing& x : log.crossings)
    c.push_back(Json{{"t", x.t}, {"direction", x.direction}, {"phase_before", x.phase_before}, {"phase_after", x.phase_after}});
  return Json{{"total", log.total}, {"crossings", c}};
}

namespace paths {

// {"samples": [[t, X], ...]} with increasing t in [0, 1].
template <class F>
auto parse_samples(const Json& j, const std::string& where, F item) {
  const Json& list = field(j, "samples", where);
  if (!list.is_array() || list.size() < 2) throw schema_error(where + ".samples", "expected at least two [t, value] pairs");
  std::vector<double> t;
  std::vector<decltype(item(Json(), std::string()))> x;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string at = where + ".samples[" + std::to_string(k) + "]";
    if (!list[k].is_array() || list[k].size() != 2) throw schema_error(at, "expected [t, value]");
    const double tk = number(list[k][0], at);
    if (tk < 0.0 || tk > 1.0) throw schema_error(at, "sample times lie in [0, 1]");
    if (!t.empty() && !(tk > t.back())) throw schema_error(at, "sample times must increase");
    t.push_back(tk);
    x.push_back(item(list[k][1], at));
  }
  return std::make_pair(std::move(t), std::move(x));
}

struct Domain {
  double t0 = 0.0, t1 = 1.0;
};

inline Domain domain(const Json& p, const std::string& where) {
  Domain d{number_or(p, "t0", 0.0, where), number_or(p, "t1", 1.0, where)};
  if (!(d.t1 > d.t0)) throw schema_error(where, "need t1 > t0");
  return d;
}

inline const Json& parametric(const Json& j, const std::string& where) {
  if (!j.is_object()) throw schema_error(where, "expected an object");
  require_keys(j, where, {"samples", "parametric"});
  if (j.contains("samples") == j.contains("parametric")) throw schema_error(where, "give exactly one of 'samples' and 'parametric'");
  return j.contains("parametric") ? j["parametric"] : j;
}

inline std::string kind(const Json& p, const std::string& where) {
  const Json& k = field(p, "kind", where);
  if (!k.is_string()) throw schema_error(where + ".kind", "expected a string");
  return k.get<std::string>();
}

inline Mat hermitian(const Json& j, const std::string& where) {
  Mat h = parse_matrix(j, where);
  if (h.rows() != h.cols() || max_abs(h - h.adjoint()) > 1e-9) throw Error(ErrorKind::NotHermitian, where + " is not Hermitian");
  return h;
}

inline void same_size(const Mat& a, const Mat& b, const std::string& where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::DimensionMismatch, where + ": sizes differ");
}

}  // namespace paths

// exp-interp: U0 exp(i t H); rotation: exp(i rate t) U0.
inline UnitaryPath parse_unitary_path(const Json& j, const std::string& where) {
  const Json& p = paths::parametric(j, where);
  if (&p == &j) {
    auto [t, u] = paths::parse_samples(j, where, [](const Json& x, const std::string& at) { return parse_matrix(x, at); });
    return UnitaryPath::from_samples(t, u);
  }
  const std::string pw = where + ".parametric";
  const std::string k = paths::kind(p, pw);
  const paths::Domain d = paths::domain(p, pw);
  if (k == "exp-interp") {
    require_keys(p, pw, {"kind", "start", "generator", "t0", "t1"});
    Mat u0 = parse_matrix(field(p, "start", pw), pw + ".start");
    Mat h = paths::hermitian(field(p, "generator", pw), pw + ".generator");
    paths::same_size(u0, h, pw);
    require_unitary(u0, 1e-9, "path start");
    return UnitaryPath::from_generator([u0, h](double t) -> Mat { return u0 * expm(I_unit * t * h); }, d.t0, d.t1);
  }
  if (k == "rotation") {
    require_keys(p, pw, {"kind", "start", "rate", "t0", "t1"});
    Mat u0 = parse_matrix(field(p, "start", pw), pw + ".start");
    require_unitary(u0, 1e-9, "path start");
    const double rate = number(field(p, "rate", pw), pw + ".rate");
    return UnitaryPath::from_generator([u0, rate](double t) -> Mat { return std::exp(I_unit * rate * t) * u0; }, d.t0, d.t1);
  }
  throw schema_error(pw + ".kind", "expected 'exp-interp' or 'rotation'");
}

// A Lagrangian path is either samples or a generator on a domain.
struct LagrangianPathSpec {
  std::vector<double> t;
  std::vector<Lagrangian> samples;
  LagrangianGenerator gen;
  paths::Domain dom;
};

// exp-interp: exp(t gamma S) L; rotation: exp(rate t gamma) L; constant: L.
inline LagrangianPathSpec parse_lagrangian_path(const Json& j, const SpacePtr& s, const std::string& where, double tol) {
  const Json& p = paths::parametric(j, where);
  LagrangianPathSpec out;
  if (&p == &j) {
    auto [t, l] = paths::parse_samples(j, where, [&](const Json& x, const std::string& at) { return parse_lagrangian(x, s, at, tol); });
    out.t = std::move(t);
    out.samples = std::move(l);
    return out;
  }
  const std::string pw = where + ".parametric";
  const std::string k = paths::kind(p, pw);
  out.dom = paths::domain(p, pw);
  Mat gs;
  if (k == "constant") {
    require_keys(p, pw, {"kind", "start", "t0", "t1"});
  } else if (k == "exp-interp") {
    require_keys(p, pw, {"kind", "start", "generator", "t0", "t1"});
    Mat sg = paths::hermitian(field(p, "generator", pw), pw + ".generator");
    if (sg.rows() != s->dim()) throw Error(ErrorKind::DimensionMismatch, pw + ".generator has the wrong size");
    gs = s->gamma * sg;
  } else if (k == "rotation") {
    require_keys(p, pw, {"kind", "start", "rate", "t0", "t1"});
    gs = number_or(p, "rate", 1.0, pw) * s->gamma;
  } else {
    throw schema_error(pw + ".kind", "expected 'exp-interp', 'rotation' or 'constant'");
  }
  Lagrangian l = parse_lagrangian(field(p, "start", pw), s, pw + ".start", tol);
  if (gs.size() == 0)
    out.gen = [l](double) { return l; };
  else
    out.gen = [l, gs](double t) { return apply_map(expm(t * gs), l, 1e-8); };
  return out;
}

// Two generators refine together; otherwise both are read on the sample grid.
inline LagrangianPairPath pair_path(const SpacePtr& s, const LagrangianPathSpec& f, const LagrangianPathSpec& g,
                                    const std::string& where) {
  if (f.gen && g.gen) {
    if (f.dom.t0 != g.dom.t0 || f.dom.t1 != g.dom.t1) throw schema_error(where, "paths f and g have different domains");
    return LagrangianPairPath::from_generators(s, f.gen, g.gen, f.dom.t0, f.dom.t1);
  }
  if (!f.gen && !g.gen && f.t != g.t) throw schema_error(where, "sampled paths f and g need the same times");
  LagrangianPairPath pp;
  pp.space = s;
  pp.t = f.gen ? g.t : f.t;
  for (double t : pp.t) {
    pp.f.push_back(f.gen ? f.gen(t) : f.samples[pp.f.size()]);
    pp.g.push_back(g.gen ? g.gen(t) : g.samples[pp.g.size()]);
  }
  return pp;
}

// exp-interp: (1 - t) H0 + t H1; rotation: cos(pi t / 2) H0 + sin(pi t / 2) H1.
inline HermitianPath parse_hermitian_path(const Json& j, const std::string& where) {
  const Json& p = paths::parametric(j, where);
  if (&p == &j) {
    auto [t, h] = paths::parse_samples(j, where, [](const Json& x, const std::string& at) { return paths::hermitian(x, at); });
    return HermitianPath::from_samples(t, h);
  }
  const std::string pw = where + ".parametric";
  const std::string k = paths::kind(p, pw);
  require_keys(p, pw, {"kind", "start", "end", "t0", "t1"});
  const paths::Domain d = paths::domain(p, pw);
  Mat a = paths::hermitian(field(p, "start", pw), pw + ".start");
  Mat b = paths::hermitian(field(p, "end", pw), pw + ".end");
  paths::same_size(a, b, pw);
  if (k == "exp-interp") return HermitianPath::from_generator([a, b](double t) -> Mat { return (1.0 - t) * a + t * b; }, d.t0, d.t1);
  if (k == "rotation") {
    return HermitianPath::from_generator(
        [a, b](double t) -> Mat { return std::cos(0.5 * pi * t) * a + std::sin(0.5 * pi * t) * b; }, d.t0, d.t1);
  }
  throw schema_error(pw + ".kind", "expected 'exp-interp' or 'rotation'");
}

// {"interval": L} or {"circle": C}.
inline Geometry parse_geometry(const Json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) throw schema_error(where, "expected {\"interval\": L} or {\"circle\": C}");
  require_keys(j, where, {"interval", "circle"});
  if (j.contains("interval")) return Geometry::interval(number(j["interval"], where + ".interval"));
  return Geometry::circle(number(j["circle"], where + ".circle"));
}

// Model inputs: {"gamma", "A", "geometry", "boundary": {"P", "Q"}, "window", "eta": {"N_max", "tol"}}.
struct ModelInputs {
  SpacePtr space;
  Mat a;
  Geometry geometry;
  long n_max = 10000;
  double eta_tol = 5e-3;
};

inline ModelInputs parse_model_inputs(const Ctx& c) {
  ModelInputs m{parse_space(c.in("gamma"), c.at("gamma"), c.sc.tol), c.matrix("A"),
                parse_geometry(c.in("geometry"), c.at("geometry"))};
  m.eta_tol = c.sc.eta_tol;
  if (c.has("eta")) {
    const Json& e = c.in("eta");
    require_keys(e, c.at("eta"), {"N_max", "tol"});
    m.n_max = static_cast<long>(number_or(e, "N_max", 10000, c.at("eta")));
    m.eta_tol = number_or(e, "tol", m.eta_tol, c.at("eta"));
    if (m.n_max < 1 || !(m.eta_tol > 0)) throw schema_error(c.at("eta"), "N_max and tol must be positive");
  }
  return m;
}

inline ModelOperator parse_model(const Ctx& c) {
  ModelInputs m = parse_model_inputs(c);
  return build_model(m.space, m.a, m.geometry, c.sc.tol);
}

inline Lagrangian boundary_lagrangian(const Ctx& c, const std::string& key, const SpacePtr& s,
                                      std::initializer_list<const char*> keys) {
  const Json& b = c.in("boundary");
  require_keys(b, c.at("boundary"), keys);
  return parse_lagrangian(field(b, key, c.at("boundary")), s, c.at("boundary") + "." + key, c.sc.tol);
}

inline void require_geometry(const ModelOperator& m, bool interval, const Ctx& c) {
  if (m.geometry.is_interval() != interval)
    throw schema_error(c.at("geometry"), std::string("this operation needs ") + (interval ? "an interval" : "a circle"));
}

inline Json eta_json(const EtaEstimate& e) {
  return Json{{"eta", e.eta},
              {"eta_tilde", e.eta_tilde},
              {"dim_ker", e.dim_ker},
              {"bound", e.bound},
              {"cutoff", e.cutoff},
              {"eigenvalues", e.eigenvalues},
              {"mode", e.mode == EtaMode::ZeroModeClosedForm ? "closed_form" : "truncated"}};
}

inline Json suite_json(const SuiteReport& r) {
  Json t = Json::array();
  for (const auto& x : r.tallies)
    t.push_back(Json{{"identity", x.identity}, {"passed", x.passed}, {"total", x.total}, {"failures", list_json(x.failures)}});
  return Json{{"suite", r.suite},        {"tests", r.tests},   {"seed", r.seed},
              {"count", r.count},        {"identities", t},    {"resolution_failures", r.resolution_failures},
              {"errors", list_json(r.errors)}, {"draws", r.draws}, {"pass", r.pass()}};
}

inline void execute(Ctx& c) {
  const Scenario& sc = c.sc;
  const double tol = sc.tol;
  const std::string& op = sc.op;
  if (op == "phi") {
    c.allow({"space", "L"});
    SpacePtr s = c.space();
    Lagrangian l = c.lagrangian("L", s);
    c.values["phi"] = matrix_json(l.phi);
  } else if (op == "intersection_dim") {
    c.allow({"space", "V", "W"});
    SpacePtr s = c.space();
    Lagrangian v = c.lagrangian("V", s), w = c.lagrangian("W", s);
    const int d = intersection_dim(v, w, tol);
    c.values["value"] = d;
    c.check("intersection_dim symmetric", intersection_dim(w, v, tol) == d);
  } else if (op == "m_H" || op == "m") {
    c.allow({"space", "V", "W"});
    SpacePtr s = c.space();
    Lagrangian v = c.lagrangian("V", s), w = c.lagrangian("W", s);
    const double m = m_H(v, w, tol), mr = m_H(w, v, tol);
    c.values["value"] = m;
    c.residues["antisymmetry"] = std::abs(m + mr);
    c.check("m(W, V) = -m(V, W)", std::abs(m + mr) < 1e-9);
  } else if (op == "tsig") {
    c.allow({"space", "V", "W", "U"});
    SpacePtr s = c.space();
    Lagrangian v = c.lagrangian("V", s), w = c.lagrangian("W", s), u = c.lagrangian("U", s);
    TsigResult t = tsig(v, w, u, tol);
    c.values["value"] = t.value;
    c.residues["integer"] = t.residue;
    c.check("tsig odd under a transposition", tsig(w, v, u, tol).value == -t.value);
  } else if (op == "tau_mu") {
    c.allow({"space", "P", "Q", "R"});
    SpacePtr s = c.space();
    Lagrangian p = c.lagrangian("P", s), q = c.lagrangian("Q", s), r = c.lagrangian("R", s);
    const int t = tau_mu(p, q, r, tol);
    c.values["value"] = t;
    c.check("trace-log and tau_w forms agree", tau_mu_via_tau_w(p, q, r, tol) == t);
  } else if (op == "tau_w") {
    c.allow({"U", "V"});
    Mat u = c.matrix("U"), v = c.matrix("V");
    require_unitary(u, 1e-9, "U");
    require_unitary(v, 1e-9, "V");
    TauW t = tau_w(u, v, tol);
    c.values["value"] = t.value;
    c.residues["integer"] = t.residue;
    c.check("tau_w agrees with the path construction", tau_w_by_paths(u, v, tol) == t.value);
  } else if (op == "conversion") {
    c.allow({"space", "V", "W", "U"});
    SpacePtr s = c.space();
    Lagrangian v = c.lagrangian("V", s), w = c.lagrangian("W", s), u = c.lagrangian("U", s);
    ConversionRecord r;
    bool ok = true;
    try {
      r = tsig_tau_mu_conversion(v, w, u, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IdentityViolation) throw;
      ok = false;
      c.log["violation"] = e.what();
    }
    c.values["tsig"] = r.tsig;
    c.values["tsig_from_tau"] = r.tsig_from_tau;
    c.values["tau"] = r.tau;
    c.values["four_tau_from_tsig"] = r.tau_from_tsig_times4;
    c.check("tsig and tau_mu conversions", ok);
  } else if (op == "triple_relations") {
    c.allow({"space", "P", "Q", "R"});
    SpacePtr s = c.space();
    Lagrangian p = c.lagrangian("P", s), q = c.lagrangian("Q", s), r = c.lagrangian("R", s);
    TripleRelations t = triple_relations(p, q, r, tol);
    c.values["tau"] = tau_mu(p, q, r, tol);
    c.check("tau(P,R,Q) = -tau(P,Q,R) + dim(ker Q ∩ im R)", t.prq);
    c.check("tau(Q,P,R) = -tau(P,Q,R) + dim(ker P ∩ im Q)", t.qpr);
    c.check("tau(R,Q,P) = -tau(P,Q,R) + kpq + kqr - kpr", t.rqp);
    c.check("tau(P,P,Q) = tau(Q,P,P) = 0", t.repeated_zero);
    c.check("tau(P,Q,P) = dim(ker P ∩ im Q)", t.repeated_dim);
    c.check("trace-log and tau_w forms agree", t.tau_w_form);
  } else if (op == "wind") {
    c.allow({"path"});
    WindResult w = wind(parse_unitary_path(c.in("path"), c.at("path")), tol);
    c.values["value"] = w.value;
    c.values["epsilon"] = w.epsilon;
    c.values["samples"] = w.samples;
    c.log["crossings"] = crossing_log_json(w.log);
    c.check("argument-of-determinant and counting methods agree", w.by_arg_det == w.by_counting);
  } else if (op == "wind_inverse") {
    c.allow({"path"});
    UnitaryPath p = parse_unitary_path(c.in("path"), c.at("path"));
    WindInverseRecord r;
    bool ok = true;
    try {
      r = wind_plus_inverse_check(p, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IdentityViolation) throw;
      ok = false;
    }
    c.values["wind_f"] = r.wind_f;
    c.values["wind_f_inverse"] = r.wind_f_inverse;
    c.values["ker_start"] = r.ker_start;
    c.values["ker_end"] = r.ker_end;
    c.check("wind(f) + wind(f^-1) = dim ker(f(0)+I) - dim ker(f(1)+I)", ok);
  } else if (op == "maslov") {
    c.allow({"space", "f", "g"});
    SpacePtr s = c.space();
    LagrangianPairPath pp = pair_path(s, parse_lagrangian_path(c.in("f"), s, c.at("f"), tol),
                                      parse_lagrangian_path(c.in("g"), s, c.at("g"), tol), sc.name + ".inputs");
    MaslovResult m = maslov(pp, tol);
    c.values["value"] = m.value;
    c.log["crossings"] = crossing_log_json(m.log);
    bool ok = true;
    MaslovOrientationRecord o;
    try {
      o = maslov_orientation_check(pp, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IdentityViolation) throw;
      ok = false;
    }
    c.values["reversed"] = o.mas_gf;
    c.values["opposite_gamma"] = o.mas_fg_opposite;
    c.check("Mas_{-gamma}(f, g) = Mas(g, f) and Mas(f, g) + Mas(g, f) = endpoint kernel change", ok);
  } else if (op == "spectral_flow") {
    c.allow({"path"});
    HermitianPath p = parse_hermitian_path(c.in("path"), c.at("path"));
    SpectralFlowResult r = spectral_flow(p, tol);
    c.values["value"] = r.value;
    c.values["samples"] = r.samples;
    c.log["crossings"] = crossing_log_json(r.log);
    EtaFinite a = eta_finite(p.h.front(), tol), b = eta_finite(p.h.back(), tol);
    c.values["eta_tilde_start"] = a.eta_tilde;
    c.values["eta_tilde_end"] = b.eta_tilde;
    c.check("eta~(1) - eta~(0) = SF", b.eta_tilde - a.eta_tilde == r.value);
  } else if (op == "eta") {
    c.allow({"h"});
    EtaFinite e = eta_finite(c.matrix("h"), tol);
    c.values["eta"] = e.eta;
    c.values["dim_ker"] = e.dim_ker;
    c.values["eta_tilde"] = e.eta_tilde;
  } else if (op == "model_spectrum") {
    c.allow({"gamma", "A", "geometry", "boundary", "window", "eta"});
    ModelOperator m = parse_model(c);
    const double window = c.num("window", 20.0);
    if (!(window > 0)) throw schema_error(c.at("window"), "window must be positive");
    if (m.geometry.is_interval()) {
      Lagrangian p = boundary_lagrangian(c, "P", m.space, {"P", "Q"});
      Lagrangian q = boundary_lagrangian(c, "Q", m.space, {"P", "Q"});
      std::vector<double> s = interval_spectrum(m, p, q, window, tol);
      std::vector<double> r = interval_spectrum(m, q, p, window, tol);
      double worst = s.size() == r.size() ? 0.0 : 1e300;
      for (std::size_t k = 0; s.size() == r.size() && k < s.size(); ++k)
        worst = std::max(worst, std::abs(s[k] + r[r.size() - 1 - k]));
      c.values["eigenvalues"] = list_json(s);
      c.residues["symmetry"] = worst;
      c.check("spec D_{P,Q} = -spec D_{Q,P}", worst < 1e-8);
      const int zeros = static_cast<int>(suite_detail::zero_roots(s, 1e-7).size());
      c.values["dim_ker"] = zeros;
      c.check("zero roots = dim(L_X ∩ (gamma P ⊕ Q))", zeros == kernel_dimension(m, interval_condition(m, p, q)));
    } else {
      std::vector<double> s = circle_spectrum(m, window), t = circle_spectrum_by_transmission(m, window);
      double worst = s.size() == t.size() ? 0.0 : 1e300;
      for (std::size_t k = 0; s.size() == t.size() && k < s.size(); ++k) worst = std::max(worst, std::abs(s[k] - t[k]));
      c.values["eigenvalues"] = list_json(s);
      c.values["eta_tilde"] = circle_eta_tilde(m);
      c.residues["transmission"] = worst;
      c.check("closed form = periodic boundary condition on the cut interval", worst < 1e-8);
    }
  } else if (op == "model_cauchy") {
    c.allow({"gamma", "A", "geometry"});
    ModelOperator m = parse_model(c);
    require_geometry(m, true, c);
    Lagrangian lx = cauchy_data(m);
    c.values["cauchy_data"] = lagrangian_json(lx);
    LagrangianProjection pr = projection_of(lx);
    const Mat g = lx.space->gamma;
    double defect = max_abs(g * pr.matrix * g.adjoint() - (identity(pr.matrix.rows()) - pr.matrix));
    c.residues["projection"] = defect;
    c.check("gamma P gamma^* = I - P", defect < 1e-9);
  } else if (op == "model_stretch") {
    c.allow({"gamma", "A", "geometry", "r", "nu"});
    ModelOperator m = parse_model(c);
    require_geometry(m, true, c);
    const double r = c.num("r", 10.0), nu = c.num("nu", 0.0);
    Lagrangian lx = cauchy_data(m);
    AdiabaticLimit lim = adiabatic_limit(m, lx, nu, tol);
    Lagrangian st = stretched_cauchy_data(m, r);
    c.values["stretched"] = lagrangian_json(st);
    c.values["limit"] = lagrangian_json(lim.limit);
    c.values["levels"] = list_json(lim.levels);
    const double d = subspace_distance(st, lim.limit);
    c.values["distance"] = d;
    Lagrangian via = stretch(transport(lx, m.boundary), boundary_generator(m), r);
    c.residues["stretch_forms"] = subspace_distance(via, st);
    c.check("e^{r A~} L_X = stretched Cauchy data", subspace_distance(via, st) < 1e-8);
  } else if (op == "model_glue" || op == "model_caldconst") {
    c.allow({"gamma", "A", "geometry", "cut", "boundary", "eta"});
    ModelInputs mi = parse_model_inputs(c);
    if (mi.geometry.is_interval()) throw schema_error(c.at("geometry"), "gluing cuts a circle");
    const double circ = mi.geometry.length, cut = c.num("cut", 0.5 * circ);
    if (!(cut > 0 && cut < circ)) throw schema_error(c.at("cut"), "cut must lie strictly inside (0, C)");
    ModelOperator plus = build_model(mi.space, mi.a, Geometry::interval(cut), tol);
    ModelOperator minus = build_model(mi.space, mi.a, Geometry::interval(circ - cut), tol);
    if (op == "model_caldconst") {
      CaldconstRecord r = caldconst_check(plus, minus);
      c.values["dims"] = list_json(r.dims);
      c.values["thetas"] = list_json(r.thetas);
      c.values["expected"] = r.expected;
      c.check("dim(ker P(theta) ∩ (L+ ⊕ L-)) constant in theta", true);
      return;
    }
    Lagrangian p = boundary_lagrangian(c, "P", plus.boundary, {"P"});
    bool ok = true;
    GlueRecord g;
    try {
      g = glue_verify(plus, minus, p, mi.n_max, mi.eta_tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::GluingViolation) throw;
      ok = false;
      c.log["violation"] = e.what();
    }
    c.values["eta_tilde_circle"] = g.eta_tilde_closed;
    c.values["plus"] = eta_json(g.plus);
    c.values["minus"] = eta_json(g.minus);
    c.values["tau"] = g.tau;
    c.values["rhs"] = g.rhs;
    c.residues["discrepancy"] = g.discrepancy;
    c.residues["bound"] = g.bound;
    c.residues["mod_z"] = g.mod_z_residue;
    c.check("eta~(circle) = eta~(M+) + eta~(M-) - tau_mu within the bound", ok);
  } else if (op == "model_modz") {
    c.allow({"gamma", "A", "geometry", "boundary", "eta"});
    ModelInputs mi = parse_model_inputs(c);
    ModelOperator m = build_model(mi.space, mi.a, mi.geometry, tol);
    require_geometry(m, true, c);
    Lagrangian p = boundary_lagrangian(c, "P", m.boundary, {"P", "Q"});
    Lagrangian q = boundary_lagrangian(c, "Q", m.boundary, {"P", "Q"});
    bool ok = true;
    ModZRecord r;
    try {
      r = sw_modz_check(m, p, q, mi.n_max, mi.eta_tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IdentityViolation) throw;
      ok = false;
    }
    c.values["eta_difference"] = r.eta_difference;
    c.values["trace_log"] = r.trace_log;
    c.residues["mod_z"] = r.residue;
    c.residues["exact"] = r.exact_residue;
    c.residues["bound"] = r.bound;
    c.check("eta~(P) - eta~(Q) = trace log mod Z", ok);
  } else if (op == "suite") {
    c.allow({"suite", "count"});
    const Json& name = c.in("suite");
    if (!name.is_string()) throw schema_error(c.at("suite"), "expected a string");
    const int count = static_cast<int>(c.num("count", 0));
    SuiteReport r = run_suite(name.get<std::string>(), sc.seed.value_or(0), count);
    c.values["suite"] = suite_json(r);
    c.check(r.tests, r.identities_hold());
    if (r.resolution_failures > 0) throw Error(ErrorKind::RefinementExhausted, "suite had resolution failures");
  }
}

}  // namespace scenario_detail

inline ScenarioResult run_scenario(const Scenario& sc, bool timing = false) {
  auto t0 = std::chrono::steady_clock::now();
  scenario_detail::Ctx c{sc};
  ScenarioResult res;
  Json error = nullptr;
  try {
    scenario_detail::execute(c);
  } catch (const Error& e) {
    res.outcome = outcome_of(e.kind());
    error = Json{{"kind", to_string(e.kind())}, {"message", e.what()}};
  } catch (const Json::exception& e) {
    res.outcome = Outcome::InputError;
    error = Json{{"kind", "SchemaError"}, {"message", e.what()}};
  }
  bool all = true;
  for (const Json& ch : c.checks) all = all && ch["pass"].get<bool>();
  if (res.outcome == Outcome::Pass && !all) res.outcome = Outcome::IdentityFailure;
  Json tol{{"tol", sc.tol}, {"eta", sc.eta_tol}};
  res.report = Json{{"name", sc.name},     {"op", sc.op},         {"values", c.values}, {"residues", c.residues},
                    {"log", c.log},        {"tolerances", tol},   {"checks", c.checks},
                    {"pass", res.outcome == Outcome::Pass}};
  if (sc.seed) res.report["seed"] = *sc.seed;
  if (!error.is_null()) res.report["error"] = error;
  if (timing)
    res.report["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

struct ScenarioFile {
  std::vector<Scenario> scenarios;
  std::optional<std::string> out;
  std::optional<bool> pretty;
  std::optional<bool> timing;
};

// A list of scenarios, a single scenario, or {"scenarios": [...], "out", "pretty", "timing", "tol"}.
inline ScenarioFile parse_scenario_file(const Json& j, double tol_override = -1.0) {
  ScenarioFile f;
  const Json* list = &j;
  Json single;
  if (j.is_object() && j.contains("scenarios")) {
    require_keys(j, "file", {"scenarios", "out", "pretty", "timing", "tol"});
    list = &j["scenarios"];
    if (j.contains("out")) {
      if (!j["out"].is_string()) throw schema_error("file.out", "expected a string");
      f.out = j["out"].get<std::string>();
    }
    for (const char* k : {"pretty", "timing"})
      if (j.contains(k)) {
        if (!j[k].is_boolean()) throw schema_error(std::string("file.") + k, "expected a boolean");
        (std::string(k) == "pretty" ? f.pretty : f.timing) = j[k].get<bool>();
      }
    if (j.contains("tol") && tol_override <= 0) {
      tol_override = number(j["tol"], "file.tol");
      if (!(tol_override > 0)) throw schema_error("file.tol", "must be positive");
    }
  } else if (j.is_object()) {
    single = Json::array({j});
    list = &single;
  }
  if (!list->is_array()) throw schema_error("file", "expected a scenario, a list of scenarios or {\"scenarios\": [...]}");
  for (std::size_t k = 0; k < list->size(); ++k)
    f.scenarios.push_back(parse_scenario((*list)[k], "scenarios[" + std::to_string(k) + "]", tol_override));
  return f;
}

}  // namespace symflow
