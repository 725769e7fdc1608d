#include "topo/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "topo/currents.hpp"
#include "topo/dirac.hpp"
#include "topo/geometry.hpp"
#include "topo/manifest.hpp"
#include "topo/polarconn.hpp"
#include "topo/spinor.hpp"

namespace topo {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Loading

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& reason) {
  throw ValidationError("scenario field '" + field + "': " + reason);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(path + key, "missing");
  return obj.at(key);
}

std::string require_string(const json& v, const std::string& field) {
  if (!v.is_string()) schema_error(field, "expected a string");
  return v.get<std::string>();
}

double require_number(const json& v, const std::string& field) {
  if (!v.is_number()) schema_error(field, "expected a number");
  return v.get<double>();
}

std::vector<std::string> default_coordinates(Config c) {
  switch (c) {
    case Config::D4_13: return {"t", "x", "y", "z"};
    case Config::D2_11: return {"t", "x"};
    case Config::D2_02: return {"x", "y"};
    case Config::D3_EUC: return {"x", "y", "z"};
  }
  return {};
}

class ExprContext {
 public:
  ExprContext(const std::vector<std::string>& vars, const std::map<std::string, double>& consts)
      : vars_(vars), consts_(consts) {}

  Expression parse(const json& v, const std::string& field) const {
    if (v.is_number()) return parse_expression(v.dump(), vars_, consts_);
    if (!v.is_string()) schema_error(field, "expected an expression string or number");
    try {
      return parse_expression(v.get<std::string>(), vars_, consts_);
    } catch (const ParseError& e) {
      schema_error(field, e.what());
    }
  }
  double constant(const json& v, const std::string& field) const {
    const Expression e = parse(v, field);
    if (!e.is_constant()) schema_error(field, "must not depend on coordinates");
    return e.evaluate({});
  }

 private:
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& consts_;
};

std::vector<json> require_array(const json& v, const std::string& field, std::size_t n) {
  if (!v.is_array()) schema_error(field, "expected an array");
  if (v.size() != n)
    schema_error(field, "dimension mismatch: expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  return v.get<std::vector<json>>();
}

std::vector<std::string> string_list(const json& doc, const std::string& key) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  const json& v = doc.at(key);
  if (!v.is_array()) schema_error(key, "expected an array of names");
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(require_string(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

void check_frame(const ScenarioSpec& spec) {
  const Grid g(spec.axes);
  const int d = spec.config.dimension;
  std::vector<double> x(d);
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int a = 0; a < d; ++a) x[a] = g.coordinate(p, a);
    CMat m(d);
    for (int a = 0; a < d; ++a)
      for (int mu = 0; mu < d; ++mu) m(a, mu) = spec.frame[a][mu].evaluate(x);
    const double det = std::abs(m.determinant());
    if (!(det > 1e-12)) {
      std::ostringstream os;
      os << "degenerate frame at (";
      for (int a = 0; a < d; ++a) os << (a ? ", " : "") << x[a];
      os << "): |det e| = " << det;
      throw DegenerateError(os.str());
    }
  }
}

}  // namespace

ScenarioSpec parse_scenario(const json& doc) {
  if (!doc.is_object()) schema_error("", "document must be an object");
  ScenarioSpec spec;
  spec.source = doc;
  spec.name = require_string(require(doc, "name", ""), "name");
  if (doc.contains("description")) spec.description = require_string(doc["description"], "description");
  try {
    spec.config = SignatureConfig::from_name(require_string(require(doc, "config", ""), "config"));
  } catch (const ConfigurationError& e) {
    schema_error("config", e.what());
  }
  const int d = spec.config.dimension;
  const std::string dims = std::to_string(d);

  spec.coordinates = default_coordinates(spec.config.id);
  if (doc.contains("coordinates")) {
    const auto names = require_array(doc["coordinates"], "coordinates", d);
    for (int a = 0; a < d; ++a) spec.coordinates[a] = require_string(names[a], "coordinates");
  }
  if (doc.contains("constants")) {
    const json& c = doc["constants"];
    if (!c.is_object()) schema_error("constants", "expected an object");
    for (const auto& [k, v] : c.items()) {
      for (const auto& name : spec.coordinates)
        if (name == k) schema_error("constants." + k, "shadows a coordinate");
      // Constants may refer to earlier constants (alphabetical order).
      spec.constants[k] = ExprContext({}, spec.constants).constant(v, "constants." + k);
    }
  }
  const ExprContext ctx(spec.coordinates, spec.constants);

  const json& grid = require(doc, "grid", "");
  const auto counts = require_array(require(grid, "counts", "grid."), "grid.counts", d);
  const auto lower = require_array(require(grid, "lower", "grid."), "grid.lower", d);
  const auto upper = require_array(require(grid, "upper", "grid."), "grid.upper", d);
  std::vector<json> boundary(d, json("periodic"));
  if (grid.contains("boundary")) boundary = require_array(grid["boundary"], "grid.boundary", d);
  for (int a = 0; a < d; ++a) {
    const std::string ax = "[" + std::to_string(a) + "]";
    AxisSpec s;
    if (!counts[a].is_number_integer() || counts[a].get<long>() < 2) schema_error("grid.counts" + ax, "expected an integer >= 2");
    s.count = counts[a].get<std::size_t>();
    s.lower = ctx.constant(lower[a], "grid.lower" + ax);
    s.upper = ctx.constant(upper[a], "grid.upper" + ax);
    if (!(s.upper > s.lower)) schema_error("grid.upper" + ax, "must exceed grid.lower");
    const std::string b = require_string(boundary[a], "grid.boundary" + ax);
    if (b == "periodic") s.boundary = Boundary::periodic;
    else if (b == "open") s.boundary = Boundary::open;
    else schema_error("grid.boundary" + ax, "expected 'periodic' or 'open'");
    spec.axes.push_back(s);
  }

  const auto rows = require_array(require(doc, "frame", ""), "frame", d);
  for (int a = 0; a < d; ++a) {
    const std::string f = "frame[" + std::to_string(a) + "]";
    const auto row = require_array(rows[a], f, d);
    std::vector<Expression> r;
    for (int mu = 0; mu < d; ++mu) r.push_back(ctx.parse(row[mu], f + "[" + std::to_string(mu) + "]"));
    spec.frame.push_back(std::move(r));
  }
  if (doc.contains("gauge_potential")) {
    const auto a = require_array(doc["gauge_potential"], "gauge_potential", d);
    for (int mu = 0; mu < d; ++mu)
      spec.gauge_potential.push_back(ctx.parse(a[mu], "gauge_potential[" + std::to_string(mu) + "]"));
  }
  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) schema_error("params", "expected an object");
    if (p.contains("m")) spec.m = require_number(p["m"], "params.m");
    if (p.contains("q")) spec.q = require_number(p["q"], "params.q");
  }

  const CliffordRep rep = build_clifford(spec.config);
  if (doc.contains("polar")) {
    const json& p = doc["polar"];
    ScenarioSpec::Polar polar;
    polar.phi = ctx.parse(require(p, "phi", "polar."), "polar.phi");
    if (p.contains("angle")) {
      if (spec.config.id == Config::D3_EUC) schema_error("polar.angle", "three-dimensional spinors carry no chiral angle");
      polar.angle = ctx.parse(p["angle"], "polar.angle");
    }
    if (p.contains("L")) {
      const json& l = p["L"];
      if (!l.is_array()) schema_error("polar.L", "expected an array");
      for (std::size_t k = 0; k < l.size(); ++k) {
        const std::string f = "polar.L[" + std::to_string(k) + "]";
        GeneratorSpec g;
        g.generator = require_string(require(l[k], "generator", f + "."), f + ".generator");
        if (!generator_valid(rep, g.generator))
          schema_error(f + ".generator", "'" + g.generator + "' is not a generator of " + std::string(spec.config.name));
        if (g.generator == "phase" && spec.q == 0)
          schema_error(f + ".generator", "a phase parameter needs q != 0");
        g.param = ctx.parse(require(l[k], "param", f + "."), f + ".param");
        polar.L.push_back(std::move(g));
      }
    }
    spec.polar = std::move(polar);
  }
  spec.checks = string_list(doc, "checks");
  spec.diagnostics = string_list(doc, "diagnostics");
  if (doc.contains("expected")) {
    if (!doc["expected"].is_object()) schema_error("expected", "expected an object");
    for (const auto& [k, v] : doc["expected"].items()) spec.expected[k] = ctx.parse(v, "expected." + k);
  }
  if (doc.contains("tolerances")) {
    if (!doc["tolerances"].is_object()) schema_error("tolerances", "expected an object");
    for (const auto& [k, v] : doc["tolerances"].items()) {
      Tolerance t{-1, -1, -1};
      if (v.contains("linf")) t.linf = require_number(v["linf"], "tolerances." + k + ".linf");
      if (v.contains("min_order")) t.min_order = require_number(v["min_order"], "tolerances." + k + ".min_order");
      if (v.contains("zero_floor")) t.zero_floor = require_number(v["zero_floor"], "tolerances." + k + ".zero_floor");
      spec.tolerances[k] = t;
    }
  }
  if (doc.contains("scheme_order")) {
    const json& o = doc["scheme_order"];
    if (!o.is_number_integer() || (o.get<int>() != 2 && o.get<int>() != 4)) schema_error("scheme_order", "expected 2 or 4");
    spec.scheme_order = o.get<int>();
  }
  if (doc.contains("refinements")) {
    const json& r = doc["refinements"];
    if (!r.is_number_integer() || r.get<int>() < 0 || r.get<int>() > 3) schema_error("refinements", "expected 0..3");
    spec.refinements = r.get<int>();
  }

  try {
    Grid(spec.axes).require_stencil(DiffScheme(spec.scheme_order).radius());
  } catch (const GridError& e) {
    schema_error("grid.counts", e.what());
  }
  check_frame(spec);
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// Per-level pipeline. Every quantity is computed on first use.

namespace {

class Level {
 public:
  Level(const ScenarioSpec& spec, const CliffordRep& rep, Grid grid, const DiffScheme& s, const Exec& exec)
      : spec_(spec), rep_(rep), grid_(std::move(grid)), s_(s), exec_(exec) {}

  const Grid& grid() const { return grid_; }
  const CliffordRep& rep() const { return rep_; }
  const DiffScheme& scheme() const { return s_; }
  const Exec& exec() const { return exec_; }
  const ScenarioSpec& spec() const { return spec_; }
  DiracParams params() const { return {spec_.m, spec_.q}; }

  Field evaluate(const std::vector<Expression>& exprs) const {
    const int d = grid_.dimension();
    Field f(grid_, {static_cast<int>(exprs.size())});
    parallel_for(grid_.size(), exec_, [&](std::size_t lo, std::size_t hi) {
      std::vector<double> x(d);
      for (std::size_t p = lo; p < hi; ++p) {
        for (int a = 0; a < d; ++a) x[a] = grid_.coordinate(p, a);
        for (std::size_t k = 0; k < exprs.size(); ++k) f(p, k) = exprs[k].evaluate(x);
      }
    });
    return f;
  }

  const FrameField& frame() {
    if (!frame_) {
      std::vector<Expression> flat;
      for (const auto& row : spec_.frame) flat.insert(flat.end(), row.begin(), row.end());
      const int d = grid_.dimension();
      Field e = evaluate(flat);
      Field shaped(grid_, {d, d});
      shaped.values() = std::move(e.values());
      frame_ = make_frame(std::move(shaped), exec_);
    }
    return *frame_;
  }
  const Field& metric() { return lazy(metric_, [&] { return metric_from_frame(frame(), rep_.config, exec_); }); }
  const Field& lambda() { return lazy(lambda_, [&] { return levi_civita(metric(), s_, exec_); }); }
  const Field& c() { return lazy(c_, [&] { return spin_connection(frame(), lambda(), rep_.config, s_, exec_); }); }
  const Field& riemann() { return lazy(riemann_, [&] { return riemann_from_spin_connection(c(), rep_.config, s_, exec_); }); }
  const Field& a() {
    return lazy(a_, [&] {
      if (spec_.gauge_potential.empty()) return Field(grid_, {grid_.dimension()});
      return evaluate(spec_.gauge_potential);
    });
  }
  const Field& qf() {
    return lazy(qf_, [&] {
      Field f = field_strength(a(), s_, exec_);
      for (double& v : f.values()) v *= spec_.q;
      return f;
    });
  }
  const ComplexField& psi() {
    if (!psi_) {
      if (!spec_.polar) throw MissingFieldError("scenario has no polar data");
      const auto& pol = *spec_.polar;
      const int d = grid_.dimension(), n = rep_.spinor_dim;
      ComplexField psi(grid_, {n});
      parallel_for(grid_.size(), exec_, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> x(d);
        for (std::size_t p = lo; p < hi; ++p) {
          for (int k = 0; k < d; ++k) x[k] = grid_.coordinate(p, k);
          CMat L = CMat::identity(n);
          for (const auto& g : pol.L) L = L * generator_exp(rep_, g.generator, g.param.evaluate(x), spec_.q);
          const double angle = pol.angle ? pol.angle->evaluate(x) : 0.0;
          const CVec v = polar_reconstruct_point(pol.phi.evaluate(x), angle, L, rep_);
          for (int i = 0; i < n; ++i) psi(p, i) = v[i];
        }
      });
      psi_ = std::move(psi);
    }
    return *psi_;
  }
  PolarData& polar() {
    if (!polar_) {
      PolarData pd = polar_decompose(psi(), rep_, exec_);
      attach_unit_vectors(pd, rep_, exec_);
      polar_ = std::move(pd);
    }
    return *polar_;
  }
  const LieLog& lie() { return lazy(lie_, [&] { return lie_log_derivative(polar().L, rep_, spec_.q, s_, exec_); }); }
  const TensorialConnection& conn() {
    return lazy(conn_, [&] { return tensorial_connection(lie(), c(), a(), spec_.q, polar(), frame(), rep_, exec_); });
  }
  const SigmaCurvature& curv() {
    return lazy(curv_, [&] { return curvature_from_tensorial(conn(), c(), lambda(), rep_.config, s_, exec_); });
  }
  const Field& composite() {
    return lazy(composite_, [&] { return sigma_curvature_composite(riemann(), qf(), polar(), rep_, exec_); });
  }
  const BianchiCauchy& bianchi() {
    return lazy(bianchi_, [&] { return bianchi_cauchy_residual(curv(), c(), frame(), rep_, s_, exec_); });
  }
  const TopologicalCurrent& current(CurrentKind k) {
    auto it = currents_.find(k);
    if (it != currents_.end()) return it->second;
    if (current_dimension(k) != grid_.dimension())
      throw ConfigurationError(std::string(current_name(k)) + " needs dimension " + std::to_string(current_dimension(k)));
    CurrentInputs in;
    in.frame = &frame();
    in.conn = &conn();
    in.lambda = &lambda();
    if (k == CurrentKind::G2) in.riemann = &riemann();
    if (k == CurrentKind::K2) in.qf_gauge = &qf();
    if (k == CurrentKind::G3 || k == CurrentKind::G4 || k == CurrentKind::K4) {
      in.sigma_curvature = &*curv().Sigma;
      in.polar = &polar();
    }
    return currents_.emplace(k, topological_current(k, in, rep_, s_, 1, exec_)).first->second;
  }
  const ComplexField& dirac() {
    return lazy(dirac_, [&] { return dirac_residual(psi(), c(), a(), frame(), params(), rep_, s_, exec_); });
  }
  const PolarResiduals& polar_res() {
    return lazy(polar_res_, [&] { return polar_residuals(polar(), conn(), frame(), params(), rep_, s_, exec_); });
  }

 private:
  template <class T, class Fn>
  const T& lazy(std::optional<T>& slot, Fn&& fn) {
    if (!slot) slot = fn();
    return *slot;
  }

  const ScenarioSpec& spec_;
  const CliffordRep& rep_;
  Grid grid_;
  DiffScheme s_;
  Exec exec_;
  std::optional<FrameField> frame_;
  std::optional<Field> metric_, lambda_, c_, riemann_, a_, qf_, composite_;
  std::optional<ComplexField> psi_, dirac_;
  std::optional<PolarData> polar_;
  std::optional<LieLog> lie_;
  std::optional<TensorialConnection> conn_;
  std::optional<SigmaCurvature> curv_;
  std::optional<BianchiCauchy> bianchi_;
  std::optional<PolarResiduals> polar_res_;
  std::map<CurrentKind, TopologicalCurrent> currents_;
};

/// A check yields either a residual field or a single value.
struct Outcome {
  std::optional<Field> field;
  double value = 0;
};

enum ConfigMask : unsigned {
  k4D = 1u << static_cast<int>(Config::D4_13),
  k11 = 1u << static_cast<int>(Config::D2_11),
  k02 = 1u << static_cast<int>(Config::D2_02),
  k3D = 1u << static_cast<int>(Config::D3_EUC),
  k2D = k11 | k02,
  kAll = k4D | k2D | k3D,
};

struct CheckDef {
  const char* name;
  const char* kind;
  CheckMode mode;
  unsigned configs;
  const char* anchor;
  std::function<Outcome(Level&)> run;
};

Outcome field(Field f) { return {std::move(f), 0}; }
Outcome value(double v) { return {std::nullopt, v}; }

Outcome divergence(Level& L, CurrentKind k) {
  return field(verify_class(L.current(k), L.metric(), L.scheme(), L.exec()));
}

Field norm_of_vector_field(const Field& v) { return pointwise_norm(v); }

const std::vector<CheckDef>& catalogue() {
  static const std::vector<CheckDef> defs = {
      {"algebra", "algebra", CheckMode::algebraic, kAll,
       "Clifford relations, sigma generators, parity duality and the triple-product reduction",
       [](Level& L) {
         return value(std::max(check_invariants(L.rep()).max(), check_trilinear_identity(L.rep()).linf));
       }},
      {"fierz", "algebra", CheckMode::algebraic, kAll,
       "Fierz identities among the bilinear covariants on random spinors",
       [](Level& L) {
         std::mt19937_64 rng(conventions::kCalibrationSeed);
         std::normal_distribution<double> nd;
         double worst = 0;
         for (int k = 0; k < 1000; ++k) {
           CVec v(L.rep().spinor_dim);
           for (int i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
           v = v * (1.0 / v.norm());
           worst = std::max(worst, fierz_residuals(v, L.rep()).max());
         }
         return value(worst);
       }},
      {"polar_roundtrip", "polar", CheckMode::exact, kAll,
       "the spinor is recovered from its module, chiral angle and spin-group factor",
       [](Level& L) {
         const ComplexField back = polar_reconstruct(L.polar(), L.rep(), L.exec());
         ComplexField diff = back;
         for (std::size_t i = 0; i < diff.values().size(); ++i) diff.values()[i] -= L.psi().values()[i];
         return field(pointwise_norm(diff));
       }},
      {"decomposition", "polar", CheckMode::convergence, kAll,
       "covariant derivative of the spinor in polar form through the tensorial connection",
       [](Level& L) {
         return field(decomposition_residual(L.psi(), L.polar(), L.conn(), L.c(), L.a(), L.params().q, L.frame(),
                                             L.rep(), L.scheme(), L.exec()));
       }},
      {"su_identity", "polar", CheckMode::convergence, k4D,
       "covariant derivatives of the velocity and spin axial vectors through Sigma",
       [](Level& L) {
         return field(su_identity_residual(L.polar(), L.conn(), L.frame(), L.lambda(), L.rep(), L.scheme(), L.exec()));
       }},
      {"riemann", "curvature", CheckMode::convergence, kAll,
       "Riemann curvature from the tensorial connection against the spin-connection curvature",
       [](Level& L) { return field(difference_norm(L.curv().R, L.riemann(), L.exec())); }},
      {"maxwell", "curvature", CheckMode::convergence, kAll,
       "Maxwell curvature from the gauge tensorial connection against q F of the potential",
       [](Level& L) { return field(difference_norm(L.curv().qF, L.qf(), L.exec())); }},
      {"sigma_curvature", "curvature", CheckMode::convergence, k4D | k3D,
       "curvature of Sigma against the Riemann and Maxwell composite",
       [](Level& L) { return field(difference_norm(*L.curv().Sigma, L.composite(), L.exec())); }},
      {"bianchi", "curvature", CheckMode::convergence, k4D,
       "cyclic covariant derivative of the reconstructed Riemann curvature",
       [](Level& L) { return field(L.bianchi().bianchi); }},
      {"cauchy", "curvature", CheckMode::convergence, k4D,
       "cyclic derivative of the reconstructed Maxwell curvature",
       [](Level& L) { return field(L.bianchi().cauchy); }},
      {"bianchi_total", "curvature", CheckMode::convergence, k4D,
       "cyclic covariant derivative of the Sigma curvature",
       [](Level& L) { return field(L.bianchi().total); }},
      {"commutator", "curvature", CheckMode::convergence, kAll,
       "commutator of spinor covariant derivatives against the curvature action",
       [](Level& L) {
         const bool sigma = L.grid().dimension() != 2;
         return field(commutator_residual(L.psi(), L.c(), L.a(), L.params().q, sigma ? &*L.curv().Sigma : nullptr,
                                          &L.riemann(), &L.qf(), L.rep(), L.scheme(), L.exec()));
       }},
      {"ricci_scalar", "curvature", CheckMode::convergence, kAll,
       "Ricci scalar of the frame against the expected closed form",
       [](Level& L) {
         const auto it = L.spec().expected.find("ricci_scalar");
         if (it == L.spec().expected.end()) throw MissingFieldError("needs expected.ricci_scalar");
         Field r = ricci_scalar_field(L.riemann(), L.frame(), L.rep().config, L.exec());
         const Field want = L.evaluate({it->second});
         for (std::size_t p = 0; p < r.values().size(); ++p) r.values()[p] -= want.values()[p];
         return field(std::move(r));
       }},
      {"div_G2", "G2", CheckMode::convergence, k2D,
       "divergence of the 2D Euler current equals the Euler density",
       [](Level& L) { return divergence(L, CurrentKind::G2); }},
      {"div_K2", "K2", CheckMode::convergence, k2D,
       "divergence of the 2D gauge current equals the Maxwell density",
       [](Level& L) { return divergence(L, CurrentKind::K2); }},
      {"div_G3", "G3", CheckMode::convergence, k3D,
       "the 3D Euler-type current is divergence free",
       [](Level& L) { return divergence(L, CurrentKind::G3); }},
      {"div_K3", "K3", CheckMode::convergence, k3D,
       "the 3D curl current is divergence free",
       [](Level& L) { return divergence(L, CurrentKind::K3); }},
      {"div_G4", "G4", CheckMode::convergence, k4D,
       "divergence of the 4D Euler current equals the Euler density",
       [](Level& L) { return divergence(L, CurrentKind::G4); }},
      {"div_K4", "K4", CheckMode::convergence, k4D,
       "divergence of the 4D Pontryagin current equals the Pontryagin density",
       [](Level& L) { return divergence(L, CurrentKind::K4); }},
      {"pure_gauge_k4", "K4", CheckMode::exact, k4D,
       "in the pure-gauge limit K4 reduces to 4 qF P eps",
       [](Level& L) {
         const Field ref = pure_gauge_k4(L.qf(), L.conn().P, L.frame(), L.rep(), 1, L.exec());
         return field(difference_norm(L.current(CurrentKind::K4).V, ref, L.exec()));
       }},
      {"g4_vanishes", "G4", CheckMode::algebraic, k4D,
       "in the pure-gauge limit G4 vanishes",
       [](Level& L) { return field(norm_of_vector_field(L.current(CurrentKind::G4).V)); }},
      {"flat_g3", "G3", CheckMode::exact, k3D,
       "on a flat manifold with constant spin axis G3 reduces to 4 qF eps",
       [](Level& L) {
         const Field ref = flat_g3(L.qf(), L.frame(), L.rep(), L.exec());
         return field(difference_norm(L.current(CurrentKind::G3).V, ref, L.exec()));
       }},
      {"k3_christoffel", "K3", CheckMode::algebraic, k3D,
       "the Christoffel part of the covariant curl drops out",
       [](Level& L) { return value(k3_christoffel_term(L.conn(), L.frame(), L.lambda(), L.rep())); }},
      {"euler_integral", "G2", CheckMode::algebraic, k2D,
       "integral of the Euler density over a closed surface",
       [](Level& L) {
         const Field dens = characteristic_density(DensityKind::Euler2D, L.riemann(), L.frame(), L.rep().config, 1,
                                                   L.exec());
         return value(integrate(dens, L.metric()));
       }},
      {"dirac", "dirac", CheckMode::exact, kAll,
       "Dirac equation residual of the spinor field",
       [](Level& L) { return field(pointwise_norm(L.dirac())); }},
      {"polar_A", "dirac", CheckMode::exact, k4D | k2D,
       "polar field equation for the chiral angle",
       [](Level& L) { return field(pointwise_norm(L.polar_res().A)); }},
      {"polar_B", "dirac", CheckMode::exact, kAll,
       "polar field equation for the module",
       [](Level& L) { return field(pointwise_norm(L.polar_res().B)); }},
      {"constraint", "dirac", CheckMode::exact, k3D,
       "three-dimensional constraint tying the trace of M to the mass",
       [](Level& L) { return field(pointwise_norm(*L.polar_res().constraint)); }},
      {"equivalence", "dirac", CheckMode::convergence, kAll,
       "the Dirac residual is the frozen linear map of the polar residuals",
       [](Level& L) {
         return field(equivalence_residual(L.dirac(), L.polar_res(), L.psi(), L.rep(),
                                           conventions::dirac_map(L.rep().config.id), L.exec()));
       }},
      {"map_rank", "dirac", CheckMode::algebraic, kAll,
       "the equivalence map is injective on the polar residuals",
       [](Level& L) {
         const ComplexField& psi = L.psi();
         const std::size_t p = L.grid().size() / 2;
         CVec v(L.rep().spinor_dim);
         for (int i = 0; i < v.size(); ++i) v[i] = psi(p, i);
         const MapRank r = equivalence_map_rank(v, L.rep(), conventions::dirac_map(L.rep().config.id));
         return value(r.inputs - r.rank);
       }},
      {"decoupling", "dirac", CheckMode::algebraic, k2D,
       "in two dimensions B does not see P and A does not see R",
       [](Level& L) {
         const Decoupling dc = decoupling_2d(L.polar(), L.conn(), L.frame(), L.params(), L.rep(), L.scheme(), L.exec());
         return value(std::max(dc.b_under_p, dc.a_under_r));
       }},
  };
  return defs;
}

const CheckDef* find_check(const std::string& name) {
  for (const auto& c : catalogue())
    if (name == c.name) return &c;
  return nullptr;
}

Tolerance default_tolerance(CheckMode mode, int order) {
  switch (mode) {
    case CheckMode::convergence: return {1e-3, order - 0.2, 1e-10};
    case CheckMode::exact: return {1e-10, 0, 0};
    case CheckMode::algebraic: return {1e-12, 0, 0};
  }
  return {};
}

/// L-inf and RMS over the valid points inside `box` that are also nodes of the
/// coarsest grid (every `stride`-th index along each axis), in point order.
ResidualStats nodal_statistics(const Field& f, const Box& box, std::size_t stride) {
  const Grid& g = f.grid();
  ResidualStats st;
  double sq = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!f.valid(p) || !box.contains(g, p)) continue;
    bool node = true;
    for (int a = 0; a < g.dimension() && node; ++a) node = g.index_along(p, a) % stride == 0;
    if (!node) continue;
    for (std::size_t c = 0; c < f.components(); ++c) {
      const double r = std::abs(f(p, c));
      if (std::isnan(r)) {
        st.linf = std::numeric_limits<double>::infinity();
        continue;
      }
      st.linf = std::max(st.linf, r);
      sq += r * r;
      ++st.count;
    }
  }
  st.l2 = st.count ? std::sqrt(sq / static_cast<double>(st.count)) : 0.0;
  return st;
}

const char* mode_name(CheckMode m) {
  switch (m) {
    case CheckMode::convergence: return "convergence";
    case CheckMode::exact: return "exact";
    case CheckMode::algebraic: return "algebraic";
  }
  return "";
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  return out;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& c : catalogue()) out.emplace_back(c.name);
  return out;
}

bool check_applies(const std::string& check, Config c) {
  const CheckDef* def = find_check(check);
  return def && (def->configs & (1u << static_cast<int>(c)));
}

bool VerificationReport::passed() const {
  for (const auto& r : records)
    if (r.gating && !r.passed) return false;
  return true;
}

std::string scenario_hash(const ScenarioSpec& spec, const RunOptions& opts) {
  json eff = {{"source", spec.source}};
  if (opts.grid) eff["grid"] = *opts.grid;
  if (opts.order) eff["order"] = *opts.order;
  if (opts.refinements) eff["refinements"] = *opts.refinements;
  return sha256_hex(eff.dump());
}

VerificationReport run_suite(const ScenarioSpec& spec, const RunOptions& opts) {
  using clock = std::chrono::steady_clock;
  VerificationReport report;
  report.scenario = spec.name;
  report.config = std::string(spec.config.name);
  report.scenario_hash = scenario_hash(spec, opts);
  report.conventions_hash = manifest_hash();
  report.order = opts.order.value_or(spec.scheme_order);
  report.refinements = opts.refinements.value_or(spec.refinements);
  if (report.order != 2 && report.order != 4) throw ConfigurationError("scheme order must be 2 or 4");
  if (report.refinements < 0) throw ConfigurationError("refinements must be >= 0");

  std::vector<AxisSpec> axes = spec.axes;
  if (opts.grid)
    for (auto& a : axes) a.count = *opts.grid;
  const DiffScheme scheme(report.order);
  std::vector<Grid> grids{Grid(axes)};
  grids.front().require_stencil(scheme.radius());
  for (int k = 0; k < report.refinements; ++k) grids.push_back(grids.back().refined());

  // Records in declaration order: gating checks, then diagnostics.
  std::vector<std::pair<std::string, bool>> wanted;
  for (const auto& c : spec.checks) wanted.emplace_back(c, true);
  for (const auto& c : spec.diagnostics) wanted.emplace_back(c, false);
  std::vector<const CheckDef*> defs;
  for (const auto& [name, gating] : wanted) {
    CheckRecord r;
    r.scenario = spec.name;
    r.check = name;
    r.gating = gating;
    r.order = report.order;
    const CheckDef* def = find_check(name);
    if (!def) {
      r.error = "unknown check '" + name + "'";
      r.kind = "unknown";
    } else {
      r.kind = def->kind;
      r.anchor = def->anchor;
      r.mode = def->mode;
      r.tolerance = default_tolerance(def->mode, report.order);
      if (const auto it = spec.tolerances.find(name); it != spec.tolerances.end()) {
        if (it->second.linf >= 0) r.tolerance.linf = it->second.linf;
        if (it->second.min_order >= 0) r.tolerance.min_order = it->second.min_order;
        if (it->second.zero_floor >= 0) r.tolerance.zero_floor = it->second.zero_floor;
      }
      if (!(def->configs & (1u << static_cast<int>(spec.config.id)))) {
        r.error = "check '" + name + "' does not apply to " + std::string(spec.config.name);
        def = nullptr;
      } else if (def->mode == CheckMode::convergence && grids.size() < 2) {
        r.error = "a convergence check needs at least one refinement";
        def = nullptr;
      }
    }
    defs.push_back(def);
    report.records.push_back(std::move(r));
  }

  const CliffordRep rep = build_clifford(spec.config);
  std::vector<std::optional<Box>> boxes(defs.size());
  for (std::size_t lv = 0; lv < grids.size(); ++lv) {
    Level level(spec, rep, grids[lv], scheme, opts.exec);
    const bool finest = lv + 1 == grids.size();
    for (std::size_t i = 0; i < defs.size(); ++i) {
      CheckRecord& rec = report.records[i];
      if (!defs[i] || rec.error) continue;
      const auto t0 = clock::now();
      try {
        const Outcome out = defs[i]->run(level);
        LevelStats st;
        for (int a = 0; a < grids[lv].dimension(); ++a) st.grid.push_back(grids[lv].count(a));
        if (out.field) {
          // Convergence statistics are taken at the coarsest level's nodes inside
          // its valid box, so every level is sampled at the same points.
          ResidualStats rs;
          if (defs[i]->mode == CheckMode::convergence) {
            if (!boxes[i]) boxes[i] = valid_box(grids[lv], out.field->margin());
            rs = nodal_statistics(*out.field, *boxes[i], std::size_t{1} << lv);
          } else {
            rs = statistics(*out.field);
          }
          if (rs.count == 0) throw GridError("no valid points left for this check; enlarge the grid");
          st.linf = rs.linf;
          st.l2 = rs.l2;
          if (finest && opts.fields_dir) {
            std::filesystem::create_directories(*opts.fields_dir);
            const std::string base = *opts.fields_dir + "/" + sanitize(spec.name) + "." + sanitize(rec.check);
            write_csv(*out.field, base + ".csv");
            write_binary(*out.field, base + ".bin");
          }
        } else {
          st.linf = st.l2 = std::abs(out.value);
        }
        rec.levels.push_back(std::move(st));
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.runtime += std::chrono::duration<double>(clock::now() - t0).count();
    }
  }

  for (CheckRecord& rec : report.records) {
    if (rec.error || rec.levels.empty()) {
      rec.passed = false;
      continue;
    }
    const Tolerance& tol = rec.tolerance;
    const double fine = rec.levels.back().linf;
    switch (rec.mode) {
      case CheckMode::convergence: {
        const double coarse = rec.levels[rec.levels.size() - 2].linf;
        if (fine <= tol.zero_floor) {
          rec.passed = true;
        } else {
          rec.observed_order = std::log2(coarse / fine);
          rec.passed = *rec.observed_order >= tol.min_order && fine <= tol.linf;
        }
        break;
      }
      case CheckMode::exact:
      case CheckMode::algebraic: {
        rec.passed = true;
        for (const auto& l : rec.levels) rec.passed = rec.passed && l.linf <= tol.linf;
        break;
      }
    }
  }
  return report;
}

json report_to_json(const VerificationReport& r, bool timings) {
  json records = json::array();
  for (const auto& c : r.records) {
    json j;
    j["scenario"] = c.scenario;
    j["check"] = c.check;
    j["kind"] = c.kind;
    j["anchor"] = c.anchor;
    j["mode"] = mode_name(c.mode);
    j["gating"] = c.gating;
    j["order"] = c.order;
    j["grid"] = c.levels.empty() ? json::array() : json(c.levels.back().grid);
    j["Linf"] = c.levels.empty() ? json(nullptr) : json(c.levels.back().linf);
    j["L2"] = c.levels.empty() ? json(nullptr) : json(c.levels.back().l2);
    j["observed_order"] = c.observed_order ? json(*c.observed_order) : json(nullptr);
    json levels = json::array();
    for (const auto& l : c.levels) levels.push_back({{"grid", l.grid}, {"Linf", l.linf}, {"L2", l.l2}});
    j["levels"] = levels;
    json tol = {{"linf", c.tolerance.linf}};
    if (c.mode == CheckMode::convergence) {
      tol["min_order"] = c.tolerance.min_order;
      tol["zero_floor"] = c.tolerance.zero_floor;
    }
    j["tolerance"] = tol;
    j["status"] = c.error ? "error" : c.passed ? "pass" : "fail";
    j["error"] = c.error ? json(*c.error) : json(nullptr);
    if (timings) j["runtime"] = c.runtime;
    records.push_back(std::move(j));
  }
  return {{"scenario", r.scenario},
          {"config", r.config},
          {"scenario_hash", r.scenario_hash},
          {"conventions_hash", r.conventions_hash},
          {"order", r.order},
          {"refinements", r.refinements},
          {"passed", r.passed()},
          {"records", records}};
}

}  // namespace topo
