// Acceptance run: one pass/fail line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topo/algebra.hpp"
#include "topo/expr.hpp"
#include "topo/scenario.hpp"
#include "topo/spinor.hpp"

#ifndef TOPO_SCENARIO_DIR
#define TOPO_SCENARIO_DIR "scenarios"
#endif

using namespace topo;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr Config kConfigs[] = {Config::D4_13, Config::D2_11, Config::D2_02, Config::D3_EUC};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Golden suite ----------------------------------------------------------------

struct Golden {
  std::map<std::string, VerificationReport> reports;
  std::map<std::string, std::string> dumps;
  double seconds = 0;
};

Golden run_golden(const std::string& dir, int workers) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  Golden g;
  const auto t0 = Clock::now();
  for (const auto& f : files) {
    const ScenarioSpec spec = load_scenario(f.string());
    RunOptions o;
    o.exec.workers = workers;
    VerificationReport r = run_suite(spec, o);
    g.dumps[spec.name] = report_to_json(r).dump(2);
    g.reports[spec.name] = std::move(r);
  }
  g.seconds = seconds_since(t0);
  return g;
}

const CheckRecord* find(const Golden& g, const std::string& scenario, const std::string& check) {
  auto it = g.reports.find(scenario);
  if (it == g.reports.end()) return nullptr;
  for (const auto& r : it->second.records)
    if (r.check == check) return &r;
  return nullptr;
}

// Convergence record: order >= 1.8 and finest Linf <= 1e-3, or a residual at
// the rounding floor (the discrete identity then holds exactly).
void require_converges(Outcome& o, const Golden& g, const std::string& scenario, const std::string& check) {
  const CheckRecord* r = find(g, scenario, check);
  const std::string tag = scenario + "/" + check;
  if (!r) return o.require(false, tag + " missing");
  if (r->error) return o.require(false, tag + " error: " + *r->error);
  const double linf = r->levels.back().linf;
  const bool exact = linf <= r->tolerance.zero_floor;
  const bool ordered = r->observed_order && *r->observed_order >= 1.8 && linf <= r->tolerance.linf;
  o.require(exact || ordered, tag + " Linf " + fmt("%.2e", linf) +
                                  (r->observed_order ? " order " + fmt("%.2f", *r->observed_order) : ""));
}

void require_below(Outcome& o, const Golden& g, const std::string& scenario, const std::string& check, double tol) {
  const CheckRecord* r = find(g, scenario, check);
  const std::string tag = scenario + "/" + check;
  if (!r) return o.require(false, tag + " missing");
  if (r->error) return o.require(false, tag + " error: " + *r->error);
  double worst = 0;
  for (const auto& l : r->levels) worst = std::max(worst, l.linf);
  o.require(worst <= tol, tag + " Linf " + fmt("%.2e", worst));
}

// Criteria ----------------------------------------------------------------------

Outcome algebra_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  for (Config c : kConfigs) {
    const CliffordRep rep = build_clifford(SignatureConfig::of(c));
    const std::string n(rep.config.name);
    o.require(check_invariants(rep).max() <= 1e-12, n + " invariants");
    o.require(check_trilinear_identity(rep).linf <= 1e-12, n + " triple products");
    if (rep.dimension() == 4) {
      std::vector<double> t(16, 0.0);
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) t[a * 4 + b] = -(t[b * 4 + a] = 0.1 * (a + 2 * b));
      const auto mm = hodge_dual_pair(rep, hodge_dual_pair(rep, t));
      double r = 0;
      for (int i = 0; i < 16; ++i) r = std::max(r, std::abs(mm[i] + t[i]));
      o.require(r <= 1e-12, n + " double dual");
    }
  }
  const double s = seconds_since(t0);
  o.require(s < 1.0, "runtime " + fmt("%.2f s", s));
  if (o.pass) o.detail = "4 configurations, " + fmt("%.3f s", s);
  return o;
}

Outcome fierz_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  double worst = 0;
  for (Config c : kConfigs) {
    const CliffordRep rep = build_clifford(SignatureConfig::of(c));
    for (int k = 0; k < 1000; ++k) {
      CVec psi(rep.spinor_dim);
      for (int i = 0; i < rep.spinor_dim; ++i) psi[i] = {gauss(rng), gauss(rng)};
      psi = psi * (1.0 / psi.norm());
      worst = std::max(worst, fierz_residuals(psi, rep).max());
    }
  }
  const double s = seconds_since(t0);
  o.require(worst <= 1e-12, "max residual " + fmt("%.2e", worst));
  o.require(s < 5.0, "runtime " + fmt("%.2f s", s));
  if (o.pass) o.detail = "4000 spinors, max " + fmt("%.1e", worst) + ", " + fmt("%.3f s", s);
  return o;
}

Outcome polar_suite() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  double roundtrip = 0, relation = 0;
  for (Config c : kConfigs) {
    const CliffordRep rep = build_clifford(SignatureConfig::of(c));
    const int d = rep.dimension(), n = rep.spinor_dim;
    const std::size_t pts = d == 4 ? 6 : d == 3 ? 8 : 12;
    const Grid g(std::vector<AxisSpec>(d, AxisSpec{pts, 0.0, 1.0, Boundary::open}));
    // Random smooth field: a well nondegenerate spinor plus small random harmonics.
    std::vector<CVec> coef(1 + 2 * d, CVec(n));
    for (auto& v : coef)
      for (int i = 0; i < n; ++i) v[i] = {gauss(rng), gauss(rng)};
    for (;;) {
      const PolarPoint pp = [&] {
        try {
          return polar_decompose_point(coef[0], rep);
        } catch (const DegenerateError&) {
          return PolarPoint{};
        }
      }();
      const double dens = coef[0].norm() * coef[0].norm();
      if (2 * pp.phi * pp.phi > 0.3 * dens) break;
      for (int i = 0; i < n; ++i) coef[0][i] = {gauss(rng), gauss(rng)};
    }
    ComplexField psi(g, {n});
    for (std::size_t p = 0; p < g.size(); ++p) {
      CVec v = coef[0];
      for (int a = 0; a < d; ++a) {
        const double x = g.coordinate(p, a);
        v += coef[1 + 2 * a] * cplx(0.04 * std::sin(2 * x + a), 0) + coef[2 + 2 * a] * cplx(0.04 * std::cos(3 * x), 0);
      }
      for (int i = 0; i < n; ++i) psi(p, i) = v[i];
    }
    PolarData pd;
    try {
      pd = polar_decompose(psi, rep);
    } catch (const Error& e) {
      o.require(false, std::string(rep.config.name) + ": " + e.what());
      continue;
    }
    const ComplexField back = polar_reconstruct(pd, rep);
    for (std::size_t k = 0; k < psi.values().size(); ++k)
      roundtrip = std::max(roundtrip, std::abs(back.values()[k] - psi.values()[k]));
    for (std::size_t p = 0; p < g.size(); ++p) {
      CVec v(n);
      for (int i = 0; i < n; ++i) v[i] = psi(p, i);
      const Bilinears b = bilinears(v, rep);
      const double phi = pd.phi(p, 0), p2 = 2 * phi * phi;
      const double ang = pd.angle ? (*pd.angle)(p, 0) : 0.0;
      switch (c) {
        case Config::D4_13:
        case Config::D2_11:
          relation = std::max({relation, std::abs(b.Phi - p2 * std::cos(ang)), std::abs(b.Theta - p2 * std::sin(ang))});
          break;
        case Config::D2_02:
          relation = std::max({relation, std::abs(b.Phi - p2 * std::cosh(ang)), std::abs(b.Theta + p2 * std::sinh(ang))});
          break;
        case Config::D3_EUC:
          relation = std::max(relation, std::abs(b.Phi - phi * phi));
          break;
      }
    }
  }
  o.require(roundtrip <= 1e-10, "round trip " + fmt("%.2e", roundtrip));
  o.require(relation <= 1e-12, "bilinear relations " + fmt("%.2e", relation));
  if (o.pass) o.detail = "round trip " + fmt("%.1e", roundtrip) + ", relations " + fmt("%.1e", relation);
  return o;
}

Outcome curvature(const Golden& g) {
  Outcome o;
  require_converges(o, g, "sphere2d_patch", "riemann");
  require_converges(o, g, "sphere2d_patch", "ricci_scalar");
  require_converges(o, g, "boost4d", "riemann");
  require_converges(o, g, "boost4d", "sigma_curvature");
  require_converges(o, g, "gauge4d_periodic", "maxwell");
  if (o.pass) o.detail = "sphere2d_patch, boost4d, gauge4d_periodic";
  return o;
}

Outcome divergence(const Golden& g) {
  Outcome o;
  for (const char* s : {"sphere2d_patch", "torus2d_conformal", "euclid2d", "lorentz2d"}) {
    require_converges(o, g, s, "div_G2");
    require_converges(o, g, s, "div_K2");
  }
  for (const char* s : {"boost4d", "gauge4d_periodic"}) {
    require_converges(o, g, s, "div_G4");
    require_converges(o, g, s, "div_K4");
  }
  require_below(o, g, "gauge4d_periodic", "pure_gauge_k4", 1e-10);
  require_below(o, g, "gauge4d_periodic", "g4_vanishes", 1e-12);
  require_converges(o, g, "curved3d", "div_G3");
  require_converges(o, g, "curved3d", "div_K3");
  require_below(o, g, "flat3d_gauge", "flat_g3", 1e-10);
  o.require(g.seconds < 60.0, "golden suite " + fmt("%.1f s", g.seconds));
  if (o.pass) o.detail = "golden suite " + fmt("%.1f s", g.seconds) + " single worker";
  return o;
}

Outcome torus(const Golden& g) {
  Outcome o;
  require_below(o, g, "torus2d_conformal", "euler_integral", 1e-8);
  if (o.pass) o.detail = "integral " + fmt("%.1e", find(g, "torus2d_conformal", "euler_integral")->levels.back().linf);
  return o;
}

Outcome dirac(const Golden& g) {
  Outcome o;
  for (const char* c : {"dirac", "polar_A", "polar_B"}) require_below(o, g, "flat4d_planewave", c, 1e-10);
  require_converges(o, g, "boost4d", "equivalence");
  require_below(o, g, "flat3d_wave", "constraint", 1e-10);
  require_below(o, g, "flat3d_wave", "dirac", 1e-10);
  require_below(o, g, "lorentz2d", "decoupling", 1e-12);
  if (o.pass) o.detail = "plane wave, equivalence, 3D constraint, 2D decoupling";
  return o;
}

Outcome commutator(const Golden& g) {
  Outcome o;
  for (const char* c : {"commutator", "bianchi", "cauchy", "bianchi_total"}) require_converges(o, g, "boost4d", c);
  if (o.pass) o.detail = "boost4d";
  return o;
}

Outcome determinism(const Golden& a, const Golden& b, const Golden& w4) {
  Outcome o;
  o.require(a.dumps == b.dumps, "repeated reports differ");
  double worst = 0;
  for (const auto& [name, ra] : a.reports) {
    const auto it = w4.reports.find(name);
    if (it == w4.reports.end() || it->second.records.size() != ra.records.size()) {
      o.require(false, name + " record sets differ");
      continue;
    }
    for (std::size_t i = 0; i < ra.records.size(); ++i) {
      const CheckRecord &x = ra.records[i], &y = it->second.records[i];
      o.require(x.check == y.check && x.passed == y.passed && x.error.has_value() == y.error.has_value(),
                name + "/" + x.check + " status differs");
      for (std::size_t l = 0; l < std::min(x.levels.size(), y.levels.size()); ++l) {
        const double d = std::abs(x.levels[l].linf - y.levels[l].linf);
        worst = std::max(worst, d / std::max(1.0, std::abs(x.levels[l].linf)));
      }
    }
  }
  o.require(worst <= 1e-13, "W=1 vs W=4 residuals differ by " + fmt("%.2e", worst));
  if (o.pass) o.detail = std::to_string(a.reports.size()) + " reports byte-identical; W=1/W=4 max diff " + fmt("%.1e", worst);
  return o;
}

Outcome parser() {
  Outcome o;
  const std::vector<std::string> vars{"x", "y"};
  struct Value {
    const char* text;
    double expect;
  };
  const double pi = 4 * std::atan(1.0);
  const std::vector<Value> values{
      {"1 + 2*3", 7},          {"(1 + 2)*3", 9},        {"2^3^2", 512},         {"-2^2", -4},
      {"2^-1", 0.5},           {"8/2/2", 2},            {"1 - 2 - 3", -4},      {"--3", 3},
      {"2*sin(x)^2", 2},       {"atan2(1, 1)", pi / 4}, {"pi/2", pi / 2},       {"exp(ln(3))", 3},
      {"sqrt(16)", 4},         {"x*y", pi},             {"cosh(0) + tanh(0)", 1}, {"1.5e1 + .5", 15.5},
      {"x - (y - 1)", pi / 2 - 1},
  };
  const double at[2] = {pi / 2, 2.0};
  int cases = 0;
  for (const auto& v : values) {
    ++cases;
    try {
      const Expression e = parse_expression(v.text, vars);
      const double got = e.evaluate(at);
      o.require(std::abs(got - v.expect) <= 1e-12 * std::max(1.0, std::abs(v.expect)), std::string(v.text) + " value");
      o.require(parse_expression(e.print(), vars) == e, std::string(v.text) + " round trip");
    } catch (const Error& e) {
      o.require(false, std::string(v.text) + ": " + e.what());
    }
  }
  struct Bad {
    const char* text;
    std::size_t offset;
  };
  const std::vector<Bad> bad{{"1 +", 3}, {"", 0},      {"(1 + 2", 6}, {"1 + * 2", 4}, {"foo", 0},  {"x + bar(1)", 4},
                             {"sin()", 4}, {"atan2(1)", 0}, {"1 2", 2}, {"x $ y", 2},  {"2^", 2},  {"1e", 2},
                             {")", 0},   {"sin(1, 2)", 0}};
  for (const auto& b : bad) {
    ++cases;
    try {
      parse_expression(b.text, vars);
      o.require(false, std::string("'") + b.text + "' parsed");
    } catch (const ParseError& e) {
      o.require(e.offset() == b.offset, std::string("'") + b.text + "' offset " + std::to_string(e.offset()));
    }
  }
  o.require(cases >= 30, "only " + std::to_string(cases) + " cases");
  if (o.pass) o.detail = std::to_string(cases) + " cases";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string dir = TOPO_SCENARIO_DIR;
  int workers = 4, only = 0;
  app.add_option("--scenarios", dir, "Golden scenario directory");
  app.add_option("--only", only, "Run a single criterion")->check(CLI::Range(1, 10));
  app.add_option("--parallel-workers", workers, "Worker count compared against the single-worker run");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<int, std::function<Outcome()>>> plan;
  Golden first, second, parallel;
  bool golden_ok = true;
  std::string golden_error;
  const bool needs_golden = only == 0 || (only >= 4 && only <= 9);
  try {
    if (!needs_golden) throw std::runtime_error("not run");
    first = run_golden(dir, 1);
    second = run_golden(dir, 1);
    parallel = run_golden(dir, workers);
  } catch (const std::exception& e) {
    golden_ok = false;
    golden_error = e.what();
  }
  auto golden = [&](std::function<Outcome()> f) {
    return [=, &golden_ok, &golden_error]() {
      if (!golden_ok) return Outcome{false, "golden suite failed: " + golden_error};
      return f();
    };
  };

  plan.emplace_back(1, algebra_suite);
  plan.emplace_back(2, fierz_suite);
  plan.emplace_back(3, polar_suite);
  plan.emplace_back(4, golden([&] { return curvature(first); }));
  plan.emplace_back(5, golden([&] { return divergence(first); }));
  plan.emplace_back(6, golden([&] { return torus(first); }));
  plan.emplace_back(7, golden([&] { return dirac(first); }));
  plan.emplace_back(8, golden([&] { return commutator(first); }));
  plan.emplace_back(9, golden([&] { return determinism(first, second, parallel); }));
  plan.emplace_back(10, parser);

  bool all = true;
  for (auto& [n, f] : plan) {
    if (only && n != only) continue;
    Outcome r;
    try {
      r = f();
    } catch (const std::exception& e) {
      r = {false, e.what()};
    }
    all = all && r.pass;
    std::printf("criterion %2d: %s  %s\n", n, r.pass ? "PASS" : "FAIL", r.detail.c_str());
  }
  return all ? 0 : 1;
}
