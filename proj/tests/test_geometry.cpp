#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "topo/geometry.hpp"

using namespace topo;
using topo::testing::rep_of;

namespace {

struct Sphere {
  Grid grid;
  FrameField frame;
  Field metric, lambda, c, riemann;
};

// Round sphere of radius a on a patch away from the poles, coordinates (th, ph).
Sphere sphere(std::size_t n, double a, int order = 2) {
  Sphere s;
  s.grid = Grid({{n, 0.6, 2.4, Boundary::open}, {n, 0.0, 1.5, Boundary::open}});
  Field e(s.grid, {2, 2});
  for (std::size_t p = 0; p < s.grid.size(); ++p) {
    e(p, 0) = a;
    e(p, 3) = a * std::sin(s.grid.coordinate(p, 0));
  }
  const SignatureConfig sig = SignatureConfig::of(Config::D2_02);
  const DiffScheme ds(order);
  s.frame = make_frame(std::move(e));
  s.metric = metric_from_frame(s.frame, sig);
  s.lambda = levi_civita(s.metric, ds);
  s.c = spin_connection(s.frame, s.lambda, sig, ds);
  s.riemann = riemann_from_spin_connection(s.c, sig, ds);
  return s;
}

double ricci_error(std::size_t n, double a) {
  const Sphere s = sphere(n, a);
  const Field r = ricci_scalar_field(s.riemann, s.frame, SignatureConfig::of(Config::D2_02));
  Field err(s.grid, {}, r.margin());
  for (std::size_t p = 0; p < s.grid.size(); ++p) err(p, 0) = r(p, 0) - 2.0 / (a * a);
  return statistics(err, valid_box(sphere(9, a).grid, r.margin())).linf;
}

}  // namespace

TEST_CASE("metric from frame") {
  const Sphere s = sphere(9, 2.0);
  const std::size_t p = 4 * 9 + 4;
  const double th = s.grid.coordinate(p, 0);
  CHECK(s.metric(p, 0) == doctest::Approx(4.0));
  CHECK(s.metric(p, 1) == doctest::Approx(0.0));
  CHECK(s.metric(p, 3) == doctest::Approx(4.0 * std::sin(th) * std::sin(th)));
  CHECK(s.frame.einv(p, 3) == doctest::Approx(1.0 / (2.0 * std::sin(th))));
}

TEST_CASE("christoffel symbols of the sphere") {
  const Sphere s = sphere(33, 1.0, 4);
  const std::size_t p = 16 * 33 + 16;
  const double th = s.grid.coordinate(p, 0);
  // Lambda^th_{ph ph} = -sin cos, Lambda^ph_{th ph} = cot
  CHECK(s.lambda(p, 0 * 4 + 1 * 2 + 1) == doctest::Approx(-std::sin(th) * std::cos(th)).epsilon(1e-6));
  CHECK(s.lambda(p, 1 * 4 + 0 * 2 + 1) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-6));
  CHECK(s.lambda(p, 0) == doctest::Approx(0.0));
}

TEST_CASE("sphere Ricci scalar converges at second order") {
  const double e1 = ricci_error(17, 1.5), e2 = ricci_error(33, 1.5);
  CHECK(e2 < 5e-3);
  CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("degenerate frames are rejected") {
  const Grid g({{5, 0, 1, Boundary::periodic}, {5, 0, 1, Boundary::periodic}});
  Field e(g, {2, 2});
  for (std::size_t p = 0; p < g.size(); ++p) e(p, 0) = e(p, 1) = 1.0;
  CHECK_THROWS_AS(make_frame(std::move(e)), DegenerateError);
}

TEST_CASE("flat frames have no curvature") {
  const Grid g({{6, 0, 1, Boundary::periodic}, {6, 0, 1, Boundary::periodic}, {6, 0, 1, Boundary::periodic}});
  Field e(g, {3, 3});
  for (std::size_t p = 0; p < g.size(); ++p) e(p, 0) = e(p, 4) = e(p, 8) = 1.0;
  const SignatureConfig sig = SignatureConfig::of(Config::D3_EUC);
  const FrameField f = make_frame(std::move(e));
  const Field m = metric_from_frame(f, sig);
  const Field lam = levi_civita(m, DiffScheme(2));
  const Field c = spin_connection(f, lam, sig, DiffScheme(2));
  const Field r = riemann_from_spin_connection(c, sig, DiffScheme(2));
  for (double v : r.values()) CHECK(v == 0.0);
}

TEST_CASE("pointwise densities on constant curvature") {
  // Maximally symmetric: R_{abcd} = k (eta_ac eta_bd - eta_ad eta_bc).
  for (Config cfg : {Config::D2_02, Config::D2_11, Config::D4_13}) {
    CAPTURE(SignatureConfig::of(cfg).name);
    const CliffordRep rep = rep_of(cfg);
    const SignatureConfig& sig = rep.config;
    const int d = sig.dimension;
    const double k = 0.7;
    tensor::T4 rw{};
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e)
            rw[tensor::i4(a, b, c, e)] =
                k * ((a == c && b == e ? sig.eta[a] * sig.eta[b] : 0) - (a == e && b == c ? sig.eta[a] * sig.eta[b] : 0));
    const double r = ricci_scalar(rw, sig);
    CHECK(std::abs(r) == doctest::Approx(d * (d - 1) * k));
    if (d == 2) CHECK(std::abs(euler2d_density(rw, sig)) == doctest::Approx(std::abs(r) / 2));
    if (d == 4) {
      CHECK(pontryagin4d_density(rw, sig, rep.epsilon) == doctest::Approx(0.0));
      CHECK(euler4d_density(rw, rep.epsilon, 1) == doctest::Approx(euler4d_density(rw, rep.epsilon, -1)));
      CHECK(std::abs(gauss_bonnet(rw, sig)) == doctest::Approx(24 * k * k));
    }
  }
}

TEST_CASE("pontryagin density flips with orientation") {
  const CliffordRep rep = rep_of(Config::D4_13);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const PairIndex pi(4);
  std::vector<double> packed(36);
  for (double& v : packed) v = g(rng);
  tensor::T4 rw;
  tensor::unpack_pair_pair(packed, pi, rw);
  const double p1 = pontryagin4d_density(rw, rep.config, rep.epsilon, 1);
  const double p2 = pontryagin4d_density(rw, rep.config, rep.epsilon, -1);
  CHECK(p1 != 0.0);
  CHECK(p1 == doctest::Approx(-p2));
}
