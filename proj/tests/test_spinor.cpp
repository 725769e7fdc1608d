#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "topo/spinor.hpp"

using namespace topo;
using namespace topo::testing;

TEST_CASE("fierz identities over random spinors") {
  std::mt19937_64 rng(7);
  for (Config c : kAllConfigs) {
    CAPTURE(SignatureConfig::of(c).name);
    const CliffordRep rep = rep_of(c);
    double worst = 0, imag = 0;
    for (int k = 0; k < 1000; ++k) {
      CVec psi = random_spinor(rng, rep.spinor_dim);
      const double n = psi.norm();
      psi = psi * (1.0 / n);
      worst = std::max(worst, fierz_residuals(psi, rep).max());
      imag = std::max(imag, bilinears(psi, rep).imag_residue);
    }
    CHECK(worst <= 1e-12);
    CHECK(imag <= 1e-14);
  }
}

TEST_CASE("polar point round trip and bilinear relations") {
  std::mt19937_64 rng(11);
  for (Config c : kAllConfigs) {
    CAPTURE(SignatureConfig::of(c).name);
    const CliffordRep rep = rep_of(c);
    for (int k = 0; k < 200; ++k) {
      const CVec psi = nondegenerate_spinor(rng, rep);
      const PolarPoint pp = polar_decompose_point(psi, rep);
      CHECK(group_residual(pp.L, rep) <= 1e-12);
      const CVec back = polar_reconstruct_point(pp.phi, pp.angle, pp.L, rep);
      CHECK((back - psi).max_abs() <= 1e-10 * std::max(1.0, psi.norm()));
      const Bilinears b = bilinears(psi, rep);
      const double p2 = 2 * pp.phi * pp.phi;
      switch (c) {
        case Config::D4_13:
        case Config::D2_11:
          CHECK(std::abs(b.Phi - p2 * std::cos(pp.angle)) <= 1e-12 * p2);
          CHECK(std::abs(b.Theta - p2 * std::sin(pp.angle)) <= 1e-12 * p2);
          CHECK(std::abs(eta_dot(rep, pp.u, pp.u) - 1.0) <= 1e-12);
          break;
        case Config::D2_02:
          CHECK(std::abs(b.Phi - p2 * std::cosh(pp.angle)) <= 1e-12 * p2);
          CHECK(std::abs(b.Theta + p2 * std::sinh(pp.angle)) <= 1e-12 * p2);
          CHECK(std::abs(eta_dot(rep, pp.s, pp.s) - 1.0) <= 1e-12);
          break;
        case Config::D3_EUC:
          CHECK(std::abs(b.Phi - pp.phi * pp.phi) <= 1e-12 * b.Phi);
          CHECK(std::abs(eta_dot(rep, pp.s, pp.s) - 1.0) <= 1e-12);
          break;
      }
      if (c == Config::D4_13) {
        CHECK(std::abs(eta_dot(rep, pp.s, pp.s) + 1.0) <= 1e-12);
        CHECK(std::abs(eta_dot(rep, pp.u, pp.s)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("degenerate spinors are rejected") {
  const CliffordRep rep4 = rep_of(Config::D4_13);
  // Purely left-handed: Phi = Theta = 0.
  CHECK_THROWS_AS(polar_decompose_point(CVec{1, 0.3, 0, 0}, rep4), DegenerateError);
  CHECK_THROWS_AS(polar_decompose_point(CVec{0, 0, 0, 0}, rep4), DegenerateError);
  const CliffordRep rep2 = rep_of(Config::D2_02);
  CHECK_THROWS_AS(polar_decompose_point(CVec{1, 0}, rep2), DegenerateError);
}

TEST_CASE("reconstruction requires a spin-group element") {
  const CliffordRep rep = rep_of(Config::D4_13);
  CHECK_THROWS_AS(polar_reconstruct_point(1.0, 0.0, CMat::identity(4) * 2.0, rep), GroupError);
  const CMat boost = spin_boost(rep, {0, 0, 1}, 0.4);
  CHECK(group_residual(boost, rep) <= 1e-14);
  CHECK(group_residual(spin_rotation(rep, {0, 1, 0}, 1.1), rep) <= 1e-14);
}

TEST_CASE("named generators") {
  const CliffordRep rep = rep_of(Config::D4_13);
  CHECK(generator_valid(rep, "boost_x"));
  CHECK(generator_valid(rep, "sigma_13"));
  CHECK_FALSE(generator_valid(rep, "rot"));
  CHECK_THROWS_AS(generator_exp(rep, "rot", 0.1, 1.0), ConfigurationError);
  const CMat ph = generator_exp(rep, "phase", 0.5, 2.0);
  CHECK(std::abs(ph(0, 0) - std::polar(1.0, 1.0)) < 1e-15);
  const CliffordRep rep3 = rep_of(Config::D3_EUC);
  CHECK_FALSE(generator_valid(rep3, "boost_x"));
  CHECK(generator_valid(rep3, "rot_xy"));
  // A full turn is -1 on spinors.
  CHECK((generator_exp(rep3, "rot_xy", 2 * std::numbers::pi, 1.0) + CMat::identity(2)).max_abs() < 1e-14);
}

TEST_CASE("field decomposition unwraps the chiral angle") {
  const CliffordRep rep = rep_of(Config::D4_13);
  const Grid g({{24, 0, 1, Boundary::open}});
  ComplexField psi(g, {4});
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double x = g.coordinate(p, 0);
    const CVec v = polar_reconstruct_point(1.0 + 0.1 * x, 8.0 * x, spin_boost(rep, {1, 0, 0}, 0.3 * x), rep);
    for (int i = 0; i < 4; ++i) psi(p, i) = v[i];
  }
  PolarData pd = polar_decompose(psi, rep);
  for (std::size_t p = 0; p < g.size(); ++p)
    CHECK((*pd.angle)(p, 0) == doctest::Approx(8.0 * g.coordinate(p, 0)).epsilon(1e-12));
  const ComplexField back = polar_reconstruct(pd, rep);
  double e = 0;
  for (std::size_t k = 0; k < psi.values().size(); ++k) e = std::max(e, std::abs(back.values()[k] - psi.values()[k]));
  CHECK(e <= 1e-12);
  attach_unit_vectors(pd, rep);
  REQUIRE(pd.u);
  CHECK((*pd.u)(3, 0) == doctest::Approx(std::cosh(0.3 * g.coordinate(3, 0))));
}

TEST_CASE("field decomposition of random smooth data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Config c : kAllConfigs) {
    CAPTURE(SignatureConfig::of(c).name);
    const CliffordRep rep = rep_of(c);
    const int n = rep.spinor_dim;
    const CVec base = nondegenerate_spinor(rng, rep);
    CVec slope(n);
    for (int i = 0; i < n; ++i) slope[i] = {0.1 * u(rng), 0.1 * u(rng)};
    const Grid g({{9, 0, 1, Boundary::open}, {9, 0, 1, Boundary::open}});
    ComplexField psi(g, {n});
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double x = g.coordinate(p, 0), y = g.coordinate(p, 1);
      const CVec v = base + slope * cplx(std::sin(3 * x + y), 0);
      for (int i = 0; i < n; ++i) psi(p, i) = v[i];
    }
    const PolarData pd = polar_decompose(psi, rep);
    const ComplexField back = polar_reconstruct(pd, rep);
    double e = 0;
    for (std::size_t k = 0; k < psi.values().size(); ++k)
      e = std::max(e, std::abs(back.values()[k] - psi.values()[k]));
    CHECK(e <= 1e-10);
  }
}
