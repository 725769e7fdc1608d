#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "topo/polarconn.hpp"

using namespace topo;
using topo::testing::rep_of;

namespace {

Grid open_box(int d, std::size_t n) {
  std::vector<AxisSpec> axes(d, AxisSpec{n, 0.0, 0.8, Boundary::open});
  return Grid(axes);
}

ComplexField group_field(const Grid& g, const CliffordRep& rep, double q) {
  const int n = rep.spinor_dim;
  ComplexField L(g, {n, n});
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double t = g.coordinate(p, 0), x = g.coordinate(p, 1), y = g.coordinate(p, 2);
    const CMat m = generator_exp(rep, "boost_x", 0.3 * t - 0.2 * x, q) * generator_exp(rep, "phase", 0.5 * y + 0.1, q);
    for (int i = 0; i < n * n; ++i) L(p, i) = m(i / n, i % n);
  }
  return L;
}

}  // namespace

TEST_CASE("group differences are exact on commuting one-parameter subgroups") {
  const CliffordRep rep = rep_of(Config::D4_13);
  const Grid g = open_box(4, 5);
  const double q = 1.5;
  const LieLog lie = lie_log_derivative(group_field(g, rep, q), rep, q, DiffScheme(2));
  const std::size_t p = g.size() / 2;
  REQUIRE(lie.dzeta.valid(p));
  const PairIndex pi(4);
  const int k01 = pi.index(0, 1);
  CHECK(lie.dzeta_ij(p, k01 * 4 + 0) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(lie.dzeta_ij(p, k01 * 4 + 1) == doctest::Approx(-0.2).epsilon(1e-13));
  CHECK(std::abs(lie.dzeta_ij(p, pi.index(2, 3) * 4 + 2)) < 1e-13);
  CHECK(lie.dzeta(p, 2) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(lie.dzeta(p, 0)) < 1e-13);
}

TEST_CASE("a phase with zero charge is rejected") {
  const CliffordRep rep = rep_of(Config::D4_13);
  const Grid g = open_box(4, 5);
  CHECK_THROWS_AS(lie_log_derivative(group_field(g, rep, 1.0), rep, 0.0, DiffScheme(2)), ValidationError);
}

TEST_CASE("plain differences leave the algebra, group differences do not") {
  const CliffordRep rep = rep_of(Config::D4_13);
  const Grid g = open_box(4, 5);
  ComplexField L(g, {4, 4});
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double t = g.coordinate(p, 0), x = g.coordinate(p, 1);
    const CMat m = generator_exp(rep, "boost_x", 2.0 * x, 1.0) * generator_exp(rep, "rot_xy", 1.5 * x + t, 1.0) *
                   generator_exp(rep, "boost_z", 0.8 * x * x, 1.0);
    for (int i = 0; i < 16; ++i) L(p, i) = m(i / 4, i % 4);
  }
  CHECK(plain_log_derivative_remainder(L, rep, DiffScheme(2)) > 1e-6);
  CHECK_NOTHROW(lie_log_derivative(L, rep, 1.0, DiffScheme(2)));
}

TEST_CASE("field strength of a linear potential") {
  const Grid g = open_box(2, 6);
  Field a(g, {2});
  for (std::size_t p = 0; p < g.size(); ++p) {
    a(p, 0) = 0.25 * g.coordinate(p, 1);
    a(p, 1) = 0.5 * g.coordinate(p, 0);
  }
  const Field f = field_strength(a, DiffScheme(2));
  const Field m = maxwell_from_potential(a, DiffScheme(2));
  const std::size_t p = 2 * 6 + 3;
  CHECK(f(p, 0) == doctest::Approx(0.25));
  CHECK(m(p, 0) == doctest::Approx(-0.25));
  CHECK(std::isnan(f(0, 0)));
}

TEST_CASE("spinorial connection") {
  const CliffordRep rep = rep_of(Config::D2_11);
  const std::vector<double> c{0.4, -0.1};  // C_{01 mu}
  const std::vector<double> a{0.3, 0.0};
  const CMat om = spinor_connection(c, a, 2.0, 0, rep);
  const CMat expect = rep.sig(0, 1) * 0.4 + CMat::identity(2) * cplx(0, 0.6);
  CHECK((om - expect).max_abs() < 1e-15);
}

TEST_CASE("difference norm is pointwise max-abs") {
  const Grid g = open_box(1, 4);
  Field a(g, {2}), b(g, {2});
  a(1, 0) = 1.0;
  b(1, 1) = -2.5;
  const Field d = difference_norm(a, b);
  CHECK(d(1, 0) == 2.5);
  CHECK(d(0, 0) == 0.0);
}
