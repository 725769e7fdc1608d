#include <doctest.h>

#include <random>

#include "support.hpp"
#include "topo/currents.hpp"

using namespace topo;
using topo::testing::rep_of;

namespace {

void random_tensors(std::mt19937_64& rng, int d, tensor::T3& sigma, tensor::T4& x) {
  std::normal_distribution<double> g;
  const PairIndex pi(d);
  std::vector<double> pv(pi.count() * d), pp(pi.count() * pi.count());
  for (double& v : pv) v = g(rng);
  for (double& v : pp) v = g(rng);
  tensor::unpack_pair_vec(pv, pi, d, sigma);
  tensor::unpack_pair_pair(pp, pi, x);
}

}  // namespace

TEST_CASE("current metadata") {
  CHECK(current_name(CurrentKind::K4) == "K4");
  CHECK(current_dimension(CurrentKind::G3) == 3);
  CHECK(current_is_axial(CurrentKind::K2));
  CHECK_FALSE(current_is_axial(CurrentKind::G4));
}

TEST_CASE("axial kernels flip with orientation, polar ones do not") {
  const CliffordRep rep = rep_of(Config::D4_13);
  std::mt19937_64 rng(9);
  tensor::T3 sigma;
  tensor::T4 x;
  random_tensors(rng, 4, sigma, x);
  const auto k_plus = kernels::k4(sigma, x, rep.config, rep.epsilon, 1);
  const auto k_minus = kernels::k4(sigma, x, rep.config, rep.epsilon, -1);
  const auto g_plus = kernels::g4(sigma, x, rep.config, rep.epsilon, 1);
  const auto g_minus = kernels::g4(sigma, x, rep.config, rep.epsilon, -1);
  for (int a = 0; a < 4; ++a) {
    CHECK(k_plus[a] == doctest::Approx(-k_minus[a]));
    CHECK(g_plus[a] == doctest::Approx(g_minus[a]));
  }
  CHECK(kernels::k4_density(x, rep.config, rep.epsilon, 1) ==
        doctest::Approx(-kernels::k4_density(x, rep.config, rep.epsilon, -1)));
  CHECK(kernels::g4_density(x, rep.config, rep.epsilon, 1) ==
        doctest::Approx(kernels::g4_density(x, rep.config, rep.epsilon, -1)));
}

TEST_CASE("4D densities match the curvature characteristic classes") {
  const CliffordRep rep = rep_of(Config::D4_13);
  std::mt19937_64 rng(10);
  tensor::T3 sigma;
  tensor::T4 x;
  random_tensors(rng, 4, sigma, x);
  CHECK(kernels::k4_density(x, rep.config, rep.epsilon, 1) ==
        doctest::Approx(pontryagin4d_density(x, rep.config, rep.epsilon, 1)));
  CHECK(std::abs(kernels::g4_density(x, rep.config, rep.epsilon, 1)) ==
        doctest::Approx(std::abs(euler4d_density(x, rep.epsilon, 1))));
}

TEST_CASE("missing inputs are reported") {
  const CliffordRep rep = rep_of(Config::D2_02);
  CHECK_THROWS_AS(topological_current(CurrentKind::G2, CurrentInputs{}, rep, DiffScheme(2)), MissingFieldError);
  CHECK_THROWS_AS(topological_current(CurrentKind::G4, CurrentInputs{}, rep, DiffScheme(2)), Error);
}
