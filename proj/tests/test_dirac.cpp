#include <doctest.h>

#include <random>

#include "support.hpp"
#include "topo/conventions.hpp"
#include "topo/dirac.hpp"

using namespace topo;
using namespace topo::testing;

TEST_CASE("calibration reproduces the frozen map coefficients") {
  for (Config c : kAllConfigs) {
    CAPTURE(SignatureConfig::of(c).name);
    const Calibration cal = calibrate_dirac_map(c);
    const conventions::DiracMap frozen = conventions::dirac_map(c);
    CHECK(cal.map.a == frozen.a);
    CHECK(cal.map.b == frozen.b);
    CHECK(cal.residual <= 1e-10);
    CHECK(cal.runner_up >= 1e-3);
  }
}

TEST_CASE("calibration does not depend on the seed") {
  const Calibration a = calibrate_dirac_map(Config::D2_11, 1u);
  const Calibration b = calibrate_dirac_map(Config::D2_11, 2u);
  CHECK(a.map.a == b.map.a);
  CHECK(a.map.b == b.map.b);
}

TEST_CASE("equivalence map is injective") {
  std::mt19937_64 rng(4);
  for (Config c : kAllConfigs) {
    CAPTURE(SignatureConfig::of(c).name);
    const CliffordRep rep = rep_of(c);
    for (int k = 0; k < 50; ++k) {
      const MapRank r = equivalence_map_rank(nondegenerate_spinor(rng, rep), rep, conventions::dirac_map(c));
      CHECK(r.rank == r.inputs);
      CHECK(r.smallest_pivot > 1e-6);
    }
  }
}

TEST_CASE("a wrong coefficient loses injectivity or the residual") {
  // With b = 0 the B half of the map vanishes.
  const CliffordRep rep = rep_of(Config::D4_13);
  std::mt19937_64 rng(2);
  const MapRank r = equivalence_map_rank(nondegenerate_spinor(rng, rep), rep, {cplx(0, 0), cplx(1, 0)});
  CHECK(r.rank < r.inputs);
}
