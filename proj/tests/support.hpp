#pragma once

#include <random>

#include "topo/algebra.hpp"

namespace topo::testing {

inline constexpr Config kAllConfigs[] = {Config::D4_13, Config::D2_11, Config::D2_02, Config::D3_EUC};

inline CliffordRep rep_of(Config c) { return build_clifford(SignatureConfig::of(c)); }

inline CVec random_spinor(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = {g(rng), g(rng)};
  return v;
}

// Gaussian spinors that pass the polar degeneracy test with room to spare.
CVec nondegenerate_spinor(std::mt19937_64& rng, const CliffordRep& rep);

}  // namespace topo::testing
