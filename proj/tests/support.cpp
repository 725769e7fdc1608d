#include "support.hpp"

#include "topo/spinor.hpp"

namespace topo::testing {

CVec nondegenerate_spinor(std::mt19937_64& rng, const CliffordRep& rep) {
  for (;;) {
    const CVec v = random_spinor(rng, rep.spinor_dim);
    const Bilinears b = bilinears(v, rep);
    const double dens = v.norm() * v.norm();
    double q = 0;
    switch (rep.config.id) {
      case Config::D4_13:
      case Config::D2_11: q = b.Phi * b.Phi + b.Theta * b.Theta; break;
      case Config::D2_02: q = b.Phi * b.Phi - b.Theta * b.Theta; break;
      case Config::D3_EUC: q = b.Phi * b.Phi; break;
    }
    if (q > 1e-2 * dens * dens) return v;
  }
}

}  // namespace topo::testing
