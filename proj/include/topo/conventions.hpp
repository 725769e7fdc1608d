#pragma once

#include <string>
#include <string_view>

#include "topo/types.hpp"

namespace topo {

enum class Config { D4_13, D2_11, D2_02, D3_EUC };

/// Frozen sign and ordering conventions. Every module reads its signs from here.
namespace conventions {

/// Value of the world Levi-Civita symbol with all indices lowered at (0,1,...).
inline constexpr int kEpsilonLower = +1;

/// Tolerance for the duality relation that defines the parity matrix.
inline constexpr double kParityTolerance = 1e-14;

/// Degeneracy threshold for polar decomposition, relative to (psi^dagger psi)^2.
inline constexpr double kDegeneracyThreshold = 1e-10;

/// Coefficients of the equivalence map
///   D psi = 1/2 (b * i B_nu gamma^nu + a * A_nu gamma^nu pi) psi        (even dims)
///   D psi = 1/2 (b * i B_nu gamma^nu + a * constraint) psi             (3D)
/// Values were fixed by the calibration run recorded in the manifest.
struct DiracMap {
  cplx b;
  cplx a;
};
DiracMap dirac_map(Config c);

/// Inputs of the recorded calibration run.
inline constexpr unsigned kCalibrationSeed = 20240611u;
inline constexpr int kCalibrationPoints = 8;

/// Ricci scalar of the round 2-sphere of radius a is recorded as +2/a^2 under
/// the curvature formula and Ricci contraction used here.
inline constexpr int kSphereRicciSign = +1;

}  // namespace conventions
}  // namespace topo
