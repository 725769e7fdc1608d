#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topo/algebra.hpp"
#include "topo/grid.hpp"

namespace topo {

/// Bilinear covariants with world (upper) vector indices.
///   Phi = psibar psi;  Theta = i psibar pi psi  (psibar pi psi in D2_02)
///   U^a = psibar gamma^a psi                    (D4_13, D2_11)
///   S^a = psibar gamma^a pi psi (4D), psibar gamma^a psi (D2_02, 3D)
struct Bilinears {
  double Phi = 0;
  double Theta = 0;
  std::array<double, 4> U{};
  std::array<double, 4> S{};
  bool has_theta = false, has_u = false, has_s = false;
  /// Largest imaginary part dropped while forming the real covariants.
  double imag_residue = 0;
};

Bilinears bilinears(const CVec& psi, const CliffordRep& rep);

/// Minkowski / Euclidean product with eta.
double eta_dot(const CliffordRep& rep, const std::array<double, 4>& a, const std::array<double, 4>& b);

struct FierzResiduals {
  double aux = 0;        // 4D spinor identity 2 U_mu S_nu sigma^{mu nu} pi psi + U^2 psi
  double norm = 0;       // vector norms vs scalar combinations
  double orthogonal = 0; // U.S (4D)
  double positivity = 0; // max(0, Theta^2 - Phi^2) in D2_02
  double spinor3 = 0;    // S_a gamma^a psi - Phi psi (3D)
  double max() const;
};
FierzResiduals fierz_residuals(const CVec& psi, const CliffordRep& rep);

/// Pointwise polar form psi = phi exp(-i angle pi / 2) L^{-1} psi0
/// (exp(-angle pi / 2) in D2_02, no angle factor in 3D).
struct PolarPoint {
  double phi = 0;
  double angle = 0;
  CMat L;
  std::array<double, 4> u{};
  std::array<double, 4> s{};
};

/// Canonical decomposition. L^{-1} = B(u) R(s) exp(i alpha), composed as: boost
/// B taking the rest frame to u, spatial rotation R taking the reference spin
/// axis to the boosted-back spin, and the residual phase alpha. The rotation
/// about the spin axis is assigned to alpha.
/// Throws DegenerateError below the degeneracy threshold.
PolarPoint polar_decompose_point(const CVec& psi, const CliffordRep& rep);

/// psi from (phi, angle, L). Throws GroupError when L is not in the spin group
/// (adjoint-form pseudo-unitarity and commutation with pi).
CVec polar_reconstruct_point(double phi, double angle, const CMat& L, const CliffordRep& rep);

/// Residual of L against the group structure checks used by reconstruction.
double group_residual(const CMat& L, const CliffordRep& rep);

/// Unit vectors u, s (world, upper) from a spinor: u = U/(2 phi^2), s = S/(2 phi^2)
/// in even dimensions and s = S/phi^2 in 3D.
void unit_vectors(const CVec& psi, const CliffordRep& rep, double phi, std::array<double, 4>& u,
                  std::array<double, 4>& s);

// Field level ---------------------------------------------------------------

struct PolarData {
  Field phi;                  // []
  std::optional<Field> angle; // [] beta or eta
  ComplexField L;             // [n, n]
  std::optional<Field> u;     // [d] world upper
  std::optional<Field> s;     // [d] world upper
  /// Per axis: largest number of 2 pi turns of the angle across the periodic seam.
  std::vector<int> winding;
};

/// Decomposes every valid point; the angle is unwrapped along a lexicographic
/// sweep (last axis fastest), then every neighbour jump is checked.
/// Throws DegenerateError (with coordinates) or BranchError.
PolarData polar_decompose(const ComplexField& psi, const CliffordRep& rep, const Exec& exec = {});

ComplexField polar_reconstruct(const PolarData& polar, const CliffordRep& rep, const Exec& exec = {});

/// Fills u and s from the reconstructed spinor.
void attach_unit_vectors(PolarData& polar, const CliffordRep& rep, const Exec& exec = {});

/// exp(-i angle pi/2) (or exp(-angle pi/2) in D2_02; identity in 3D).
CMat chiral_factor(double angle, const CliffordRep& rep);

/// Rotation of the spatial spin axis by angle theta about the unit axis n
/// (world components, spatial part), as a spinor transformation. 4D and 3D.
CMat spin_rotation(const CliffordRep& rep, const std::array<double, 3>& axis, double theta);

/// Spinor boost with rapidity w along spatial unit direction n (4D) or along
/// the single spatial axis (D2_11, n ignored).
CMat spin_boost(const CliffordRep& rep, const std::array<double, 3>& n, double w);

/// One named factor of L:
///   boost_x, boost_y, boost_z (4D), boost (1+1)   spin_boost
///   rot_yz, rot_zx, rot_xy (4D, 3D)               spin_rotation about x, y, z
///   rot (0+2)                                     exp(param sigma^{01})
///   sigma_ab (digits a < b)                       exp(param sigma^{ab})
///   phase                                         exp(i q param)
/// Throws ConfigurationError for a name that does not exist in the configuration.
CMat generator_exp(const CliffordRep& rep, std::string_view name, double param, double q);
bool generator_valid(const CliffordRep& rep, std::string_view name);

}  // namespace topo
