#pragma once

#include <optional>

#include "topo/geometry.hpp"
#include "topo/polarconn.hpp"

namespace topo {

struct DiracParams {
  double m = 1.0;
  double q = 1.0;
};

/// i gamma^mu nabla_mu psi - m psi with gamma^mu = e^mu_a gamma^a.
ComplexField dirac_residual(const ComplexField& psi, const Field& c, const Field& a, const FrameField& frame,
                            const DiracParams& params, const CliffordRep& rep, const DiffScheme& s,
                            const Exec& exec = {});

/// Polar field-equation residuals, world lower components.
///   4D:      A_a = d_a beta + M_a + 2m s_a cos(beta),       B_a = d_a ln phi^2 + Sigma_a + 2m s_a sin(beta)
///   (1+1):   A_a = d_a beta - 2 P^b eps_{ba} + 2m u^b eps_{ba} cos(beta)
///            B_a = d_a ln phi^2 + R_a + 2m u^b eps_{ba} sin(beta)
///   (0+2):   A_a = d_a eta - 2 P^b eps_{ba} - 2m cosh(eta) eps_{ab} s^b
///            B_a = d_a ln phi^2 + R_a + 2m sinh(eta) eps_{ab} s^b
///   3D:      constraint = M^rho_rho - 2m,                   B_a = Sigma_{ab}^b + d_a ln phi^2
struct PolarResiduals {
  Field A;                          // [d]; unused (zero-size) in 3D
  Field B;                          // [d]
  std::optional<Field> constraint;  // [] 3D
};

PolarResiduals polar_residuals(const PolarData& polar, const TensorialConnection& conn, const FrameField& frame,
                               const DiracParams& params, const CliffordRep& rep, const DiffScheme& s,
                               const Exec& exec = {});

/// Pointwise | D - 1/2 (b i B_a gamma^a + a A_a gamma^a pi) psi |, with (b, a) the
/// frozen map coefficients; in 3D the second term is a * constraint * psi.
Field equivalence_residual(const ComplexField& dirac, const PolarResiduals& pr, const ComplexField& psi,
                           const CliffordRep& rep, const conventions::DiracMap& map, const Exec& exec = {});

/// Induced real-linear map (A, B) -> map(A, B) psi at one spinor: its numerical rank
/// and the number of real inputs (2d, or 1 + d in 3D).
struct MapRank {
  int rank = 0;
  int inputs = 0;
  double smallest_pivot = 0;
};
MapRank equivalence_map_rank(const CVec& psi, const CliffordRep& rep, const conventions::DiracMap& map);

/// 2D (1+1) decoupling: the largest change of B when P is perturbed and of A
/// when R_a is perturbed.
struct Decoupling {
  double b_under_p = 0;
  double a_under_r = 0;
};
Decoupling decoupling_2d(const PolarData& polar, const TensorialConnection& conn, const FrameField& frame,
                         const DiracParams& params, const CliffordRep& rep, const DiffScheme& s,
                         const Exec& exec = {});

/// Calibration of the map coefficients: evaluates every candidate pair in
/// {1, -1, i, -i}^2 on random smooth data (order-4 differences, h = 1e-3) at
/// conventions::kCalibrationPoints points and returns the best pair with its
/// residual. Throws ValidationError if no pair reaches 1e-10.
struct Calibration {
  conventions::DiracMap map;
  double residual = 0;
  double runner_up = 0;
};
Calibration calibrate_dirac_map(Config config, unsigned seed = conventions::kCalibrationSeed);

}  // namespace topo
