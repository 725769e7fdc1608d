#pragma once

#include <optional>

#include "topo/algebra.hpp"
#include "topo/geometry.hpp"
#include "topo/grid.hpp"
#include "topo/spinor.hpp"

namespace topo {

/// L^{-1} d_mu L = i q dzeta_mu I + sum_{i<j} dzeta_{ij mu} sigma^{ij}.
struct LieLog {
  Field dzeta_ij;  // [P, d]
  Field dzeta;     // [d]
};

/// Group-consistent central difference: with G_k = L(x)^{-1} L(x + k h e_mu),
///   L^{-1} d_mu L ~ sum_k w_k (log G_k - log G_{-k}) / h,
/// which lies in the Lie algebra up to roundoff and is exact for one-parameter
/// subgroups with affine parameters. The result is projected onto
/// {i I, sigma^{ij}} with the cached inverse Gram matrix; an off-basis remainder
/// above 1e-8 |M| throws GroupError. With q = 0 a nonzero phase throws
/// ValidationError.
LieLog lie_log_derivative(const ComplexField& L, const CliffordRep& rep, double q, const DiffScheme& s,
                          const Exec& exec = {});

/// Plain finite difference L^{-1} (D L) projected onto the algebra, for
/// comparison with the group-consistent form. Returns the max off-basis
/// remainder divided by the largest |M| over the valid points.
double plain_log_derivative_remainder(const ComplexField& L, const CliffordRep& rep, const DiffScheme& s);

struct TensorialConnection {
  Field R;                            // [P, d]  R_{ij mu} = dzeta_{ij mu} - C_{ij mu}
  Field P;                            // [d]     P_mu = q (dzeta_mu - A_mu)
  std::optional<Field> Sigma;         // [P, d]  4D and 3D
  std::optional<Field> M;             // 4D [P, d];  3D [d, d] (world rho, coordinate mu)
  std::optional<Field> Sigma_trace;   // [d] world upper: Sigma^{ab}_b (4D); Sigma_{ab}^b (3D)
  std::optional<Field> M_trace;       // 4D [d] world upper M^{ab}_b;  3D [] M^rho_rho
  std::optional<Field> R_vector;      // 2D [d] world lower R_a = R_{abc} eta^{bc}
};

TensorialConnection tensorial_connection(const LieLog& lie, const Field& c, const Field& a, double q,
                                         const PolarData& polar, const FrameField& frame, const CliffordRep& rep,
                                         const Exec& exec = {});

/// Residual field (max-abs over mu and spinor components) of the covariant
/// derivative through the spinorial connection against the polar form.
Field decomposition_residual(const ComplexField& psi, const PolarData& polar, const TensorialConnection& conn,
                             const Field& c, const Field& a, double q, const FrameField& frame,
                             const CliffordRep& rep, const DiffScheme& s, const Exec& exec = {});

/// 4D: max over (mu, nu) of |nabla_mu s_nu - s^a Sigma_{a nu mu}| and the same for u.
Field su_identity_residual(const PolarData& polar, const TensorialConnection& conn, const FrameField& frame,
                           const Field& lambda, const CliffordRep& rep, const DiffScheme& s, const Exec& exec = {});

/// Packed [P, P] curvature of a tensorial potential T_{ij mu} ([P, d]):
///   -(nabla_mu T_{ij nu} - nabla_nu T_{ij mu} + T_{ik mu} T^k_{j nu} - T_{ik nu} T^k_{j mu})
/// with the spin connection on world indices and Levi-Civita on the coordinate index.
Field curvature_of_potential(const Field& t, const Field& c, const Field& lambda, const SignatureConfig& sig,
                             const DiffScheme& s, const Exec& exec = {});

/// -(d_mu P_nu - d_nu P_mu), packed over coordinate pairs.
Field maxwell_from_potential(const Field& p, const DiffScheme& s, const Exec& exec = {});
/// d_mu A_nu - d_nu A_mu, packed over coordinate pairs.
Field field_strength(const Field& a, const DiffScheme& s, const Exec& exec = {});

struct SigmaCurvature {
  Field R;                     // [P, P]
  Field qF;                    // [Pc]
  std::optional<Field> Sigma;  // [P, P], 4D and 3D
};

SigmaCurvature curvature_from_tensorial(const TensorialConnection& conn, const Field& c, const Field& lambda,
                                        const SignatureConfig& sig, const DiffScheme& s, const Exec& exec = {});

/// 4D: R_{ab mu nu} - 2 qF_{mu nu} u^c s^d eps_{cdab};  3D: R_{ab mu nu} + 2 qF_{mu nu} s^c eps_{cab}.
Field sigma_curvature_composite(const Field& riemann, const Field& qf, const PolarData& polar,
                                const CliffordRep& rep, const Exec& exec = {});

/// Pointwise max-abs difference of two packed fields.
Field difference_norm(const Field& a, const Field& b, const Exec& exec = {});

struct BianchiCauchy {
  Field bianchi;  // eps^{k mu nu rho} nabla_mu R_{ij nu rho}
  Field cauchy;   // eps^{k mu nu rho} d_mu qF_{nu rho}
  Field total;    // eps^{k mu nu rho} nabla_mu Sigma_{ij nu rho}
};
BianchiCauchy bianchi_cauchy_residual(const SigmaCurvature& curv, const Field& c, const FrameField& frame,
                                      const CliffordRep& rep, const DiffScheme& s, const Exec& exec = {});

/// [nabla_mu, nabla_nu] psi by applying the spinor covariant derivative twice,
/// minus 1/2 X_{ab mu nu} sigma^{ab} psi (X = Sigma-curvature when given) or
/// minus 1/2 R_{ab mu nu} sigma^{ab} psi + i qF_{mu nu} psi.
Field commutator_residual(const ComplexField& psi, const Field& c, const Field& a, double q,
                          const Field* sigma_curvature, const Field* riemann, const Field* qf_gauge,
                          const CliffordRep& rep, const DiffScheme& s, const Exec& exec = {});

/// Spinorial connection Omega_mu = sum_{i<j} C_{ij mu} sigma^{ij} + i q A_mu at one point.
CMat spinor_connection(std::span<const double> c_packed, std::span<const double> a, double q, int mu,
                       const CliffordRep& rep);

}  // namespace topo
