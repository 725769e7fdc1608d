#pragma once

#include <array>
#include <string_view>

#include "topo/geometry.hpp"
#include "topo/polarconn.hpp"
#include "topo/tensor.hpp"

namespace topo {

enum class CurrentKind { G2, K2, G3, K3, G4, K4 };

std::string_view current_name(CurrentKind k);
int current_dimension(CurrentKind k);
/// True for the currents that carry a single epsilon (K2, K3, K4).
bool current_is_axial(CurrentKind k);

struct TopologicalCurrent {
  CurrentKind kind = CurrentKind::G2;
  Field V;        // [d] coordinate upper
  Field density;  // []  zero for G3, K3
};

/// Inputs a current may need. Null pointers are allowed for fields the
/// requested kind does not use; a missing prerequisite throws MissingFieldError.
struct CurrentInputs {
  const TensorialConnection* conn = nullptr;
  const Field* sigma_curvature = nullptr;  // [P, P]
  const Field* riemann = nullptr;          // [P, P] from the spin connection (G2 density)
  const Field* qf_gauge = nullptr;         // [Pc]  q (dA - dA) (K2 density)
  const PolarData* polar = nullptr;        // s for G3
  const FrameField* frame = nullptr;
  const Field* lambda = nullptr;           // K3 Christoffel diagnostic
};

TopologicalCurrent topological_current(CurrentKind kind, const CurrentInputs& in, const CliffordRep& rep,
                                       const DiffScheme& s, int orientation = 1, const Exec& exec = {});

/// Residual of the covariant divergence of V against its density.
Field verify_class(const TopologicalCurrent& current, const Field& metric, const DiffScheme& s,
                   const Exec& exec = {});

/// max |eps^{mu nu alpha} Lambda^rho_{alpha nu} R_rho| over the valid points:
/// the Christoffel part that drops out of the K3 curl.
double k3_christoffel_term(const TensorialConnection& conn, const FrameField& frame, const Field& lambda,
                           const CliffordRep& rep);

/// 4 qF_{eta pi} P_nu eps^{eta pi nu mu}: the pure-gauge form of K4.
Field pure_gauge_k4(const Field& qf, const Field& p, const FrameField& frame, const CliffordRep& rep,
                    int orientation = 1, const Exec& exec = {});
/// 4 qF_{nu sigma} eps^{nu sigma mu}: the flat-space form of G3 for constant s.
Field flat_g3(const Field& qf, const FrameField& frame, const CliffordRep& rep, const Exec& exec = {});

namespace kernels {
// Pointwise evaluations on all-world lower components (Sigma_{abc}, X_{abcd}).
// Each returns the world-upper vector.
std::array<double, 4> g4(const tensor::T3& sigma, const tensor::T4& x, const SignatureConfig& sig,
                         const Epsilon& eps, int orientation);
std::array<double, 4> k4(const tensor::T3& sigma, const tensor::T4& x, const SignatureConfig& sig,
                         const Epsilon& eps, int orientation);
std::array<double, 4> g3(const tensor::T3& sigma, const tensor::T4& x, std::span<const double> s,
                         const Epsilon& eps, int orientation);
/// -1/4 eps^{abcd} X_{efcd} M^{ef}_{ab} with M_{ef ab} = 1/2 eps_{efgh} X^{gh}_{ab}.
double g4_density(const tensor::T4& x, const SignatureConfig& sig, const Epsilon& eps, int orientation);
/// 1/4 eps^{abcd} X^{ef}_{ab} X_{efcd}.
double k4_density(const tensor::T4& x, const SignatureConfig& sig, const Epsilon& eps, int orientation);
}  // namespace kernels

}  // namespace topo
