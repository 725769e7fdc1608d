#pragma once

#include "topo/algebra.hpp"
#include "topo/grid.hpp"
#include "topo/tensor.hpp"

namespace topo {

/// e: [d, d] with e(a, mu) = e^a_mu at a*d + mu.
/// einv: [d, d] with einv(mu, a) = e^mu_a at mu*d + a.
struct FrameField {
  Field e;
  Field einv;
};

/// Inverts the co-frame pointwise. Throws DegenerateError if |det e| <= 1e-12.
FrameField make_frame(Field e, const Exec& exec = {});

/// g_{mu nu} = e^a_mu e^b_nu eta_ab, shape [d, d].
Field metric_from_frame(const FrameField& frame, const SignatureConfig& sig, const Exec& exec = {});

/// Lambda^alpha_{sigma mu} at alpha*d*d + sigma*d + mu.
Field levi_civita(const Field& metric, const DiffScheme& s, const Exec& exec = {});

/// Unprojected C^i_{k mu} = e^i_sigma d_mu e_k^sigma + e^i_alpha e_k^sigma Lambda^alpha_{sigma mu},
/// shape [d, d, d].
Field spin_connection_full(const FrameField& frame, const Field& lambda, const DiffScheme& s, const Exec& exec = {});

/// Spin connection with the first index lowered by eta and antisymmetrized,
/// packed as [P, d]: C_{ij mu} for i<j.
Field spin_connection(const FrameField& frame, const Field& lambda, const SignatureConfig& sig, const DiffScheme& s,
                      const Exec& exec = {});

/// R_{ij mu nu} = d_mu C_{ij nu} - d_nu C_{ij mu} + C_{ik mu} C^k_{j nu} - C_{ik nu} C^k_{j mu},
/// world pair lowered, packed [P, P] (world pair, coordinate pair).
Field riemann_from_spin_connection(const Field& c, const SignatureConfig& sig, const DiffScheme& s,
                                   const Exec& exec = {});

/// Converts a packed [P, P] curvature at one point to all-world lower components.
void curvature_world(std::span<const double> packed, std::span<const double> einv, int d, tensor::T4& out);

/// R_{jb} = R^i_{j i b} (all world); the contraction R^i_{j mu nu} e^mu_i.
tensor::T2 ricci_world(const tensor::T4& rw, const SignatureConfig& sig);
double ricci_scalar(const tensor::T4& rw, const SignatureConfig& sig);

/// Ricci scalar field from a packed curvature field.
Field ricci_scalar_field(const Field& curvature, const FrameField& frame, const SignatureConfig& sig,
                         const Exec& exec = {});

/// Field of R_ab - 1/2 R eta_ab, max-abs over components (zero in 2D).
Field einstein_norm_field(const Field& curvature, const FrameField& frame, const SignatureConfig& sig,
                          const Exec& exec = {});

enum class DensityKind { Euler2D, Euler4D, Pontryagin4D };

// Pointwise densities on all-world lower curvature. `orientation` multiplies
// every epsilon (+1 is the frozen convention).
double euler2d_density(const tensor::T4& rw, const SignatureConfig& sig);
double euler4d_density(const tensor::T4& rw, const Epsilon& eps, int orientation = 1);
double pontryagin4d_density(const tensor::T4& rw, const SignatureConfig& sig, const Epsilon& eps, int orientation = 1);
/// R^{abcd} R_{dcba} - 4 R^{ab} R_{ba} + R^2.
double gauss_bonnet(const tensor::T4& rw, const SignatureConfig& sig);

Field characteristic_density(DensityKind kind, const Field& curvature, const FrameField& frame,
                             const SignatureConfig& sig, int orientation = 1, const Exec& exec = {});

}  // namespace topo
