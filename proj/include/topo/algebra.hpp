#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topo/conventions.hpp"
#include "topo/types.hpp"

namespace topo {

struct SignatureConfig {
  Config id = Config::D4_13;
  int dimension = 4;
  std::array<int, 4> eta{1, -1, -1, -1};
  std::string_view name = "D4_13";

  static SignatureConfig of(Config c);
  /// Throws ConfigurationError for anything other than the four supported names.
  static SignatureConfig from_name(std::string_view name);
  /// Product of the diagonal metric entries.
  int eta_det() const;
  bool lorentzian() const { return id == Config::D4_13 || id == Config::D2_11; }
};

/// Levi-Civita symbol in d = 2, 3, 4 indices. `lower` holds the all-lower world
/// values (lower(0,1,..) = kEpsilonLower); `upper` is raised with eta.
class Epsilon {
 public:
  struct Term {
    std::array<int, 4> idx;
    int sign;  // sign of the all-lower symbol
  };

  Epsilon() = default;
  Epsilon(int dimension, int eta_det);

  int dimension() const { return d_; }
  int lower(int a, int b, int c = 0, int e = 0) const;
  int upper(int a, int b, int c = 0, int e = 0) const { return raise_ * lower(a, b, c, e); }
  /// Sign picked up when raising every index.
  int raise_sign() const { return raise_; }
  /// The d! nonzero entries.
  const std::vector<Term>& terms() const { return terms_; }

 private:
  int d_ = 0;
  int raise_ = 1;
  std::vector<Term> terms_;
  std::array<int, 256> table_{};
};

struct CliffordRep {
  SignatureConfig config;
  int spinor_dim = 4;
  std::vector<CMat> gamma;        // gamma^a
  std::vector<CMat> gamma_lower;  // gamma_a
  std::vector<CMat> sigma;        // sigma^{ab} at a*d+b
  std::optional<CMat> parity;     // pi
  CMat adjoint_form;              // D with psibar = psi^dagger D
  CVec reference;                 // reference column of the polar form
  Epsilon epsilon;

  int dimension() const { return config.dimension; }
  double eta(int a) const { return config.eta[a]; }
  const CMat& sig(int a, int b) const { return sigma[a * config.dimension + b]; }
  const CMat& pi() const;
  /// Real inner-product basis {i*I, sigma^{ij} (i<j)} of the spin-group algebra.
  const std::vector<CMat>& algebra_basis() const { return basis_; }
  /// Inverse Gram matrix of algebra_basis(), row-major.
  const std::vector<double>& algebra_gram_inverse() const { return gram_inv_; }

  std::vector<CMat> basis_;
  std::vector<double> gram_inv_;
};

/// Builds the representation for one of the four configurations and asserts
/// every defining relation; throws ConfigurationError if one fails.
CliffordRep build_clifford(const SignatureConfig& config);

struct ResidualStats {
  double linf = 0.0;
  double l2 = 0.0;  // root mean square
  std::size_t count = 0;
};

/// Max residual of the triple-product reduction over all index triples.
ResidualStats check_trilinear_identity(const CliffordRep& rep);

/// Max residuals of the representation invariants (anticommutator, sigma
/// definition, parity/duality relations, tracelessness, adjoint form).
struct InvariantReport {
  double anticommutator = 0;
  double sigma_definition = 0;
  double duality = 0;
  double trace = 0;
  double adjoint = 0;
  double max() const;
};
InvariantReport check_invariants(const CliffordRep& rep);

/// Hodge dual in two world indices.
///  4D: input Sigma_{ab} (lower, d*d row-major), returns M_{ab} with
///      Sigma^{ab} = -1/2 eps^{abcd} M_{cd}, i.e. M_{ab} = 1/2 eps_{abcd} Sigma^{cd}.
///  3D: returns M_c (3 entries) with Sigma^{ab} = eps^{abc} M_c.
/// Throws ValidationError for non-antisymmetric input or other dimensions.
std::vector<double> hodge_dual_pair(const CliffordRep& rep, const std::vector<double>& t);

/// Gamma products used in the manifest: c with pi = c * gamma^0 gamma^1 (...).
cplx parity_product_coefficient(const CliffordRep& rep);

}  // namespace topo
