#include "topo/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topo {

SignatureConfig SignatureConfig::of(Config c) {
  switch (c) {
    case Config::D4_13: return {c, 4, {1, -1, -1, -1}, "D4_13"};
    case Config::D2_11: return {c, 2, {1, -1, 0, 0}, "D2_11"};
    case Config::D2_02: return {c, 2, {1, 1, 0, 0}, "D2_02"};
    case Config::D3_EUC: return {c, 3, {1, 1, 1, 0}, "D3_EUC"};
  }
  throw ConfigurationError("unsupported configuration");
}

SignatureConfig SignatureConfig::from_name(std::string_view name) {
  for (Config c : {Config::D4_13, Config::D2_11, Config::D2_02, Config::D3_EUC})
    if (of(c).name == name) return of(c);
  throw ConfigurationError("unsupported configuration '" + std::string(name) + "'");
}

int SignatureConfig::eta_det() const {
  int p = 1;
  for (int a = 0; a < dimension; ++a) p *= eta[a];
  return p;
}

// ---------------------------------------------------------------------------

namespace {
int permutation_parity(std::array<int, 4> p, int d) {
  int sign = 1;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}
}  // namespace

Epsilon::Epsilon(int dimension, int eta_det) : d_(dimension), raise_(eta_det) {
  table_.fill(0);
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    const int s = conventions::kEpsilonLower * permutation_parity(p, d_);
    int key = 0;
    for (int i = 0; i < d_; ++i) key = key * 4 + p[i];
    table_[key] = s;
    terms_.push_back({p, s});
  } while (std::next_permutation(p.begin(), p.begin() + d_));
}

int Epsilon::lower(int a, int b, int c, int e) const {
  const int idx[4] = {a, b, c, e};
  int key = 0;
  for (int i = 0; i < d_; ++i) key = key * 4 + idx[i];
  return table_[key];
}

// ---------------------------------------------------------------------------

const CMat& CliffordRep::pi() const {
  if (!parity) throw ConfigurationError("configuration " + std::string(config.name) + " has no parity matrix");
  return *parity;
}

double InvariantReport::max() const {
  return std::max({anticommutator, sigma_definition, duality, trace, adjoint});
}

namespace {

const CMat kS1 = CMat::from_rows({0, 1, 1, 0});
const CMat kS2 = CMat::from_rows({0, -kI, kI, 0});
const CMat kS3 = CMat::from_rows({1, 0, 0, -1});

CMat block(const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
  CMat m(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      m(i, j) = a(i, j);
      m(i, j + 2) = b(i, j);
      m(i + 2, j) = c(i, j);
      m(i + 2, j + 2) = d(i, j);
    }
  return m;
}

std::vector<double> invert_real(std::vector<double> a, int n) {
  std::vector<double> r(n * n, 0.0);
  for (int i = 0; i < n; ++i) r[i * n + i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(a[i * n + c]) > std::abs(a[p * n + c])) p = i;
    if (std::abs(a[p * n + c]) < 1e-14) throw ConfigurationError("singular Gram matrix");
    for (int j = 0; j < n; ++j) {
      std::swap(a[p * n + j], a[c * n + j]);
      std::swap(r[p * n + j], r[c * n + j]);
    }
    const double piv = a[c * n + c];
    for (int j = 0; j < n; ++j) {
      a[c * n + j] /= piv;
      r[c * n + j] /= piv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = a[i * n + c];
      for (int j = 0; j < n; ++j) {
        a[i * n + j] -= f * a[c * n + j];
        r[i * n + j] -= f * r[c * n + j];
      }
    }
  }
  return r;
}

}  // namespace

CliffordRep build_clifford(const SignatureConfig& config) {
  CliffordRep rep;
  rep.config = SignatureConfig::of(config.id);
  const int d = rep.config.dimension;
  rep.epsilon = Epsilon(d, rep.config.eta_det());
  const CMat i2 = CMat::identity(2), z2(2);

  switch (config.id) {
    case Config::D4_13:
      rep.spinor_dim = 4;
      rep.gamma = {block(z2, i2, i2, z2), block(z2, kS1, kS1 * -1.0, z2), block(z2, kS2, kS2 * -1.0, z2),
                   block(z2, kS3, kS3 * -1.0, z2)};
      rep.reference = CVec{1, 0, 1, 0};
      break;
    case Config::D2_11:
      rep.spinor_dim = 2;
      rep.gamma = {kS1, kS2 * -kI};
      rep.reference = CVec{1, 1};
      break;
    case Config::D2_02:
      rep.spinor_dim = 2;
      rep.gamma = {kS1, kS2};
      rep.reference = CVec{1, 1};
      break;
    case Config::D3_EUC:
      rep.spinor_dim = 2;
      rep.gamma = {kS1, kS2, kS3};
      rep.reference = CVec{1, 0};
      break;
  }
  const int n = rep.spinor_dim;
  for (int a = 0; a < d; ++a) rep.gamma_lower.push_back(rep.gamma[a] * static_cast<double>(rep.eta(a)));
  rep.sigma.assign(d * d, CMat(n));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      rep.sigma[a * d + b] = (rep.gamma[a] * rep.gamma[b] - rep.gamma[b] * rep.gamma[a]) * 0.25;
  rep.adjoint_form = rep.config.lorentzian() ? rep.gamma[0] : CMat::identity(n);

  // The parity matrix is solved from its defining duality relation at one
  // index pair; check_invariants then asserts the relation for every pair.
  const Epsilon& eps = rep.epsilon;
  auto sig_lower = [&](int a, int b) { return rep.sig(a, b) * (rep.eta(a) * rep.eta(b)); };
  switch (config.id) {
    case Config::D4_13: {
      // 2i sigma_{01} = eps_{01ij} sigma^{ij} pi = 2 eps_{0123} sigma^{23} pi
      const CMat lhs = sig_lower(0, 1) * (2.0 * kI);
      const CMat coef = rep.sig(2, 3) * (2.0 * eps.lower(0, 1, 2, 3));
      rep.parity = coef.inverse() * lhs;
      break;
    }
    case Config::D2_11:
      // 2 sigma_{ab} = eps_{ab} pi
      rep.parity = sig_lower(0, 1) * (2.0 / eps.lower(0, 1));
      break;
    case Config::D2_02:
      // 2i sigma_{ab} = eps_{ab} pi
      rep.parity = sig_lower(0, 1) * (2.0 * kI / static_cast<double>(eps.lower(0, 1)));
      break;
    case Config::D3_EUC:
      break;
  }

  rep.basis_.push_back(CMat::identity(n) * kI);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) rep.basis_.push_back(rep.sig(a, b));
  const int k = static_cast<int>(rep.basis_.size());
  std::vector<double> gram(k * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram[i * k + j] = rep.basis_[i].dot(rep.basis_[j]);
  rep.gram_inv_ = invert_real(gram, k);

  const InvariantReport inv = check_invariants(rep);
  if (inv.max() > 1e-14) throw ConfigurationError("representation invariants violated for " + std::string(rep.config.name));
  return rep;
}

InvariantReport check_invariants(const CliffordRep& rep) {
  InvariantReport r;
  const int d = rep.dimension(), n = rep.spinor_dim;
  const CMat id = CMat::identity(n);
  const Epsilon& eps = rep.epsilon;
  for (int a = 0; a < d; ++a) {
    r.trace = std::max(r.trace, std::abs(rep.gamma[a].trace()));
    for (int b = 0; b < d; ++b) {
      const CMat ac = rep.gamma[a] * rep.gamma[b] + rep.gamma[b] * rep.gamma[a];
      const double target = a == b ? 2.0 * rep.eta(a) : 0.0;
      r.anticommutator = std::max(r.anticommutator, (ac - id * target).max_abs());
      const CMat s = (rep.gamma[a] * rep.gamma[b] - rep.gamma[b] * rep.gamma[a]) * 0.25;
      r.sigma_definition = std::max(r.sigma_definition, (s - rep.sig(a, b)).max_abs());
      r.trace = std::max(r.trace, std::abs(rep.sig(a, b).trace()));
    }
  }
  auto sig_lower = [&](int a, int b) { return rep.sig(a, b) * (rep.eta(a) * rep.eta(b)); };
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      CMat diff(n);
      switch (rep.config.id) {
        case Config::D4_13: {
          CMat rhs(n);
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              if (int e = eps.lower(a, b, i, j)) rhs += rep.sig(i, j) * static_cast<double>(e);
          diff = sig_lower(a, b) * (2.0 * kI) - rhs * rep.pi();
          break;
        }
        case Config::D2_11:
          diff = sig_lower(a, b) * 2.0 - rep.pi() * static_cast<double>(eps.lower(a, b));
          break;
        case Config::D2_02: {
          diff = sig_lower(a, b) * (2.0 * kI) - rep.pi() * static_cast<double>(eps.lower(a, b));
          // gamma^a pi = i eps^{ab} gamma_b
          CMat rhs(n);
          for (int c = 0; c < d; ++c) rhs += rep.gamma_lower[c] * (kI * static_cast<double>(eps.upper(a, c)));
          r.duality = std::max(r.duality, (rep.gamma[a] * rep.pi() - rhs).max_abs());
          break;
        }
        case Config::D3_EUC: {
          CMat rhs(n);
          for (int c = 0; c < d; ++c) rhs += rep.gamma_lower[c] * (kI * static_cast<double>(eps.upper(a, b, c)));
          diff = rep.sig(a, b) * 2.0 - rhs;
          break;
        }
      }
      r.duality = std::max(r.duality, diff.max_abs());
    }
  // psibar chi with D equals psi^dagger gamma^0 chi (Lorentzian) or psi^dagger chi.
  const CMat expect = rep.config.lorentzian() ? rep.gamma[0] : id;
  r.adjoint = (rep.adjoint_form - expect).max_abs();
  return r;
}

ResidualStats check_trilinear_identity(const CliffordRep& rep) {
  const int d = rep.dimension(), n = rep.spinor_dim;
  const Epsilon& eps = rep.epsilon;
  const auto& gl = rep.gamma_lower;
  ResidualStats st;
  double sq = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        CMat rhs = gl[i] * (j == k ? rep.eta(j) : 0.0) - gl[j] * (i == k ? rep.eta(i) : 0.0) +
                   gl[k] * (i == j ? rep.eta(i) : 0.0);
        if (d == 4) {
          CMat t(n);
          for (int q = 0; q < d; ++q)
            if (int e = eps.lower(i, j, k, q)) t += rep.gamma[q] * static_cast<double>(e);
          rhs -= t * rep.pi() * kI;
        } else if (d == 3) {
          rhs += CMat::identity(n) * (kI * static_cast<double>(eps.lower(i, j, k)));
        }
        const double r = (gl[i] * gl[j] * gl[k] - rhs).max_abs();
        st.linf = std::max(st.linf, r);
        sq += r * r;
        ++st.count;
      }
  st.l2 = std::sqrt(sq / static_cast<double>(st.count));
  return st;
}

std::vector<double> hodge_dual_pair(const CliffordRep& rep, const std::vector<double>& t) {
  const int d = rep.dimension();
  if (d != 3 && d != 4) throw ValidationError("hodge_dual_pair requires dimension 3 or 4");
  if (static_cast<int>(t.size()) != d * d) throw ValidationError("hodge_dual_pair expects a d*d tensor");
  double scale = 0, asym = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      scale = std::max(scale, std::abs(t[a * d + b]));
      asym = std::max(asym, std::abs(t[a * d + b] + t[b * d + a]));
    }
  if (asym > 1e-12 * std::max(1.0, scale)) throw ValidationError("hodge_dual_pair: input is not antisymmetric");
  const Epsilon& eps = rep.epsilon;
  auto up = [&](int a, int b) { return t[a * d + b] * rep.eta(a) * rep.eta(b); };
  if (d == 4) {
    std::vector<double> m(16, 0.0);
    for (const auto& term : eps.terms()) {
      const auto& p = term.idx;
      m[p[0] * 4 + p[1]] += 0.5 * term.sign * up(p[2], p[3]);
    }
    return m;
  }
  std::vector<double> m(3, 0.0);
  for (const auto& term : eps.terms()) {
    const auto& p = term.idx;
    m[p[0]] += 0.5 * term.sign * up(p[1], p[2]);
  }
  return m;
}

cplx parity_product_coefficient(const CliffordRep& rep) {
  const CMat& pi = rep.pi();
  CMat prod = CMat::identity(rep.spinor_dim);
  for (int a = 0; a < rep.dimension(); ++a) prod = prod * rep.gamma[a];
  return (pi * prod.inverse()).trace() / static_cast<double>(rep.spinor_dim);
}

}  // namespace topo
