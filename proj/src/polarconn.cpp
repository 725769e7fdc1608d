#include "topo/polarconn.hpp"

#include <algorithm>
#include <cmath>

namespace topo {

using namespace tensor;

namespace {

CMat load_matrix(const ComplexField& f, std::size_t p, int n) {
  CMat m(n);
  const auto v = f.at(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  return m;
}

CVec load_spinor(const ComplexField& f, std::size_t p, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = f(p, i);
  return v;
}

int max_margin(std::initializer_list<int> m) { return std::max(m); }

// Coefficients of M on the algebra basis and the off-basis remainder.
double project(const CMat& m, const CliffordRep& rep, std::array<double, 8>& coef) {
  const auto& basis = rep.algebra_basis();
  const auto& gi = rep.algebra_gram_inverse();
  const int k = static_cast<int>(basis.size());
  std::array<double, 8> b{};
  for (int l = 0; l < k; ++l) b[l] = basis[l].dot(m);
  CMat rec(m.size());
  for (int l = 0; l < k; ++l) {
    double c = 0;
    for (int j = 0; j < k; ++j) c += gi[l * k + j] * b[j];
    coef[l] = c;
    rec.add_scaled(basis[l], c);
  }
  return (m - rec).max_abs();
}

}  // namespace

LieLog lie_log_derivative(const ComplexField& L, const CliffordRep& rep, double q, const DiffScheme& s,
                          const Exec& exec) {
  const Grid& g = L.grid();
  const int d = g.dimension(), n = rep.spinor_dim;
  const PairIndex pi(d);
  g.require_stencil(s.radius());
  const int margin = L.margin() + s.radius();
  LieLog out{Field(g, {pi.count(), d}, margin), Field(g, {d}, margin)};
  const auto w = s.weights();
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    const CMat li = load_matrix(L, p, n).inverse();
    for (int mu = 0; mu < d; ++mu) {
      CMat m(n);
      const double inv_h = 1.0 / g.spacing(mu);
      for (int k = 1; k <= s.radius(); ++k) {
        const CMat gp = li * load_matrix(L, g.shift(p, mu, k), n);
        const CMat gm = li * load_matrix(L, g.shift(p, mu, -k), n);
        m += (log_near_identity(gp) - log_near_identity(gm)) * (w[k - 1] * inv_h);
      }
      std::array<double, 8> c{};
      const double rem = project(m, rep, c);
      if (rem > 1e-8 * m.max_abs() + 1e-13)
        throw GroupError("log-derivative of L leaves the spin algebra (remainder " + std::to_string(rem) + ")");
      if (q == 0.0) {
        if (std::abs(c[0]) > 1e-12) throw ValidationError("L carries a phase but the charge q is zero");
        out.dzeta(p, mu) = 0.0;
      } else {
        out.dzeta(p, mu) = c[0] / q;
      }
      for (int k = 0; k < pi.count(); ++k) out.dzeta_ij(p, k * d + mu) = c[1 + k];
    }
  });
  out.dzeta.poison_invalid();
  out.dzeta_ij.poison_invalid();
  return out;
}

double plain_log_derivative_remainder(const ComplexField& L, const CliffordRep& rep, const DiffScheme& s) {
  const Grid& g = L.grid();
  const int d = g.dimension(), n = rep.spinor_dim;
  double worst = 0, scale = 0;
  std::vector<cplx> buf(n * n);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!g.interior(p, L.margin() + s.radius())) continue;
    const CMat li = load_matrix(L, p, n).inverse();
    for (int mu = 0; mu < d; ++mu) {
      derivative_at(L, p, mu, s, std::span<cplx>(buf));
      CMat dl(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dl(i, j) = buf[i * n + j];
      const CMat m = li * dl;
      std::array<double, 8> c{};
      const double rem = project(m, rep, c);
      worst = std::max(worst, rem);
      scale = std::max(scale, m.max_abs());
    }
  }
  return scale > 0 ? worst / scale : 0.0;
}

// ---------------------------------------------------------------------------

TensorialConnection tensorial_connection(const LieLog& lie, const Field& c, const Field& a, double q,
                                         const PolarData& polar, const FrameField& frame, const CliffordRep& rep,
                                         const Exec& exec) {
  const Grid& g = c.grid();
  const int d = g.dimension();
  const PairIndex pi(d);
  const int np = pi.count();
  const Epsilon& eps = rep.epsilon;
  const SignatureConfig& sig = rep.config;
  const int margin = max_margin({lie.dzeta.margin(), c.margin(), a.margin(), polar.phi.margin()});
  if (d == 4 && (!polar.u || !polar.s)) throw MissingFieldError("4D composition needs u and s");
  if (d == 3 && !polar.s) throw MissingFieldError("3D composition needs s");

  TensorialConnection out;
  out.R = Field(g, {np, d}, margin);
  out.P = Field(g, {d}, margin);
  if (d >= 3) {
    out.Sigma = Field(g, {np, d}, margin);
    out.M = d == 4 ? Field(g, {np, d}, margin) : Field(g, {d, d}, margin);
    out.Sigma_trace = Field(g, {d}, margin);
    out.M_trace = d == 4 ? Field(g, {d}, margin) : Field(g, {}, margin);
  } else {
    out.R_vector = Field(g, {d}, margin);
  }

  for_each_valid(g, margin, exec, [&](std::size_t p) {
    for (int k = 0; k < np * d; ++k) out.R(p, k) = lie.dzeta_ij(p, k) - c(p, k);
    for (int mu = 0; mu < d; ++mu) out.P(p, mu) = q * (lie.dzeta(p, mu) - a(p, mu));
    const auto einv = frame.einv.at(p);
    T3 r;
    unpack_pair_vec(out.R.at(p), pi, d, r);

    if (d == 2) {
      T3 rw;
      last_to_world(r, einv, d, rw);
      for (int x = 0; x < d; ++x) {
        double acc = 0;
        for (int b = 0; b < d; ++b) acc += sig.eta[b] * rw[i3(x, b, b)];
        (*out.R_vector)(p, x) = acc;
      }
      return;
    }

    T3 sg = r;
    if (d == 4) {
      const auto u = polar.u->at(p);
      const auto s = polar.s->at(p);
      T2 wab{};  // u^c s^d eps_{cdab}
      for (const auto& t : eps.terms()) wab[i2(t.idx[2], t.idx[3])] += t.sign * u[t.idx[0]] * s[t.idx[1]];
      for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y)
          for (int mu = 0; mu < d; ++mu) sg[i3(x, y, mu)] -= 2.0 * out.P(p, mu) * wab[i2(x, y)];
    } else {
      const auto s = polar.s->at(p);
      T2 wab{};  // s^c eps_{cab}
      for (const auto& t : eps.terms()) wab[i2(t.idx[1], t.idx[2])] += t.sign * s[t.idx[0]];
      for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y)
          for (int mu = 0; mu < d; ++mu) sg[i3(x, y, mu)] += 2.0 * out.P(p, mu) * wab[i2(x, y)];
    }
    pack_pair_vec(sg, pi, d, out.Sigma->at(p));

    // Hodge partner, per coordinate index.
    T3 m{};
    if (d == 4) {
      for (const auto& t : eps.terms()) {
        const auto& x = t.idx;
        for (int mu = 0; mu < d; ++mu)
          m[i3(x[0], x[1], mu)] += 0.5 * t.sign * sig.eta[x[2]] * sig.eta[x[3]] * sg[i3(x[2], x[3], mu)];
      }
      pack_pair_vec(m, pi, d, out.M->at(p));
    } else {
      auto dst = out.M->at(p);
      for (int k = 0; k < d * d; ++k) dst[k] = 0;
      for (const auto& t : eps.terms()) {
        const auto& x = t.idx;
        for (int mu = 0; mu < d; ++mu) dst[x[0] * d + mu] += 0.5 * t.sign * sg[i3(x[1], x[2], mu)];
      }
    }

    // Traces in world components.
    T3 sw, mw;
    last_to_world(sg, einv, d, sw);
    if (d == 4) {
      last_to_world(m, einv, d, mw);
      for (int x = 0; x < d; ++x) {
        double ts = 0, tm = 0;
        for (int b = 0; b < d; ++b) {
          ts += sig.eta[x] * sig.eta[b] * sw[i3(x, b, b)];
          tm += sig.eta[x] * sig.eta[b] * mw[i3(x, b, b)];
        }
        (*out.Sigma_trace)(p, x) = ts;
        (*out.M_trace)(p, x) = tm;
      }
    } else {
      for (int x = 0; x < d; ++x) {
        double ts = 0;
        for (int b = 0; b < d; ++b) ts += sw[i3(x, b, b)];
        (*out.Sigma_trace)(p, x) = ts;
      }
      const auto mm = out.M->at(p);
      double tm = 0;
      for (int rho = 0; rho < d; ++rho)
        for (int mu = 0; mu < d; ++mu) tm += mm[rho * d + mu] * einv[mu * d + rho];
      (*out.M_trace)(p, 0) = tm;
    }
  });
  out.R.poison_invalid();
  out.P.poison_invalid();
  return out;
}

CMat spinor_connection(std::span<const double> c_packed, std::span<const double> a, double q, int mu,
                       const CliffordRep& rep) {
  const int d = rep.dimension();
  const auto& basis = rep.algebra_basis();
  CMat om = CMat::identity(rep.spinor_dim) * (kI * q * a[mu]);
  for (int k = 0; k + 1 < static_cast<int>(basis.size()); ++k) om.add_scaled(basis[k + 1], c_packed[k * d + mu]);
  return om;
}

Field decomposition_residual(const ComplexField& psi, const PolarData& polar, const TensorialConnection& conn,
                             const Field& c, const Field& a, double q, const FrameField& frame,
                             const CliffordRep& rep, const DiffScheme& s, const Exec& exec) {
  const Grid& g = psi.grid();
  const int d = g.dimension(), n = rep.spinor_dim;
  const auto& basis = rep.algebra_basis();
  const ComplexField dpsi = gradient(psi, s, exec);
  Field lnphi(g, {}, polar.phi.margin());
  for (std::size_t p = 0; p < g.size(); ++p) lnphi(p, 0) = std::log(polar.phi(p, 0));
  const Field dln = gradient(lnphi, s, exec);
  std::optional<Field> dang;
  if (polar.angle) dang = gradient(*polar.angle, s, exec);
  const int margin = max_margin({dpsi.margin(), dln.margin(), dang ? dang->margin() : 0, conn.R.margin(),
                                 c.margin(), a.margin()});
  Field out(g, {}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    const CVec v = load_spinor(psi, p, n);
    const auto e = frame.e.at(p);
    double worst = 0;
    for (int mu = 0; mu < d; ++mu) {
      CVec lhs(n);
      for (int i = 0; i < n; ++i) lhs[i] = dpsi(p, i * d + mu);
      lhs += spinor_connection(c.at(p), a.at(p), q, mu, rep) * v;

      CMat op = CMat::identity(n) * dln(p, mu);
      switch (rep.config.id) {
        case Config::D4_13:
        case Config::D3_EUC:
          if (dang) op -= rep.pi() * (0.5 * kI * (*dang)(p, mu));
          for (int k = 0; k + 1 < static_cast<int>(basis.size()); ++k) op.add_scaled(basis[k + 1], -(*conn.Sigma)(p, k * d + mu));
          break;
        case Config::D2_11: {
          op -= rep.pi() * (0.5 * kI * (*dang)(p, mu));
          // -1/2 R^a eps_{ab} e^b_mu pi - i P_mu
          double t = 0;
          for (int x = 0; x < d; ++x)
            for (int b = 0; b < d; ++b)
              t += rep.eta(x) * (*conn.R_vector)(p, x) * rep.epsilon.lower(x, b) * e[b * d + mu];
          op -= rep.pi() * (0.5 * t);
          op -= CMat::identity(n) * (kI * conn.P(p, mu));
          break;
        }
        case Config::D2_02: {
          op -= rep.pi() * (0.5 * (*dang)(p, mu));
          // -R^a sigma_{ab} e^b_mu - i P_mu
          for (int x = 0; x < d; ++x)
            for (int b = 0; b < d; ++b)
              op -= rep.sig(x, b) * (rep.eta(x) * (*conn.R_vector)(p, x) * rep.eta(x) * rep.eta(b) * e[b * d + mu]);
          op -= CMat::identity(n) * (kI * conn.P(p, mu));
          break;
        }
      }
      worst = std::max(worst, (lhs - op * v).max_abs());
    }
    out(p, 0) = worst;
  });
  out.poison_invalid();
  return out;
}

Field su_identity_residual(const PolarData& polar, const TensorialConnection& conn, const FrameField& frame,
                           const Field& lambda, const CliffordRep& rep, const DiffScheme& s, const Exec& exec) {
  if (rep.dimension() != 4) throw ConfigurationError("the frame-vector transport identity is checked in 4D");
  if (!polar.u || !polar.s || !conn.Sigma) throw MissingFieldError("u, s and Sigma are required");
  const Grid& g = polar.phi.grid();
  const int d = 4;
  const PairIndex pi(d);
  auto lower = [&](const Field& v) {
    Field out(g, {d}, v.margin());
    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto e = frame.e.at(p);
      for (int nu = 0; nu < d; ++nu) {
        double acc = 0;
        for (int b = 0; b < d; ++b) acc += e[b * d + nu] * rep.eta(b) * v(p, b);
        out(p, nu) = acc;
      }
    }
    return out;
  };
  const Field sl = lower(*polar.s), ul = lower(*polar.u);
  const Field ds = gradient(sl, s, exec), du = gradient(ul, s, exec);
  const int margin = max_margin({ds.margin(), conn.Sigma->margin(), lambda.margin()});
  Field out(g, {}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    T3 sg;
    unpack_pair_vec(conn.Sigma->at(p), pi, d, sg);
    const auto e = frame.e.at(p);
    const auto lam = lambda.at(p);
    double worst = 0;
    auto check = [&](const Field& vl, const Field& dv, const Field& vu) {
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
          double lhs = dv(p, nu * d + mu);
          for (int rho = 0; rho < d; ++rho) lhs -= lam[(rho * d + nu) * d + mu] * vl(p, rho);
          double rhs = 0;
          for (int x = 0; x < d; ++x)
            for (int b = 0; b < d; ++b) rhs += vu(p, x) * sg[i3(x, b, mu)] * e[b * d + nu];
          worst = std::max(worst, std::abs(lhs - rhs));
        }
    };
    check(sl, ds, *polar.s);
    check(ul, du, *polar.u);
    out(p, 0) = worst;
  });
  out.poison_invalid();
  return out;
}

// ---------------------------------------------------------------------------

Field curvature_of_potential(const Field& t, const Field& c, const Field& lambda, const SignatureConfig& sig,
                             const DiffScheme& s, const Exec& exec) {
  const Grid& g = t.grid();
  const int d = g.dimension();
  const PairIndex pi(d);
  const int np = pi.count();
  g.require_stencil(s.radius());
  const int margin = max_margin({t.margin() + s.radius(), c.margin(), lambda.margin()});
  Field out(g, {np, np}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    T3 tf, cf;
    unpack_pair_vec(t.at(p), pi, d, tf);
    unpack_pair_vec(c.at(p), pi, d, cf);
    const auto lam = lambda.at(p);
    std::array<double, 24> buf{};
    T4 cov{};  // cov[i][j][nu][mu] = nabla_mu T_{ij nu}
    for (int mu = 0; mu < d; ++mu) {
      derivative_at(t, p, mu, s, std::span<double>(buf.data(), np * d));
      for (int k = 0; k < np; ++k) {
        const auto [i, j] = pi.pair(k);
        for (int nu = 0; nu < d; ++nu) {
          cov[i4(i, j, nu, mu)] = buf[k * d + nu];
          cov[i4(j, i, nu, mu)] = -buf[k * d + nu];
        }
      }
    }
    // Only i < j is needed below.
    for (int kp = 0; kp < np; ++kp) {
      const auto [i, j] = pi.pair(kp);
      for (int nu = 0; nu < d; ++nu)
        for (int mu = 0; mu < d; ++mu) {
          double v = 0;
          for (int k = 0; k < d; ++k)
            v += sig.eta[k] * (cf[i3(k, i, mu)] * tf[i3(k, j, nu)] + cf[i3(k, j, mu)] * tf[i3(i, k, nu)]);
          for (int rho = 0; rho < d; ++rho) v += lam[(rho * d + nu) * d + mu] * tf[i3(i, j, rho)];
          cov[i4(i, j, nu, mu)] -= v;
        }
    }
    auto dst = out.at(p);
    for (int k = 0; k < np; ++k) {
      const auto [i, j] = pi.pair(k);
      for (int l = 0; l < np; ++l) {
        const auto [mu, nu] = pi.pair(l);
        double v = cov[i4(i, j, nu, mu)] - cov[i4(i, j, mu, nu)];
        for (int q = 0; q < d; ++q)
          v += sig.eta[q] * (tf[i3(i, q, mu)] * tf[i3(q, j, nu)] - tf[i3(i, q, nu)] * tf[i3(q, j, mu)]);
        dst[k * np + l] = -v;
      }
    }
  });
  out.poison_invalid();
  return out;
}

namespace {
Field curl(const Field& v, double factor, const DiffScheme& s, const Exec& exec) {
  const Grid& g = v.grid();
  const int d = g.dimension();
  const PairIndex pi(d);
  const Field dv = gradient(v, s, exec);
  Field out(g, {pi.count()}, dv.margin());
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    for (int k = 0; k < pi.count(); ++k) {
      const auto [mu, nu] = pi.pair(k);
      out(p, k) = factor * (dv(p, nu * d + mu) - dv(p, mu * d + nu));
    }
  });
  out.poison_invalid();
  return out;
}
}  // namespace

Field maxwell_from_potential(const Field& p, const DiffScheme& s, const Exec& exec) { return curl(p, -1.0, s, exec); }
Field field_strength(const Field& a, const DiffScheme& s, const Exec& exec) { return curl(a, 1.0, s, exec); }

SigmaCurvature curvature_from_tensorial(const TensorialConnection& conn, const Field& c, const Field& lambda,
                                        const SignatureConfig& sig, const DiffScheme& s, const Exec& exec) {
  SigmaCurvature out{curvature_of_potential(conn.R, c, lambda, sig, s, exec), maxwell_from_potential(conn.P, s, exec),
                     std::nullopt};
  if (conn.Sigma) out.Sigma = curvature_of_potential(*conn.Sigma, c, lambda, sig, s, exec);
  return out;
}

Field sigma_curvature_composite(const Field& riemann, const Field& qf, const PolarData& polar,
                                const CliffordRep& rep, const Exec& exec) {
  const Grid& g = riemann.grid();
  const int d = g.dimension();
  if (d != 3 && d != 4) throw ConfigurationError("Sigma-curvature is composed in 3D and 4D only");
  if (!polar.s || (d == 4 && !polar.u)) throw MissingFieldError("composition needs the unit vectors");
  const PairIndex pi(d);
  const int np = pi.count();
  const Epsilon& eps = rep.epsilon;
  const int margin = std::max({riemann.margin(), qf.margin(), polar.phi.margin()});
  Field out(g, {np, np}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    T2 w{};
    const auto s = polar.s->at(p);
    if (d == 4) {
      const auto u = polar.u->at(p);
      for (const auto& t : eps.terms()) w[i2(t.idx[2], t.idx[3])] += -2.0 * t.sign * u[t.idx[0]] * s[t.idx[1]];
    } else {
      for (const auto& t : eps.terms()) w[i2(t.idx[1], t.idx[2])] += 2.0 * t.sign * s[t.idx[0]];
    }
    for (int k = 0; k < np; ++k) {
      const auto [i, j] = pi.pair(k);
      for (int l = 0; l < np; ++l) out(p, k * np + l) = riemann(p, k * np + l) + qf(p, l) * w[i2(i, j)];
    }
  });
  out.poison_invalid();
  return out;
}

Field difference_norm(const Field& a, const Field& b, const Exec& exec) {
  if (a.components() != b.components()) throw ValidationError("difference_norm: shape mismatch");
  const Grid& g = a.grid();
  Field out(g, {}, std::max(a.margin(), b.margin()));
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    double m = 0;
    for (std::size_t k = 0; k < a.components(); ++k) m = std::max(m, std::abs(a(p, k) - b(p, k)));
    out(p, 0) = m;
  });
  out.poison_invalid();
  return out;
}

BianchiCauchy bianchi_cauchy_residual(const SigmaCurvature& curv, const Field& c, const FrameField& frame,
                                      const CliffordRep& rep, const DiffScheme& s, const Exec& exec) {
  if (rep.dimension() != 4 || !curv.Sigma) throw ConfigurationError("the Bianchi/Cauchy check runs in 4D");
  const Grid& g = c.grid();
  const int d = 4;
  const PairIndex pi(d);
  const int np = pi.count();
  const Epsilon& eps = rep.epsilon;
  const SignatureConfig& sig = rep.config;
  const int margin = std::max({curv.R.margin(), curv.Sigma->margin(), curv.qF.margin()}) + s.radius();
  BianchiCauchy out{Field(g, {}, margin), Field(g, {}, margin), Field(g, {}, margin)};

  for_each_valid(g, std::max(margin, c.margin()), exec, [&](std::size_t p) {
    T3 cf;
    unpack_pair_vec(c.at(p), pi, d, cf);
    const auto ei = frame.einv.at(p);
    CMat em(d);
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y) em(x, y) = ei[x * d + y];
    // Coordinate epsilon: frame-converted world epsilon = raise * symbol * det(e^mu_a).
    const double weight = eps.raise_sign() * em.determinant().real();

    // Levi-Civita terms drop out of eps^{k mu nu rho} nabla_mu T_{nu rho}; only the
    // spin connection acts.
    auto residual = [&](const Field& t) {
      std::array<double, 36> buf{};
      std::array<T4, 4> dt;  // dt[mu][i][j][nu][rho]
      T4 tf;
      unpack_pair_pair(t.at(p), pi, tf);
      for (int mu = 0; mu < d; ++mu) {
        derivative_at(t, p, mu, s, std::span<double>(buf.data(), np * np));
        unpack_pair_pair(std::span<const double>(buf.data(), np * np), pi, dt[mu]);
        // Only i < j is read below; the coordinate pair stays antisymmetric.
        for (int a = 0; a < np; ++a) {
          const auto [i, j] = pi.pair(a);
          for (int b = 0; b < np; ++b) {
            const auto [nu, rho] = pi.pair(b);
            double v = 0;
            for (int k = 0; k < d; ++k)
              v += sig.eta[k] * (cf[i3(k, i, mu)] * tf[i4(k, j, nu, rho)] + cf[i3(k, j, mu)] * tf[i4(i, k, nu, rho)]);
            dt[mu][i4(i, j, nu, rho)] -= v;
            dt[mu][i4(i, j, rho, nu)] += v;
          }
        }
      }
      double worst = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          std::array<double, 4> acc{};
          for (const auto& term : eps.terms()) {
            const auto& x = term.idx;
            acc[x[0]] += term.sign * dt[x[1]][i4(i, j, x[2], x[3])];
          }
          for (double v : acc) worst = std::max(worst, std::abs(weight * v));
        }
      return worst;
    };
    out.bianchi(p, 0) = residual(curv.R);
    out.total(p, 0) = residual(*curv.Sigma);

    std::array<double, 6> fb{};
    std::array<double, 4> acc{};
    for (int mu = 0; mu < d; ++mu) {
      derivative_at(curv.qF, p, mu, s, std::span<double>(fb.data(), np));
      for (const auto& term : eps.terms()) {
        const auto& x = term.idx;
        if (x[1] != mu) continue;
        const int k = pi.index(x[2], x[3]);
        acc[x[0]] += term.sign * (x[2] < x[3] ? fb[k] : -fb[k]);
      }
    }
    double worst = 0;
    for (double v : acc) worst = std::max(worst, std::abs(weight * v));
    out.cauchy(p, 0) = worst;
  });
  out.bianchi.set_margin(std::max(margin, c.margin()));
  out.cauchy.set_margin(std::max(margin, c.margin()));
  out.total.set_margin(std::max(margin, c.margin()));
  out.bianchi.poison_invalid();
  out.cauchy.poison_invalid();
  out.total.poison_invalid();
  return out;
}

Field commutator_residual(const ComplexField& psi, const Field& c, const Field& a, double q,
                          const Field* sigma_curvature, const Field* riemann, const Field* qf_gauge,
                          const CliffordRep& rep, const DiffScheme& s, const Exec& exec) {
  if (!sigma_curvature && !(riemann && qf_gauge)) throw MissingFieldError("commutator check needs a curvature");
  const Grid& g = psi.grid();
  const int d = g.dimension(), n = rep.spinor_dim;
  const PairIndex pi(d);
  const auto& basis = rep.algebra_basis();
  const ComplexField dpsi = gradient(psi, s, exec);
  const int m1 = std::max({dpsi.margin(), c.margin(), a.margin()});
  ComplexField cov(g, {n, d}, m1);
  for_each_valid(g, m1, exec, [&](std::size_t p) {
    const CVec v = load_spinor(psi, p, n);
    for (int mu = 0; mu < d; ++mu) {
      const CVec w = spinor_connection(c.at(p), a.at(p), q, mu, rep) * v;
      for (int i = 0; i < n; ++i) cov(p, i * d + mu) = dpsi(p, i * d + mu) + w[i];
    }
  });
  cov.poison_invalid();
  int m2 = m1 + s.radius();
  if (sigma_curvature) m2 = std::max(m2, sigma_curvature->margin());
  if (riemann) m2 = std::max({m2, riemann->margin(), qf_gauge->margin()});
  Field out(g, {}, m2);
  for_each_valid(g, m2, exec, [&](std::size_t p) {
    const CVec v = load_spinor(psi, p, n);
    std::array<std::array<cplx, 16>, 4> dd{};  // dd[mu][i*d+nu] = d_mu cov_nu
    std::array<CMat, 4> om;
    for (int mu = 0; mu < d; ++mu) {
      derivative_at(cov, p, mu, s, std::span<cplx>(dd[mu].data(), n * d));
      om[mu] = spinor_connection(c.at(p), a.at(p), q, mu, rep);
    }
    auto cov_at = [&](int nu) {
      CVec w(n);
      for (int i = 0; i < n; ++i) w[i] = cov(p, i * d + nu);
      return w;
    };
    double worst = 0;
    for (int l = 0; l < pi.count(); ++l) {
      const auto [mu, nu] = pi.pair(l);
      CVec lhs(n);
      for (int i = 0; i < n; ++i) lhs[i] = dd[mu][i * d + nu] - dd[nu][i * d + mu];
      lhs += om[mu] * cov_at(nu) - om[nu] * cov_at(mu);
      CMat op(n);
      const int np = pi.count();
      if (sigma_curvature) {
        for (int k = 0; k < np; ++k) op.add_scaled(basis[k + 1], (*sigma_curvature)(p, k * np + l));
      } else {
        for (int k = 0; k < np; ++k) op.add_scaled(basis[k + 1], (*riemann)(p, k * np + l));
        op += CMat::identity(n) * (kI * (*qf_gauge)(p, l));
      }
      worst = std::max(worst, (lhs - op * v).max_abs());
    }
    out(p, 0) = worst;
  });
  out.poison_invalid();
  return out;
}

}  // namespace topo
