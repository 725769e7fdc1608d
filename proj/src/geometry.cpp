#include "topo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace topo {

using namespace tensor;

FrameField make_frame(Field e, const Exec& exec) {
  const Grid& g = e.grid();
  const int d = g.dimension();
  if (e.components() != static_cast<std::size_t>(d * d)) throw ValidationError("co-frame must have shape [d, d]");
  Field einv(g, {d, d}, e.margin());
  for_each_valid(g, e.margin(), exec, [&](std::size_t p) {
    CMat m(d);
    for (int a = 0; a < d; ++a)
      for (int mu = 0; mu < d; ++mu) m(a, mu) = e(p, a * d + mu);
    const double det = std::abs(m.determinant());
    if (!(det > 1e-12)) {
      std::ostringstream os;
      os << "degenerate frame at point (";
      for (int a = 0; a < d; ++a) os << (a ? ", " : "") << g.coordinate(p, a);
      os << ")";
      throw DegenerateError(os.str());
    }
    const CMat inv = m.inverse();
    for (int mu = 0; mu < d; ++mu)
      for (int a = 0; a < d; ++a) einv(p, mu * d + a) = inv(mu, a).real();
  });
  einv.poison_invalid();
  return {std::move(e), std::move(einv)};
}

Field metric_from_frame(const FrameField& frame, const SignatureConfig& sig, const Exec& exec) {
  const Grid& g = frame.e.grid();
  const int d = g.dimension();
  Field out(g, {d, d}, frame.e.margin());
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    const auto e = frame.e.at(p);
    for (int m = 0; m < d; ++m)
      for (int n = m; n < d; ++n) {
        double s = 0;
        for (int a = 0; a < d; ++a) s += e[a * d + m] * e[a * d + n] * sig.eta[a];
        out(p, m * d + n) = out(p, n * d + m) = s;
      }
  });
  out.poison_invalid();
  return out;
}

Field levi_civita(const Field& metric, const DiffScheme& s, const Exec& exec) {
  const Grid& g = metric.grid();
  const int d = g.dimension();
  const Field dg = gradient(metric, s, exec);  // dg[m][n][k] = d_k g_mn
  Field out(g, {d, d, d}, dg.margin());
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    const auto gm = metric.at(p);
    CMat m(d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) m(a, b) = gm[a * d + b];
    const CMat gi = m.inverse();
    const auto D = dg.at(p);
    auto dgv = [&](int a, int b, int k) { return D[(a * d + b) * d + k]; };
    for (int al = 0; al < d; ++al)
      for (int si = 0; si < d; ++si)
        for (int mu = si; mu < d; ++mu) {
          double acc = 0;
          for (int be = 0; be < d; ++be)
            acc += gi(al, be).real() * (dgv(be, mu, si) + dgv(be, si, mu) - dgv(si, mu, be));
          out(p, (al * d + si) * d + mu) = out(p, (al * d + mu) * d + si) = 0.5 * acc;
        }
  });
  out.poison_invalid();
  return out;
}

Field spin_connection_full(const FrameField& frame, const Field& lambda, const DiffScheme& s, const Exec& exec) {
  const Grid& g = frame.e.grid();
  const int d = g.dimension();
  const Field dinv = gradient(frame.einv, s, exec);  // [sigma][k][mu] = d_mu e^sigma_k
  Field out(g, {d, d, d}, std::max(dinv.margin(), lambda.margin()));
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    const auto e = frame.e.at(p);
    const auto ei = frame.einv.at(p);
    const auto D = dinv.at(p);
    const auto L = lambda.at(p);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        for (int mu = 0; mu < d; ++mu) {
          double acc = 0;
          for (int sg = 0; sg < d; ++sg) {
            acc += e[i * d + sg] * D[(sg * d + k) * d + mu];
            for (int al = 0; al < d; ++al) acc += e[i * d + al] * ei[sg * d + k] * L[(al * d + sg) * d + mu];
          }
          out(p, (i * d + k) * d + mu) = acc;
        }
  });
  out.poison_invalid();
  return out;
}

Field spin_connection(const FrameField& frame, const Field& lambda, const SignatureConfig& sig, const DiffScheme& s,
                      const Exec& exec) {
  const Field full = spin_connection_full(frame, lambda, s, exec);
  const Grid& g = full.grid();
  const int d = g.dimension();
  const PairIndex pi(d);
  Field out(g, {pi.count(), d}, full.margin());
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    const auto c = full.at(p);
    for (int k = 0; k < pi.count(); ++k) {
      const auto [i, j] = pi.pair(k);
      for (int mu = 0; mu < d; ++mu)
        out(p, k * d + mu) = 0.5 * (sig.eta[i] * c[(i * d + j) * d + mu] - sig.eta[j] * c[(j * d + i) * d + mu]);
    }
  });
  out.poison_invalid();
  return out;
}

Field riemann_from_spin_connection(const Field& c, const SignatureConfig& sig, const DiffScheme& s, const Exec& exec) {
  const Grid& g = c.grid();
  const int d = g.dimension();
  const PairIndex pi(d);
  const int np = pi.count();
  g.require_stencil(s.radius());
  Field out(g, {np, np}, c.margin() + s.radius());
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    T3 cf;
    unpack_pair_vec(c.at(p), pi, d, cf);
    std::array<double, 24> buf{};
    T4 dc{};  // dc[i][j][nu][mu] = d_mu C_{ij nu}
    for (int mu = 0; mu < d; ++mu) {
      derivative_at(c, p, mu, s, std::span<double>(buf.data(), np * d));
      for (int k = 0; k < np; ++k) {
        const auto [i, j] = pi.pair(k);
        for (int nu = 0; nu < d; ++nu) {
          dc[i4(i, j, nu, mu)] = buf[k * d + nu];
          dc[i4(j, i, nu, mu)] = -buf[k * d + nu];
        }
      }
    }
    auto dst = out.at(p);
    for (int k = 0; k < np; ++k) {
      const auto [i, j] = pi.pair(k);
      for (int l = 0; l < np; ++l) {
        const auto [mu, nu] = pi.pair(l);
        double r = dc[i4(i, j, nu, mu)] - dc[i4(i, j, mu, nu)];
        for (int q = 0; q < d; ++q)
          r += sig.eta[q] * (cf[i3(i, q, mu)] * cf[i3(q, j, nu)] - cf[i3(i, q, nu)] * cf[i3(q, j, mu)]);
        dst[k * np + l] = r;
      }
    }
  });
  out.poison_invalid();
  return out;
}

void curvature_world(std::span<const double> packed, std::span<const double> einv, int d, T4& out) {
  const PairIndex pi(d);
  T4 full;
  unpack_pair_pair(packed, pi, full);
  last2_to_world(full, einv, d, out);
}

T2 ricci_world(const T4& rw, const SignatureConfig& sig) {
  T2 r{};
  const int d = sig.dimension;
  for (int j = 0; j < d; ++j)
    for (int b = 0; b < d; ++b) {
      double s = 0;
      for (int i = 0; i < d; ++i) s += sig.eta[i] * rw[i4(i, j, i, b)];
      r[i2(j, b)] = s;
    }
  return r;
}

double ricci_scalar(const T4& rw, const SignatureConfig& sig) {
  const T2 r = ricci_world(rw, sig);
  double s = 0;
  for (int a = 0; a < sig.dimension; ++a) s += sig.eta[a] * r[i2(a, a)];
  return s;
}

namespace {
template <class Fn>
Field scalar_from_curvature(const Field& curvature, const FrameField& frame, const Exec& exec, Fn&& fn) {
  const Grid& g = curvature.grid();
  const int d = g.dimension();
  Field out(g, {}, std::max(curvature.margin(), frame.einv.margin()));
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    T4 rw;
    curvature_world(curvature.at(p), frame.einv.at(p), d, rw);
    out(p, 0) = fn(rw);
  });
  out.poison_invalid();
  return out;
}
}  // namespace

Field ricci_scalar_field(const Field& curvature, const FrameField& frame, const SignatureConfig& sig,
                         const Exec& exec) {
  return scalar_from_curvature(curvature, frame, exec, [&](const T4& rw) { return ricci_scalar(rw, sig); });
}

Field einstein_norm_field(const Field& curvature, const FrameField& frame, const SignatureConfig& sig,
                          const Exec& exec) {
  const int d = sig.dimension;
  return scalar_from_curvature(curvature, frame, exec, [&](const T4& rw) {
    const T2 ric = ricci_world(rw, sig);
    double r = 0;
    for (int a = 0; a < d; ++a) r += sig.eta[a] * ric[i2(a, a)];
    double m = 0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) m = std::max(m, std::abs(ric[i2(a, b)] - (a == b ? 0.5 * r * sig.eta[a] : 0.0)));
    return m;
  });
}

double euler2d_density(const T4& rw, const SignatureConfig& sig) { return -0.5 * ricci_scalar(rw, sig); }

double euler4d_density(const T4& rw, const Epsilon& eps, int orientation) {
  // -1/8 eps^{abcd} eps^{efgh} R_{abgh} R_{cdef}
  double acc = 0;
  const double s2 = static_cast<double>(orientation * orientation) * eps.raise_sign() * eps.raise_sign();
  for (const auto& t1 : eps.terms()) {
    const auto& x = t1.idx;
    for (const auto& t2 : eps.terms()) {
      const auto& y = t2.idx;
      acc += t1.sign * t2.sign * rw[i4(x[0], x[1], y[2], y[3])] * rw[i4(x[2], x[3], y[0], y[1])];
    }
  }
  return -0.125 * s2 * acc;
}

double pontryagin4d_density(const T4& rw, const SignatureConfig& sig, const Epsilon& eps, int orientation) {
  // 1/4 eps^{cdgh} R^{ab}_{cd} R_{ab gh}
  double acc = 0;
  for (const auto& t : eps.terms()) {
    const auto& x = t.idx;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        acc += t.sign * sig.eta[a] * sig.eta[b] * rw[i4(a, b, x[0], x[1])] * rw[i4(a, b, x[2], x[3])];
  }
  return 0.25 * orientation * eps.raise_sign() * acc;
}

double gauss_bonnet(const T4& rw, const SignatureConfig& sig) {
  const int d = sig.dimension;
  double quad = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e)
          quad += sig.eta[a] * sig.eta[b] * sig.eta[c] * sig.eta[e] * rw[i4(a, b, c, e)] * rw[i4(e, c, b, a)];
  const T2 ric = ricci_world(rw, sig);
  double rr = 0, r = 0;
  for (int a = 0; a < d; ++a) {
    r += sig.eta[a] * ric[i2(a, a)];
    for (int b = 0; b < d; ++b) rr += sig.eta[a] * sig.eta[b] * ric[i2(a, b)] * ric[i2(b, a)];
  }
  return quad - 4.0 * rr + r * r;
}

Field characteristic_density(DensityKind kind, const Field& curvature, const FrameField& frame,
                             const SignatureConfig& sig, int orientation, const Exec& exec) {
  const int d = curvature.grid().dimension();
  if ((kind == DensityKind::Euler2D) != (d == 2) || (kind != DensityKind::Euler2D && d != 4))
    throw ValidationError("density kind does not match the grid dimension");
  const Epsilon eps(d, sig.eta_det());
  switch (kind) {
    case DensityKind::Euler2D:
      return scalar_from_curvature(curvature, frame, exec, [&](const T4& rw) { return euler2d_density(rw, sig); });
    case DensityKind::Euler4D:
      return scalar_from_curvature(curvature, frame, exec,
                                   [&](const T4& rw) { return euler4d_density(rw, eps, orientation); });
    case DensityKind::Pontryagin4D:
      return scalar_from_curvature(curvature, frame, exec,
                                   [&](const T4& rw) { return pontryagin4d_density(rw, sig, eps, orientation); });
  }
  return {};
}

}  // namespace topo
