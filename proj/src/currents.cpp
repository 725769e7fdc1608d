#include "topo/currents.hpp"

#include <algorithm>
#include <cmath>

namespace topo {

using namespace tensor;

std::string_view current_name(CurrentKind k) {
  switch (k) {
    case CurrentKind::G2: return "G2";
    case CurrentKind::K2: return "K2";
    case CurrentKind::G3: return "G3";
    case CurrentKind::K3: return "K3";
    case CurrentKind::G4: return "G4";
    case CurrentKind::K4: return "K4";
  }
  return "?";
}

int current_dimension(CurrentKind k) {
  switch (k) {
    case CurrentKind::G2:
    case CurrentKind::K2: return 2;
    case CurrentKind::G3:
    case CurrentKind::K3: return 3;
    default: return 4;
  }
}

bool current_is_axial(CurrentKind k) {
  return k == CurrentKind::K2 || k == CurrentKind::K3 || k == CurrentKind::K4;
}

namespace kernels {

namespace {
// Y_{fecd} = X_{fecd} - 2/3 Sigma_{fkc} Sigma^k_{ed}
T4 shifted_curvature(const T3& sg, const T4& x, const SignatureConfig& sig) {
  T4 y{};
  for (int f = 0; f < 4; ++f)
    for (int e = 0; e < 4; ++e)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double q = 0;
          for (int k = 0; k < 4; ++k) q += sg[i3(f, k, c)] * sig.eta[k] * sg[i3(k, e, d)];
          y[i4(f, e, c, d)] = x[i4(f, e, c, d)] - (2.0 / 3.0) * q;
        }
  return y;
}
}  // namespace

std::array<double, 4> g4(const T3& sg, const T4& x, const SignatureConfig& sig, const Epsilon& eps,
                         int orientation) {
  // V^a = -1/4 eps^{abcd} eps^{efgh} Sigma_{ghb} Y_{fecd}
  const T4 y = shifted_curvature(sg, x, sig);
  const double w = -0.25 * orientation * orientation;  // the two raise signs cancel
  std::array<double, 4> v{};
  for (const auto& t1 : eps.terms()) {
    const auto& a = t1.idx;
    double acc = 0;
    for (const auto& t2 : eps.terms()) {
      const auto& e = t2.idx;
      acc += t2.sign * sg[i3(e[2], e[3], a[1])] * y[i4(e[1], e[0], a[2], a[3])];
    }
    v[a[0]] += w * t1.sign * acc;
  }
  return v;
}

std::array<double, 4> k4(const T3& sg, const T4& x, const SignatureConfig& sig, const Epsilon& eps,
                         int orientation) {
  // V^a = 1/2 eps^{abcd} Sigma^e_{fb} Y^f_{ecd}
  const T4 y = shifted_curvature(sg, x, sig);
  const double w = 0.5 * orientation * eps.raise_sign();
  std::array<double, 4> v{};
  for (const auto& t : eps.terms()) {
    const auto& a = t.idx;
    double acc = 0;
    for (int e = 0; e < 4; ++e)
      for (int f = 0; f < 4; ++f)
        acc += sig.eta[e] * sig.eta[f] * sg[i3(e, f, a[1])] * y[i4(f, e, a[2], a[3])];
    v[a[0]] += w * t.sign * acc;
  }
  return v;
}

std::array<double, 4> g3(const T3& sg, const T4& x, std::span<const double> s, const Epsilon& eps,
                         int orientation) {
  // V^a = eps^{abc} eps^{efg} s_e (X_{fgbc} + 2 s^i s^j Sigma_{ifb} Sigma_{jgc})
  const double w = orientation * orientation * eps.raise_sign() * eps.raise_sign();
  std::array<double, 4> v{};
  T2 sv{};  // sv[f][b] = s^i Sigma_{ifb}
  for (int f = 0; f < 3; ++f)
    for (int b = 0; b < 3; ++b) {
      double acc = 0;
      for (int i = 0; i < 3; ++i) acc += s[i] * sg[i3(i, f, b)];
      sv[i2(f, b)] = acc;
    }
  for (const auto& t1 : eps.terms()) {
    const auto& a = t1.idx;
    double acc = 0;
    for (const auto& t2 : eps.terms()) {
      const auto& e = t2.idx;
      acc += t2.sign * s[e[0]] *
             (x[i4(e[1], e[2], a[1], a[2])] + 2.0 * sv[i2(e[1], a[1])] * sv[i2(e[2], a[2])]);
    }
    v[a[0]] += w * t1.sign * acc;
  }
  return v;
}

double g4_density(const T4& x, const SignatureConfig& sig, const Epsilon& eps, int orientation) {
  (void)sig;
  // -1/4 eps^{abcd} X_{efcd} (1/2 eps^{efgh} X_{ghab})
  double acc = 0;
  for (const auto& t1 : eps.terms()) {
    const auto& a = t1.idx;
    for (const auto& t2 : eps.terms()) {
      const auto& e = t2.idx;
      acc += t1.sign * t2.sign * x[i4(e[0], e[1], a[2], a[3])] * x[i4(e[2], e[3], a[0], a[1])];
    }
  }
  return -0.125 * orientation * orientation * acc;
}

double k4_density(const T4& x, const SignatureConfig& sig, const Epsilon& eps, int orientation) {
  return pontryagin4d_density(x, sig, eps, orientation);
}

}  // namespace kernels

// ---------------------------------------------------------------------------

namespace {

template <class T>
const T& need(const T* p, const char* what) {
  if (!p) throw MissingFieldError(std::string("current needs ") + what);
  return *p;
}

double det_einv(std::span<const double> einv, int d) {
  CMat m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = einv[i * d + j];
  return m.determinant().real();
}

}  // namespace

TopologicalCurrent topological_current(CurrentKind kind, const CurrentInputs& in, const CliffordRep& rep,
                                       const DiffScheme& s, int orientation, const Exec& exec) {
  const int d = rep.dimension();
  if (current_dimension(kind) != d) throw ValidationError("current kind does not match the dimension");
  if (orientation != 1 && orientation != -1) throw ValidationError("orientation must be +1 or -1");
  const FrameField& frame = need(in.frame, "the frame");
  const TensorialConnection& conn = need(in.conn, "the tensorial connection");
  const Grid& g = frame.e.grid();
  const SignatureConfig& sig = rep.config;
  const Epsilon& eps = rep.epsilon;
  const PairIndex pi(d);
  const double raise = eps.raise_sign();
  TopologicalCurrent out;
  out.kind = kind;

  switch (kind) {
    case CurrentKind::G2: {
      const Field& rv = need(conn.R_vector ? &*conn.R_vector : nullptr, "the 2D vector R_a");
      const Field& riem = need(in.riemann, "the Riemann curvature");
      out.V = Field(g, {d}, rv.margin());
      for_each_valid(g, rv.margin(), exec, [&](std::size_t p) {
        const auto ei = frame.einv.at(p);
        for (int mu = 0; mu < d; ++mu) {
          double acc = 0;
          for (int a = 0; a < d; ++a) acc += ei[mu * d + a] * sig.eta[a] * rv(p, a);
          out.V(p, mu) = acc;
        }
      });
      out.density = characteristic_density(DensityKind::Euler2D, riem, frame, sig, orientation, exec);
      break;
    }
    case CurrentKind::K2: {
      const Field& qf = need(in.qf_gauge, "q F");
      out.V = Field(g, {d}, conn.P.margin());
      for_each_valid(g, conn.P.margin(), exec, [&](std::size_t p) {
        const auto ei = frame.einv.at(p);
        for (int mu = 0; mu < d; ++mu) {
          double acc = 0;
          for (int nu = 0; nu < d; ++nu)
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b)
                acc += conn.P(p, nu) * ei[nu * d + a] * ei[mu * d + b] * eps.lower(a, b);
          out.V(p, mu) = orientation * raise * acc;
        }
      });
      out.density = Field(g, {}, qf.margin());
      for_each_valid(g, qf.margin(), exec, [&](std::size_t p) {
        out.density(p, 0) = orientation * raise * det_einv(frame.einv.at(p), d) * qf(p, 0);
      });
      break;
    }
    case CurrentKind::G3:
    case CurrentKind::G4:
    case CurrentKind::K4: {
      const Field& sgf = need(conn.Sigma ? &*conn.Sigma : nullptr, "Sigma");
      const Field& xf = need(in.sigma_curvature, "the Sigma-curvature");
      const PolarData* polar = in.polar;
      if (kind == CurrentKind::G3) need(polar && polar->s ? &*polar->s : nullptr, "the spin vector s");
      const int margin = std::max(sgf.margin(), xf.margin());
      out.V = Field(g, {d}, margin);
      out.density = Field(g, {}, margin);
      for_each_valid(g, margin, exec, [&](std::size_t p) {
        const auto ei = frame.einv.at(p);
        T3 sg, sw;
        unpack_pair_vec(sgf.at(p), pi, d, sg);
        last_to_world(sg, ei, d, sw);
        T4 x, xw;
        unpack_pair_pair(xf.at(p), pi, x);
        last2_to_world(x, ei, d, xw);
        std::array<double, 4> v{};
        double dens = 0;
        if (kind == CurrentKind::G4) {
          v = kernels::g4(sw, xw, sig, eps, orientation);
          dens = kernels::g4_density(xw, sig, eps, orientation);
        } else if (kind == CurrentKind::K4) {
          v = kernels::k4(sw, xw, sig, eps, orientation);
          dens = kernels::k4_density(xw, sig, eps, orientation);
        } else {
          v = kernels::g3(sw, xw, polar->s->at(p), eps, orientation);
        }
        for (int mu = 0; mu < d; ++mu) {
          double acc = 0;
          for (int a = 0; a < d; ++a) acc += ei[mu * d + a] * v[a];
          out.V(p, mu) = acc;
        }
        out.density(p, 0) = dens;
      });
      break;
    }
    case CurrentKind::K3: {
      // R_alpha = R_{abc} eta^{bc} e^a_alpha, then eps^{mu nu alpha} d_nu R_alpha.
      Field ra(g, {d}, conn.R.margin());
      for_each_valid(g, conn.R.margin(), exec, [&](std::size_t p) {
        T3 r, rw;
        unpack_pair_vec(conn.R.at(p), pi, d, r);
        last_to_world(r, frame.einv.at(p), d, rw);
        const auto e = frame.e.at(p);
        for (int al = 0; al < d; ++al) {
          double acc = 0;
          for (int a = 0; a < d; ++a) {
            double tr = 0;
            for (int b = 0; b < d; ++b) tr += sig.eta[b] * rw[i3(a, b, b)];
            acc += tr * e[a * d + al];
          }
          ra(p, al) = acc;
        }
      });
      ra.poison_invalid();
      const Field dra = gradient(ra, s, exec);
      out.V = Field(g, {d}, dra.margin());
      out.density = Field(g, {}, dra.margin());
      for_each_valid(g, dra.margin(), exec, [&](std::size_t p) {
        const double w = orientation * raise * det_einv(frame.einv.at(p), d);
        std::array<double, 3> v{};
        for (const auto& t : eps.terms()) v[t.idx[0]] += w * t.sign * dra(p, t.idx[2] * d + t.idx[1]);
        for (int mu = 0; mu < d; ++mu) out.V(p, mu) = v[mu];
      });
      break;
    }
  }
  out.V.poison_invalid();
  out.density.poison_invalid();
  return out;
}

Field verify_class(const TopologicalCurrent& current, const Field& metric, const DiffScheme& s, const Exec& exec) {
  const Field div = covariant_divergence(current.V, metric, s, exec);
  const Grid& g = div.grid();
  const int margin = std::max(div.margin(), current.density.margin());
  Field out(g, {}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) { out(p, 0) = div(p, 0) - current.density(p, 0); });
  out.poison_invalid();
  return out;
}

double k3_christoffel_term(const TensorialConnection& conn, const FrameField& frame, const Field& lambda,
                           const CliffordRep& rep) {
  const int d = rep.dimension();
  if (d != 3) throw ConfigurationError("K3 lives in 3D");
  const Grid& g = conn.R.grid();
  const PairIndex pi(d);
  const int margin = std::max(conn.R.margin(), lambda.margin());
  double worst = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!g.interior(p, margin)) continue;
    T3 r, rw;
    unpack_pair_vec(conn.R.at(p), pi, d, r);
    last_to_world(r, frame.einv.at(p), d, rw);
    const auto e = frame.e.at(p);
    std::array<double, 3> ra{};
    for (int al = 0; al < d; ++al)
      for (int a = 0; a < d; ++a) {
        double tr = 0;
        for (int b = 0; b < d; ++b) tr += rep.eta(b) * rw[i3(a, b, b)];
        ra[al] += tr * e[a * d + al];
      }
    const auto lam = lambda.at(p);
    std::array<double, 3> v{};
    for (const auto& t : rep.epsilon.terms()) {
      const int mu = t.idx[0], nu = t.idx[1], al = t.idx[2];
      for (int rho = 0; rho < d; ++rho) v[mu] += t.sign * lam[(rho * d + al) * d + nu] * ra[rho];
    }
    for (double x : v) worst = std::max(worst, std::abs(x));
  }
  return worst;
}

Field pure_gauge_k4(const Field& qf, const Field& pfield, const FrameField& frame, const CliffordRep& rep,
                    int orientation, const Exec& exec) {
  const Grid& g = qf.grid();
  const int d = 4;
  const PairIndex pi(d);
  const int margin = std::max(qf.margin(), pfield.margin());
  Field out(g, {d}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    const double w = 4.0 * orientation * rep.epsilon.raise_sign() * det_einv(frame.einv.at(p), d);
    std::array<double, 4> v{};
    for (const auto& t : rep.epsilon.terms()) {
      const auto& x = t.idx;
      const int k = pi.index(x[0], x[1]);
      const double f = x[0] < x[1] ? qf(p, k) : -qf(p, k);
      v[x[3]] += w * t.sign * f * pfield(p, x[2]);
    }
    for (int mu = 0; mu < d; ++mu) out(p, mu) = v[mu];
  });
  out.poison_invalid();
  return out;
}

Field flat_g3(const Field& qf, const FrameField& frame, const CliffordRep& rep, const Exec& exec) {
  const Grid& g = qf.grid();
  const int d = 3;
  const PairIndex pi(d);
  Field out(g, {d}, qf.margin());
  for_each_valid(g, qf.margin(), exec, [&](std::size_t p) {
    const double w = 4.0 * rep.epsilon.raise_sign() * det_einv(frame.einv.at(p), d);
    std::array<double, 3> v{};
    for (const auto& t : rep.epsilon.terms()) {
      const auto& x = t.idx;
      const int k = pi.index(x[0], x[1]);
      v[x[2]] += w * t.sign * (x[0] < x[1] ? qf(p, k) : -qf(p, k));
    }
    for (int mu = 0; mu < d; ++mu) out(p, mu) = v[mu];
  });
  out.poison_invalid();
  return out;
}

}  // namespace topo
