#include "topo/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace topo {

namespace {

CVec load_spinor(const ComplexField& f, std::size_t p, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = f(p, i);
  return v;
}

// Coordinate gradient of a scalar turned into world components.
std::array<double, 4> to_world(const Field& grad, std::size_t p, std::span<const double> einv, int d) {
  std::array<double, 4> w{};
  for (int a = 0; a < d; ++a)
    for (int mu = 0; mu < d; ++mu) w[a] += einv[mu * d + a] * grad(p, mu);
  return w;
}

CVec apply_map(const CVec& psi, std::span<const double> a_vec, std::span<const double> b_vec, double constraint,
               const CliffordRep& rep, const conventions::DiracMap& map) {
  const int n = rep.spinor_dim, d = rep.dimension();
  CMat op(n);
  for (int a = 0; a < d; ++a) op += rep.gamma[a] * (map.b * kI * b_vec[a]);
  if (d == 3) {
    op += CMat::identity(n) * (map.a * constraint);
  } else {
    CMat ag(n);
    for (int a = 0; a < d; ++a) ag += rep.gamma[a] * a_vec[a];
    op += ag * rep.pi() * map.a;
  }
  return op * psi * 0.5;
}

}  // namespace

ComplexField dirac_residual(const ComplexField& psi, const Field& c, const Field& a, const FrameField& frame,
                            const DiracParams& params, const CliffordRep& rep, const DiffScheme& s,
                            const Exec& exec) {
  const Grid& g = psi.grid();
  const int d = g.dimension(), n = rep.spinor_dim;
  const ComplexField dpsi = gradient(psi, s, exec);
  const int margin = std::max({dpsi.margin(), c.margin(), a.margin(), frame.e.margin()});
  ComplexField out(g, {n}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    const CVec v = load_spinor(psi, p, n);
    const auto ei = frame.einv.at(p);
    CVec acc = v * (-params.m);
    for (int mu = 0; mu < d; ++mu) {
      CVec cov(n);
      for (int i = 0; i < n; ++i) cov[i] = dpsi(p, i * d + mu);
      cov += spinor_connection(c.at(p), a.at(p), params.q, mu, rep) * v;
      CMat gm(n);
      for (int x = 0; x < d; ++x) gm += rep.gamma[x] * ei[mu * d + x];
      acc += (gm * cov) * kI;
    }
    for (int i = 0; i < n; ++i) out(p, i) = acc[i];
  });
  out.poison_invalid();
  return out;
}

PolarResiduals polar_residuals(const PolarData& polar, const TensorialConnection& conn, const FrameField& frame,
                               const DiracParams& params, const CliffordRep& rep, const DiffScheme& s,
                               const Exec& exec) {
  const Grid& g = polar.phi.grid();
  const int d = g.dimension();
  const Config cfg = rep.config.id;
  const double m = params.m;
  const Epsilon& eps = rep.epsilon;
  Field lnphi2(g, {}, polar.phi.margin());
  for (std::size_t p = 0; p < g.size(); ++p) lnphi2(p, 0) = 2.0 * std::log(polar.phi(p, 0));
  const Field dln = gradient(lnphi2, s, exec);
  std::optional<Field> dang;
  if (polar.angle) dang = gradient(*polar.angle, s, exec);
  if ((cfg == Config::D4_13 || cfg == Config::D2_02 || cfg == Config::D3_EUC) && !polar.s)
    throw MissingFieldError("polar residuals need the spin vector s");
  if (cfg == Config::D2_11 && !polar.u) throw MissingFieldError("polar residuals need the velocity u");

  int margin = std::max({dln.margin(), conn.R.margin(), frame.e.margin()});
  if (dang) margin = std::max(margin, dang->margin());
  PolarResiduals out;
  out.B = Field(g, {d}, margin);
  out.A = Field(g, {d == 3 ? 0 : d}, margin);
  if (d == 3) out.constraint = Field(g, {}, margin);

  for_each_valid(g, margin, exec, [&](std::size_t p) {
    const auto ei = frame.einv.at(p);
    const auto wl = to_world(dln, p, ei, d);
    std::array<double, 4> wa{};
    if (dang) wa = to_world(*dang, p, ei, d);
    const double ang = polar.angle ? (*polar.angle)(p, 0) : 0.0;
    std::array<double, 4> pw{};  // P_a world lower
    for (int x = 0; x < d; ++x)
      for (int mu = 0; mu < d; ++mu) pw[x] += ei[mu * d + x] * conn.P(p, mu);

    switch (cfg) {
      case Config::D4_13: {
        const auto sv = polar.s->at(p);
        for (int x = 0; x < d; ++x) {
          const double sl = rep.eta(x) * sv[x];
          out.A(p, x) = wa[x] + rep.eta(x) * (*conn.M_trace)(p, x) + 2.0 * m * sl * std::cos(ang);
          out.B(p, x) = wl[x] + rep.eta(x) * (*conn.Sigma_trace)(p, x) + 2.0 * m * sl * std::sin(ang);
        }
        break;
      }
      case Config::D2_11: {
        const auto uv = polar.u->at(p);
        for (int x = 0; x < d; ++x) {
          double pe = 0, ue = 0;
          for (int b = 0; b < d; ++b) {
            pe += rep.eta(b) * pw[b] * eps.lower(b, x);
            ue += uv[b] * eps.lower(b, x);
          }
          out.A(p, x) = wa[x] - 2.0 * pe + 2.0 * m * ue * std::cos(ang);
          out.B(p, x) = wl[x] + (*conn.R_vector)(p, x) + 2.0 * m * ue * std::sin(ang);
        }
        break;
      }
      case Config::D2_02: {
        const auto sv = polar.s->at(p);
        for (int x = 0; x < d; ++x) {
          double pe = 0, se = 0;
          for (int b = 0; b < d; ++b) {
            pe += rep.eta(b) * pw[b] * eps.lower(b, x);
            se += eps.lower(x, b) * sv[b];
          }
          out.A(p, x) = wa[x] - 2.0 * pe - 2.0 * m * std::cosh(ang) * se;
          out.B(p, x) = wl[x] + (*conn.R_vector)(p, x) + 2.0 * m * std::sinh(ang) * se;
        }
        break;
      }
      case Config::D3_EUC: {
        for (int x = 0; x < d; ++x) out.B(p, x) = (*conn.Sigma_trace)(p, x) + wl[x];
        (*out.constraint)(p, 0) = (*conn.M_trace)(p, 0) - 2.0 * m;
        break;
      }
    }
  });
  out.A.poison_invalid();
  out.B.poison_invalid();
  if (out.constraint) out.constraint->poison_invalid();
  return out;
}

Field equivalence_residual(const ComplexField& dirac, const PolarResiduals& pr, const ComplexField& psi,
                           const CliffordRep& rep, const conventions::DiracMap& map, const Exec& exec) {
  const Grid& g = psi.grid();
  const int n = rep.spinor_dim;
  const int margin = std::max({dirac.margin(), pr.B.margin(), psi.margin()});
  Field out(g, {}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    const CVec v = load_spinor(psi, p, n);
    const CVec target = apply_map(v, pr.A.at(p), pr.B.at(p), pr.constraint ? (*pr.constraint)(p, 0) : 0.0, rep, map);
    out(p, 0) = (load_spinor(dirac, p, n) - target).max_abs();
  });
  out.poison_invalid();
  return out;
}

MapRank equivalence_map_rank(const CVec& psi, const CliffordRep& rep, const conventions::DiracMap& map) {
  const int d = rep.dimension(), n = rep.spinor_dim;
  MapRank r;
  r.inputs = d == 3 ? 1 + d : 2 * d;
  std::vector<std::vector<double>> cols;
  for (int k = 0; k < r.inputs; ++k) {
    std::array<double, 4> av{}, bv{};
    double con = 0;
    if (d == 3) {
      if (k == 0) con = 1;
      else bv[k - 1] = 1;
    } else if (k < d) {
      av[k] = 1;
    } else {
      bv[k - d] = 1;
    }
    const CVec w = apply_map(psi, av, bv, con, rep, map);
    std::vector<double> col;
    for (int i = 0; i < n; ++i) {
      col.push_back(w[i].real());
      col.push_back(w[i].imag());
    }
    cols.push_back(std::move(col));
  }
  // Modified Gram-Schmidt with a pivot threshold relative to the spinor norm.
  const double scale = psi.norm();
  r.smallest_pivot = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> basis;
  for (auto col : cols) {
    for (const auto& q : basis) {
      double dot = 0;
      for (std::size_t i = 0; i < col.size(); ++i) dot += q[i] * col[i];
      for (std::size_t i = 0; i < col.size(); ++i) col[i] -= dot * q[i];
    }
    double nrm = 0;
    for (double x : col) nrm += x * x;
    nrm = std::sqrt(nrm);
    r.smallest_pivot = std::min(r.smallest_pivot, nrm / scale);
    if (nrm > 1e-9 * scale) {
      for (double& x : col) x /= nrm;
      basis.push_back(std::move(col));
    }
  }
  r.rank = static_cast<int>(basis.size());
  return r;
}

Decoupling decoupling_2d(const PolarData& polar, const TensorialConnection& conn, const FrameField& frame,
                         const DiracParams& params, const CliffordRep& rep, const DiffScheme& s, const Exec& exec) {
  if (rep.dimension() != 2) throw ConfigurationError("the decoupling check is two-dimensional");
  const PolarResiduals base = polar_residuals(polar, conn, frame, params, rep, s, exec);
  TensorialConnection dp = conn;
  for (std::size_t i = 0; i < dp.P.values().size(); ++i) dp.P.values()[i] += 0.37 + 0.01 * static_cast<double>(i % 7);
  TensorialConnection dr = conn;
  for (std::size_t i = 0; i < dr.R_vector->values().size(); ++i)
    dr.R_vector->values()[i] += 0.41 - 0.02 * static_cast<double>(i % 5);
  const PolarResiduals with_p = polar_residuals(polar, dp, frame, params, rep, s, exec);
  const PolarResiduals with_r = polar_residuals(polar, dr, frame, params, rep, s, exec);
  Decoupling out;
  const Grid& g = polar.phi.grid();
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!base.B.valid(p)) continue;
    for (int x = 0; x < 2; ++x) {
      out.b_under_p = std::max(out.b_under_p, std::abs(with_p.B(p, x) - base.B(p, x)));
      out.a_under_r = std::max(out.a_under_r, std::abs(with_r.A(p, x) - base.A(p, x)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Random smooth scalar: c0 + sum_k amp_k sin(k . x + phase_k).
struct SmoothFn {
  double c0 = 0;
  std::vector<std::array<double, 6>> terms;  // amp, phase, k0..k3
  double operator()(const std::array<double, 4>& x) const {
    double v = c0;
    for (const auto& t : terms) v += t[0] * std::sin(t[2] * x[0] + t[3] * x[1] + t[4] * x[2] + t[5] * x[3] + t[1]);
    return v;
  }
};

SmoothFn random_fn(std::mt19937_64& rng, double c0, double amp, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SmoothFn f;
  f.c0 = c0;
  for (int k = 0; k < 2; ++k) {
    std::array<double, 6> t{amp * u(rng), 3.0 * u(rng), 0, 0, 0, 0};
    for (int a = 0; a < d; ++a) t[2 + a] = u(rng);
    f.terms.push_back(t);
  }
  return f;
}

std::vector<std::string> generator_names(Config c) {
  switch (c) {
    case Config::D4_13: return {"boost_x", "boost_y", "boost_z", "rot_yz", "rot_zx", "rot_xy", "phase"};
    case Config::D2_11: return {"boost", "phase"};
    case Config::D2_02: return {"rot", "phase"};
    case Config::D3_EUC: return {"rot_yz", "rot_zx", "rot_xy", "phase"};
  }
  return {};
}

}  // namespace

Calibration calibrate_dirac_map(Config config, unsigned seed) {
  const CliffordRep rep = build_clifford(SignatureConfig::of(config));
  const int d = rep.dimension(), n = rep.spinor_dim;
  std::mt19937_64 rng(seed + static_cast<unsigned>(config));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DiffScheme s(4);
  const double h = 1e-3;
  const DiracParams params{1.3, 0.7};
  const std::array<cplx, 4> units{cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)};
  std::array<double, 16> worst{};

  for (int trial = 0; trial < conventions::kCalibrationPoints; ++trial) {
    std::vector<AxisSpec> axes;
    std::array<double, 4> x0{};
    for (int a = 0; a < d; ++a) {
      x0[a] = u(rng);
      axes.push_back({5, x0[a] - 2 * h, x0[a] + 2 * h, Boundary::open});
    }
    const Grid g(axes);
    std::vector<SmoothFn> frame_fn, a_fn, l_fn;
    for (int k = 0; k < d * d; ++k) frame_fn.push_back(random_fn(rng, k % (d + 1) == 0 ? 1.0 : 0.0, 0.2, d));
    for (int k = 0; k < d; ++k) a_fn.push_back(random_fn(rng, 0.0, 0.4, d));
    const auto names = generator_names(config);
    for (std::size_t k = 0; k < names.size(); ++k) l_fn.push_back(random_fn(rng, 0.0, 0.5, d));
    const SmoothFn phi_fn = random_fn(rng, 1.0, 0.2, d);
    const SmoothFn ang_fn = random_fn(rng, 0.0, 0.3, d);

    Field e(g, {d, d}), a(g, {d});
    ComplexField psi(g, {n});
    for (std::size_t p = 0; p < g.size(); ++p) {
      std::array<double, 4> x{};
      for (int k = 0; k < d; ++k) x[k] = g.coordinate(p, k);
      for (int k = 0; k < d * d; ++k) e(p, k) = frame_fn[k](x);
      for (int k = 0; k < d; ++k) a(p, k) = a_fn[k](x);
      CMat L = CMat::identity(n);
      for (std::size_t k = 0; k < names.size(); ++k) L = L * generator_exp(rep, names[k], l_fn[k](x), params.q);
      const CVec v = polar_reconstruct_point(phi_fn(x), config == Config::D3_EUC ? 0.0 : ang_fn(x), L, rep);
      for (int i = 0; i < n; ++i) psi(p, i) = v[i];
    }
    const FrameField frame = make_frame(e);
    const Field metric = metric_from_frame(frame, rep.config);
    const Field lambda = levi_civita(metric, s);
    const Field c = spin_connection(frame, lambda, rep.config, s);
    PolarData polar = polar_decompose(psi, rep);
    attach_unit_vectors(polar, rep);
    const LieLog lie = lie_log_derivative(polar.L, rep, params.q, s);
    const TensorialConnection conn = tensorial_connection(lie, c, a, params.q, polar, frame, rep);
    const ComplexField dres = dirac_residual(psi, c, a, frame, params, rep, s);
    const PolarResiduals pr = polar_residuals(polar, conn, frame, params, rep, s);

    const std::size_t centre = [&] {
      std::size_t p = 0;
      for (int k = 0; k < d; ++k) p += 2 * g.stride(k);
      return p;
    }();
    const CVec v = load_spinor(psi, centre, n);
    const CVec dv = load_spinor(dres, centre, n);
    for (int ib = 0; ib < 4; ++ib)
      for (int ia = 0; ia < 4; ++ia) {
        const conventions::DiracMap cand{units[ib], units[ia]};
        const CVec t = apply_map(v, pr.A.at(centre), pr.B.at(centre),
                                 pr.constraint ? (*pr.constraint)(centre, 0) : 0.0, rep, cand);
        worst[ib * 4 + ia] = std::max(worst[ib * 4 + ia], (dv - t).max_abs());
      }
  }
  std::array<int, 16> order{};
  for (int i = 0; i < 16; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return worst[x] < worst[y]; });
  Calibration out;
  out.map = {units[order[0] / 4], units[order[0] % 4]};
  out.residual = worst[order[0]];
  out.runner_up = worst[order[1]];
  if (!(out.residual < 1e-10))
    throw ValidationError("no candidate map reaches 1e-10 (best " + std::to_string(out.residual) + ")");
  return out;
}

}  // namespace topo
