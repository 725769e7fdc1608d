#include "topo/spinor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace topo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double real_part(cplx z, double& residue) {
  residue = std::max(residue, std::abs(z.imag()));
  return z.real();
}

std::string where(const Grid& g, std::size_t p) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < g.dimension(); ++a) os << (a ? ", " : "") << g.coordinate(p, a);
  os << ")";
  return os.str();
}
}  // namespace

Bilinears bilinears(const CVec& psi, const CliffordRep& rep) {
  Bilinears b;
  const CMat& D = rep.adjoint_form;
  const int d = rep.dimension();
  b.Phi = real_part(sandwich(psi, D, psi), b.imag_residue);
  switch (rep.config.id) {
    case Config::D4_13:
      b.has_theta = b.has_u = b.has_s = true;
      b.Theta = real_part(kI * sandwich(psi, D * rep.pi(), psi), b.imag_residue);
      for (int a = 0; a < d; ++a) {
        b.U[a] = real_part(sandwich(psi, D * rep.gamma[a], psi), b.imag_residue);
        b.S[a] = real_part(sandwich(psi, D * rep.gamma[a] * rep.pi(), psi), b.imag_residue);
      }
      break;
    case Config::D2_11:
      b.has_theta = b.has_u = true;
      b.Theta = real_part(kI * sandwich(psi, D * rep.pi(), psi), b.imag_residue);
      for (int a = 0; a < d; ++a) b.U[a] = real_part(sandwich(psi, D * rep.gamma[a], psi), b.imag_residue);
      break;
    case Config::D2_02:
      b.has_theta = b.has_s = true;
      b.Theta = real_part(sandwich(psi, D * rep.pi(), psi), b.imag_residue);
      for (int a = 0; a < d; ++a) b.S[a] = real_part(sandwich(psi, D * rep.gamma[a], psi), b.imag_residue);
      break;
    case Config::D3_EUC:
      b.has_s = true;
      for (int a = 0; a < d; ++a) b.S[a] = real_part(sandwich(psi, D * rep.gamma[a], psi), b.imag_residue);
      break;
  }
  return b;
}

double eta_dot(const CliffordRep& rep, const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double s = 0;
  for (int i = 0; i < rep.dimension(); ++i) s += rep.eta(i) * a[i] * b[i];
  return s;
}

double FierzResiduals::max() const { return std::max({aux, norm, orthogonal, positivity, spinor3}); }

FierzResiduals fierz_residuals(const CVec& psi, const CliffordRep& rep) {
  FierzResiduals r;
  const Bilinears b = bilinears(psi, rep);
  const int d = rep.dimension();
  const double p2 = b.Phi * b.Phi, t2 = b.Theta * b.Theta;
  switch (rep.config.id) {
    case Config::D4_13: {
      const double uu = eta_dot(rep, b.U, b.U), ss = eta_dot(rep, b.S, b.S);
      r.norm = std::max(std::abs(uu - (t2 + p2)), std::abs(ss + (t2 + p2)));
      r.orthogonal = std::abs(eta_dot(rep, b.U, b.S));
      CMat m(rep.spinor_dim);
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) m += rep.sig(a, c) * (2.0 * rep.eta(a) * b.U[a] * rep.eta(c) * b.S[c]);
      r.aux = ((m * rep.pi()) * psi + psi * uu).max_abs();
      break;
    }
    case Config::D2_11:
      r.norm = std::abs(eta_dot(rep, b.U, b.U) - (p2 + t2));
      break;
    case Config::D2_02:
      r.norm = std::abs(eta_dot(rep, b.S, b.S) - (p2 - t2));
      r.positivity = std::max(0.0, t2 - p2);
      break;
    case Config::D3_EUC: {
      r.norm = std::abs(eta_dot(rep, b.S, b.S) - p2);
      CMat m(rep.spinor_dim);
      for (int a = 0; a < d; ++a) m += rep.gamma_lower[a] * b.S[a];
      r.spinor3 = (m * psi - psi * b.Phi).max_abs();
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

CMat chiral_factor(double angle, const CliffordRep& rep) {
  switch (rep.config.id) {
    case Config::D3_EUC:
      return CMat::identity(rep.spinor_dim);
    case Config::D2_02:
      return exp_quadratic(rep.pi() * (-0.5 * angle));
    default:
      return exp_quadratic(rep.pi() * (-0.5 * angle * kI));
  }
}

CMat spin_rotation(const CliffordRep& rep, const std::array<double, 3>& n, double theta) {
  const int d = rep.dimension();
  if (d != 3 && d != 4) throw ConfigurationError("spin_rotation needs three spatial directions");
  const int o = d == 4 ? 1 : 0;
  const CMat j = rep.sig(o + 1, o + 2) * n[0] + rep.sig(o + 2, o) * n[1] + rep.sig(o, o + 1) * n[2];
  // exp(w sigma^{12}) turns world vectors from axis 1 towards axis 2 by -eta_11 w.
  const double s = -rep.eta(o);
  return exp_quadratic(j * (s * theta));
}

CMat spin_boost(const CliffordRep& rep, const std::array<double, 3>& n, double w) {
  if (rep.config.id == Config::D2_11) return exp_quadratic(rep.sig(0, 1) * w);
  if (rep.config.id != Config::D4_13) throw ConfigurationError("spin_boost needs a Lorentzian signature");
  const CMat k = rep.sig(0, 1) * n[0] + rep.sig(0, 2) * n[1] + rep.sig(0, 3) * n[2];
  return exp_quadratic(k * w);
}

double group_residual(const CMat& L, const CliffordRep& rep) {
  const CMat& D = rep.adjoint_form;
  const int n = rep.spinor_dim;
  double r = (D.inverse() * L.adjoint() * D * L - CMat::identity(n)).max_abs();
  if (rep.parity) r = std::max(r, (L * rep.pi() - rep.pi() * L).max_abs());
  return r;
}

void unit_vectors(const CVec& psi, const CliffordRep& rep, double phi, std::array<double, 4>& u,
                  std::array<double, 4>& s) {
  const Bilinears b = bilinears(psi, rep);
  const double norm = rep.dimension() == 3 ? phi * phi : 2.0 * phi * phi;
  u.fill(0);
  s.fill(0);
  for (int a = 0; a < rep.dimension(); ++a) {
    if (b.has_u) u[a] = b.U[a] / norm;
    if (b.has_s) s[a] = b.S[a] / norm;
  }
}

namespace {

// Rotation taking the reference spin axis (third spatial axis) to t.
CMat align_spin(const CliffordRep& rep, std::array<double, 3> t) {
  const double len = std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
  for (auto& x : t) x /= len;
  std::array<double, 3> axis{-t[1], t[0], 0.0};
  const double sn = std::hypot(axis[0], axis[1]);
  const double theta = std::atan2(sn, t[2]);
  if (sn < 1e-14) {
    if (t[2] > 0) return CMat::identity(rep.spinor_dim);
    axis = {1.0, 0.0, 0.0};
  } else {
    axis[0] /= sn;
    axis[1] /= sn;
  }
  return spin_rotation(rep, axis, theta);
}

CMat phase(double alpha, int n) { return CMat::identity(n) * std::polar(1.0, alpha); }

}  // namespace

PolarPoint polar_decompose_point(const CVec& psi, const CliffordRep& rep) {
  PolarPoint out;
  const int n = rep.spinor_dim;
  const Bilinears b = bilinears(psi, rep);
  const double dens = psi.norm() * psi.norm();
  const double thr = conventions::kDegeneracyThreshold * dens * dens;
  CMat linv;  // L^{-1} up to the final phase
  CVec chi;
  switch (rep.config.id) {
    case Config::D4_13:
    case Config::D2_11: {
      const double rho2 = b.Phi * b.Phi + b.Theta * b.Theta;
      if (!(dens > 0) || rho2 < thr) throw DegenerateError("degenerate spinor: Phi^2 + Theta^2 below threshold");
      const double rho = std::sqrt(rho2);
      out.phi = std::sqrt(0.5 * rho);
      out.angle = std::atan2(b.Theta, b.Phi);
      chi = chiral_factor(-out.angle, rep) * psi * (1.0 / out.phi);
      for (int a = 0; a < rep.dimension(); ++a) out.u[a] = b.U[a] / rho;
      if (b.has_s)
        for (int a = 0; a < rep.dimension(); ++a) out.s[a] = b.S[a] / rho;
      if (rep.config.id == Config::D2_11) {
        linv = spin_boost(rep, {}, std::asinh(out.u[1]));
      } else {
        std::array<double, 3> dir{out.u[1], out.u[2], out.u[3]};
        const double vn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
        CMat boost = CMat::identity(n);
        if (vn > 0) {
          for (auto& x : dir) x /= vn;
          boost = spin_boost(rep, dir, std::asinh(vn));
        }
        const CVec rest = boost.inverse() * chi;
        const Bilinears br = bilinears(rest, rep);
        linv = boost * align_spin(rep, {br.S[1], br.S[2], br.S[3]});
      }
      break;
    }
    case Config::D2_02: {
      const double q = b.Phi * b.Phi - b.Theta * b.Theta;
      if (!(dens > 0) || q < thr) throw DegenerateError("degenerate spinor: Phi^2 - Theta^2 below threshold");
      const double rho = std::sqrt(q);
      out.phi = std::sqrt(0.5 * rho);
      out.angle = -std::atanh(b.Theta / b.Phi);
      chi = chiral_factor(-out.angle, rep) * psi * (1.0 / out.phi);
      for (int a = 0; a < 2; ++a) out.s[a] = b.S[a] / rho;
      // exp(theta sigma^{01}) turns (1,0) by -theta.
      const double theta = -std::atan2(out.s[1], out.s[0]);
      linv = exp_quadratic(rep.sig(0, 1) * theta);
      break;
    }
    case Config::D3_EUC: {
      if (!(dens > 0) || b.Phi * b.Phi < thr) throw DegenerateError("degenerate spinor: Phi below threshold");
      out.phi = std::sqrt(b.Phi);
      chi = psi * (1.0 / out.phi);
      for (int a = 0; a < 3; ++a) out.s[a] = b.S[a] / b.Phi;
      linv = align_spin(rep, {out.s[0], out.s[1], out.s[2]});
      break;
    }
  }
  // The remaining factor is a phase times the reference column.
  const CVec rest = linv.inverse() * chi;
  int k = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(rep.reference[i]) > std::abs(rep.reference[k])) k = i;
  const double alpha = std::arg(rest[k] / rep.reference[k]);
  linv = linv * phase(alpha, n);
  out.L = linv.inverse();
  return out;
}

CVec polar_reconstruct_point(double phi, double angle, const CMat& L, const CliffordRep& rep) {
  const double r = group_residual(L, rep);
  if (!(r <= 1e-9)) throw GroupError("L is not an element of the spin group (residual " + std::to_string(r) + ")");
  return chiral_factor(angle, rep) * (L.inverse() * rep.reference) * phi;
}

// ---------------------------------------------------------------------------

PolarData polar_decompose(const ComplexField& psi, const CliffordRep& rep, const Exec& exec) {
  const Grid& g = psi.grid();
  const int n = rep.spinor_dim, d = g.dimension();
  if (psi.components() != static_cast<std::size_t>(n)) throw ValidationError("spinor field has the wrong component count");
  PolarData pd;
  pd.phi = Field(g, {}, psi.margin());
  const bool has_angle = rep.config.id != Config::D3_EUC;
  if (has_angle) pd.angle = Field(g, {}, psi.margin());
  pd.L = ComplexField(g, {n, n}, psi.margin());
  pd.u = Field(g, {d}, psi.margin());
  pd.s = Field(g, {d}, psi.margin());
  for_each_valid(g, psi.margin(), exec, [&](std::size_t p) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = psi(p, i);
    PolarPoint pp;
    try {
      pp = polar_decompose_point(v, rep);
    } catch (const DegenerateError& e) {
      throw DegenerateError(std::string(e.what()) + " at " + where(g, p));
    }
    pd.phi(p, 0) = pp.phi;
    if (has_angle) (*pd.angle)(p, 0) = pp.angle;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pd.L(p, i * n + j) = pp.L(i, j);
    for (int a = 0; a < d; ++a) {
      (*pd.u)(p, a) = pp.u[a];
      (*pd.s)(p, a) = pp.s[a];
    }
  });
  if (rep.config.id != Config::D4_13 && rep.config.id != Config::D2_11) pd.u.reset();
  if (rep.config.id == Config::D2_11) pd.s.reset();
  pd.winding.assign(d, 0);

  // Unwrap beta: each point is referred to its predecessor along the fastest
  // axis that is not at its first valid index. A 2 pi shift of beta flips the
  // sign of the chiral factor, compensated by -L.
  if (rep.config.id == Config::D4_13 || rep.config.id == Config::D2_11) {
    Field& beta = *pd.angle;
    const int m = psi.margin();
    auto first = [&](int a) { return g.boundary(a) == Boundary::open ? static_cast<std::size_t>(m) : 0u; };
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!beta.valid(p)) continue;
      int ref_axis = -1;
      for (int a = d - 1; a >= 0; --a)
        if (g.index_along(p, a) > first(a)) {
          ref_axis = a;
          break;
        }
      if (ref_axis < 0) continue;
      const std::size_t q = g.shift(p, ref_axis, -1);
      const double k = std::round((beta(q, 0) - beta(p, 0)) / kTwoPi);
      if (k != 0) {
        beta(p, 0) += k * kTwoPi;
        if (std::fmod(std::abs(k), 2.0) == 1.0)
          for (std::size_t c = 0; c < pd.L.components(); ++c) pd.L(p, c) = -pd.L(p, c);
      }
    }
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!beta.valid(p)) continue;
      for (int a = 0; a < d; ++a) {
        const bool seam = g.index_along(p, a) + 1 == g.count(a);
        if (seam && g.boundary(a) == Boundary::open) continue;
        const std::size_t q = g.shift(p, a, 1);
        if (!beta.valid(q)) continue;
        double jump = beta(q, 0) - beta(p, 0);
        if (seam) {
          const double k = std::round(jump / kTwoPi);
          pd.winding[a] = std::max(pd.winding[a], static_cast<int>(std::abs(k)));
          jump -= k * kTwoPi;
        }
        if (std::abs(jump) > std::numbers::pi)
          throw BranchError("chiral angle jumps by " + std::to_string(jump) + " between " + where(g, p) + " and " +
                            where(g, q));
      }
    }
  }
  pd.phi.poison_invalid();
  return pd;
}

ComplexField polar_reconstruct(const PolarData& polar, const CliffordRep& rep, const Exec& exec) {
  const Grid& g = polar.phi.grid();
  const int n = rep.spinor_dim;
  const int margin = std::max(polar.phi.margin(), polar.L.margin());
  ComplexField psi(g, {n}, margin);
  for_each_valid(g, margin, exec, [&](std::size_t p) {
    CMat L(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) L(i, j) = polar.L(p, i * n + j);
    const double angle = polar.angle ? (*polar.angle)(p, 0) : 0.0;
    CVec v;
    try {
      v = polar_reconstruct_point(polar.phi(p, 0), angle, L, rep);
    } catch (const GroupError& e) {
      throw GroupError(std::string(e.what()) + " at " + where(g, p));
    }
    for (int i = 0; i < n; ++i) psi(p, i) = v[i];
  });
  psi.poison_invalid();
  return psi;
}

void attach_unit_vectors(PolarData& polar, const CliffordRep& rep, const Exec& exec) {
  const ComplexField psi = polar_reconstruct(polar, rep, exec);
  const Grid& g = psi.grid();
  const int d = g.dimension(), n = rep.spinor_dim;
  Field u(g, {d}, psi.margin()), s(g, {d}, psi.margin());
  for_each_valid(g, psi.margin(), exec, [&](std::size_t p) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = psi(p, i);
    std::array<double, 4> uu, ss;
    unit_vectors(v, rep, polar.phi(p, 0), uu, ss);
    for (int a = 0; a < d; ++a) {
      u(p, a) = uu[a];
      s(p, a) = ss[a];
    }
  });
  u.poison_invalid();
  s.poison_invalid();
  const Config c = rep.config.id;
  if (c == Config::D4_13 || c == Config::D2_11) polar.u = std::move(u);
  if (c != Config::D2_11) polar.s = std::move(s);
}

// ---------------------------------------------------------------------------

namespace {
bool sigma_name(const CliffordRep& rep, std::string_view name, int& a, int& b) {
  if (name.size() != 8 || name.substr(0, 6) != "sigma_") return false;
  a = name[6] - '0';
  b = name[7] - '0';
  return a >= 0 && b > a && b < rep.dimension();
}
}  // namespace

bool generator_valid(const CliffordRep& rep, std::string_view name) {
  const Config c = rep.config.id;
  int a, b;
  if (name == "phase" || sigma_name(rep, name, a, b)) return true;
  if (name == "boost_x" || name == "boost_y" || name == "boost_z") return c == Config::D4_13;
  if (name == "rot_yz" || name == "rot_zx" || name == "rot_xy") return c == Config::D4_13 || c == Config::D3_EUC;
  if (name == "boost") return c == Config::D2_11;
  if (name == "rot") return c == Config::D2_02;
  return false;
}

CMat generator_exp(const CliffordRep& rep, std::string_view name, double param, double q) {
  if (!generator_valid(rep, name))
    throw ConfigurationError("generator '" + std::string(name) + "' does not exist in " + std::string(rep.config.name));
  const int n = rep.spinor_dim;
  int a, b;
  if (name == "phase") return CMat::identity(n) * std::polar(1.0, q * param);
  if (sigma_name(rep, name, a, b)) return exp_quadratic(rep.sig(a, b) * param);
  if (name == "boost_x") return spin_boost(rep, {1, 0, 0}, param);
  if (name == "boost_y") return spin_boost(rep, {0, 1, 0}, param);
  if (name == "boost_z") return spin_boost(rep, {0, 0, 1}, param);
  if (name == "boost") return spin_boost(rep, {}, param);
  if (name == "rot_yz") return spin_rotation(rep, {1, 0, 0}, param);
  if (name == "rot_zx") return spin_rotation(rep, {0, 1, 0}, param);
  if (name == "rot_xy") return spin_rotation(rep, {0, 0, 1}, param);
  return exp_quadratic(rep.sig(0, 1) * param);  // rot
}

}  // namespace topo
