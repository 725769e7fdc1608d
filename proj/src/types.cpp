#include "topo/types.hpp"

#include <algorithm>
#include <cmath>

namespace topo {

CVec::CVec(std::initializer_list<cplx> v) : n_(static_cast<int>(v.size())) {
  if (n_ > 4) throw ValidationError("CVec supports at most 4 components");
  std::copy(v.begin(), v.end(), d_.begin());
}

CVec CVec::operator+(const CVec& o) const {
  CVec r(n_);
  for (int i = 0; i < n_; ++i) r.d_[i] = d_[i] + o.d_[i];
  return r;
}
CVec CVec::operator-(const CVec& o) const {
  CVec r(n_);
  for (int i = 0; i < n_; ++i) r.d_[i] = d_[i] - o.d_[i];
  return r;
}
CVec& CVec::operator+=(const CVec& o) {
  for (int i = 0; i < n_; ++i) d_[i] += o.d_[i];
  return *this;
}
CVec CVec::operator*(cplx s) const {
  CVec r(n_);
  for (int i = 0; i < n_; ++i) r.d_[i] = d_[i] * s;
  return r;
}
double CVec::norm() const {
  double s = 0;
  for (int i = 0; i < n_; ++i) s += std::norm(d_[i]);
  return std::sqrt(s);
}
double CVec::max_abs() const {
  double m = 0;
  for (int i = 0; i < n_; ++i) m = std::max(m, std::abs(d_[i]));
  return m;
}

CMat CMat::identity(int n) {
  CMat m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::from_rows(std::initializer_list<cplx> v) {
  const int n = v.size() == 4 ? 2 : v.size() == 16 ? 4 : v.size() == 9 ? 3 : 0;
  if (n == 0) throw ValidationError("CMat::from_rows expects 4, 9 or 16 entries");
  CMat m(n);
  int k = 0;
  for (cplx x : v) {
    m(k / n, k % n) = x;
    ++k;
  }
  return m;
}

CMat CMat::operator+(const CMat& o) const {
  CMat r(*this);
  r += o;
  return r;
}
CMat CMat::operator-(const CMat& o) const {
  CMat r(*this);
  r -= o;
  return r;
}
CMat& CMat::operator+=(const CMat& o) {
  for (int i = 0; i < 16; ++i) d_[i] += o.d_[i];
  return *this;
}
CMat& CMat::operator-=(const CMat& o) {
  for (int i = 0; i < 16; ++i) d_[i] -= o.d_[i];
  return *this;
}
CMat CMat::operator*(const CMat& o) const {
  CMat r(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      const cplx a = (*this)(i, k);
      if (a == cplx{}) continue;
      for (int j = 0; j < n_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}
CMat& CMat::add_scaled(const CMat& o, double s) {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) d_[i * 4 + j] += s * o.d_[i * 4 + j];
  return *this;
}
CMat CMat::operator*(cplx s) const {
  CMat r(*this);
  for (auto& x : r.d_) x *= s;
  return r;
}
CVec CMat::operator*(const CVec& v) const {
  CVec r(n_);
  for (int i = 0; i < n_; ++i) {
    cplx s = 0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

CMat CMat::adjoint() const {
  CMat r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

cplx CMat::trace() const {
  cplx t = 0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double CMat::max_abs() const {
  double m = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

double CMat::dot(const CMat& o) const {
  double s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s += (std::conj((*this)(i, j)) * o(i, j)).real();
  return s;
}

namespace {
// LU with partial pivoting; returns determinant and fills the inverse if asked.
cplx lu_solve(const CMat& a, CMat* inv) {
  const int n = a.size();
  CMat m = a;
  CMat r = CMat::identity(n);
  cplx det = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(m(i, c)) > std::abs(m(p, c))) p = i;
    if (std::abs(m(p, c)) == 0.0) return 0.0;
    if (p != c) {
      det = -det;
      for (int j = 0; j < n; ++j) {
        std::swap(m(p, j), m(c, j));
        std::swap(r(p, j), r(c, j));
      }
    }
    const cplx piv = m(c, c);
    det *= piv;
    for (int j = 0; j < n; ++j) {
      m(c, j) /= piv;
      r(c, j) /= piv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      const cplx f = m(i, c);
      if (f == cplx{}) continue;
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(c, j);
        r(i, j) -= f * r(c, j);
      }
    }
  }
  if (inv) *inv = r;
  return det;
}
}  // namespace

cplx CMat::determinant() const { return lu_solve(*this, nullptr); }

CMat CMat::inverse() const {
  CMat r;
  const cplx det = lu_solve(*this, &r);
  if (std::abs(det) < 1e-300) throw DegenerateError("singular matrix");
  return r;
}

cplx sandwich(const CVec& psi, const CMat& m, const CVec& chi) {
  cplx s = 0;
  const int n = psi.size();
  for (int i = 0; i < n; ++i) {
    cplx row = 0;
    for (int j = 0; j < n; ++j) row += m(i, j) * chi[j];
    s += std::conj(psi[i]) * row;
  }
  return s;
}

CMat exp_quadratic(const CMat& x) {
  const int n = x.size();
  const CMat x2 = x * x;
  const cplx c = x2.trace() / static_cast<double>(n);
  const cplx z = std::sqrt(c);
  // exp(X) = cosh(z) I + sinh(z)/z X  with z^2 = c
  cplx shz;
  if (std::abs(z) < 1e-4) {
    shz = 1.0 + c / 6.0 + c * c / 120.0;
  } else {
    shz = std::sinh(z) / z;
  }
  return CMat::identity(n) * std::cosh(z) + x * shz;
}

namespace {
CMat log2x2(const CMat& g) {
  const cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  if (std::abs(det) < 1e-300) throw GroupError("singular group element");
  const cplx nu = std::sqrt(det);  // principal branch, near 1 for small steps
  CMat b = g * (1.0 / nu);
  const cplx c = 0.5 * b.trace();  // cosh z
  const cplx z = std::acosh(c);
  if (std::abs(z.imag()) > 1.5 || std::abs(std::log(nu).imag()) > 1.5)
    throw GroupError("relative group element outside the principal log branch (grid too coarse)");
  cplx f;  // z / sinh z
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    f = 1.0 - z2 / 6.0 + 7.0 * z2 * z2 / 360.0;
  } else {
    f = z / std::sinh(z);
  }
  CMat x = (b - CMat::identity(2) * c) * f;
  const cplx ln = std::log(nu);
  x(0, 0) += ln;
  x(1, 1) += ln;
  return x;
}
}  // namespace

CMat log_near_identity(const CMat& g) {
  const int n = g.size();
  if (n == 2) return log2x2(g);
  if (n != 4) throw GroupError("log_near_identity: unsupported size");
  double off = 0, scale = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      scale = std::max(scale, std::abs(g(i, j)));
      if ((i < 2) != (j < 2)) off = std::max(off, std::abs(g(i, j)));
    }
  if (off > 1e-12 * std::max(1.0, scale))
    throw GroupError("group element is not block diagonal in the chiral layout");
  CMat a(2), b(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      a(i, j) = g(i, j);
      b(i, j) = g(i + 2, j + 2);
    }
  const CMat la = log2x2(a), lb = log2x2(b);
  CMat r(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      r(i, j) = la(i, j);
      r(i + 2, j + 2) = lb(i, j);
    }
  return r;
}

PairIndex::PairIndex(int d) : d_(d) {
  table_.fill(-1);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      table_[i * 4 + j] = table_[j * 4 + i] = static_cast<int>(pairs_.size());
      pairs_.emplace_back(i, j);
    }
}

}  // namespace topo
