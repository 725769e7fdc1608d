#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace topo {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ConfigurationError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class GridError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class BranchError : public Error { using Error::Error; };
class GroupError : public Error { using Error::Error; };
class MissingFieldError : public Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Small dense complex linear algebra (n <= 4)

class CVec {
 public:
  CVec() = default;
  explicit CVec(int n) : n_(n) {}
  CVec(std::initializer_list<cplx> v);

  int size() const { return n_; }
  cplx& operator[](int i) { return d_[i]; }
  const cplx& operator[](int i) const { return d_[i]; }

  CVec operator+(const CVec& o) const;
  CVec operator-(const CVec& o) const;
  CVec& operator+=(const CVec& o);
  CVec operator*(cplx s) const;
  double norm() const;     // Euclidean
  double max_abs() const;

 private:
  int n_ = 0;
  std::array<cplx, 4> d_{};
};

class CMat {
 public:
  CMat() = default;
  explicit CMat(int n) : n_(n) {}
  static CMat identity(int n);
  /// Row-major initializer, size inferred from the element count (4 or 16).
  static CMat from_rows(std::initializer_list<cplx> v);

  int size() const { return n_; }
  cplx& operator()(int r, int c) { return d_[r * 4 + c]; }
  const cplx& operator()(int r, int c) const { return d_[r * 4 + c]; }

  CMat operator+(const CMat& o) const;
  CMat operator-(const CMat& o) const;
  CMat operator*(const CMat& o) const;
  CMat operator*(cplx s) const;
  CMat& operator+=(const CMat& o);
  CMat& operator-=(const CMat& o);
  /// this += s * o for a real s.
  CMat& add_scaled(const CMat& o, double s);
  CVec operator*(const CVec& v) const;

  CMat adjoint() const;
  cplx trace() const;
  cplx determinant() const;
  CMat inverse() const;  // throws DegenerateError when singular
  double max_abs() const;
  /// Real inner product Re tr(A^dagger B).
  double dot(const CMat& o) const;

 private:
  int n_ = 0;
  std::array<cplx, 16> d_{};
};

inline CMat operator*(cplx s, const CMat& m) { return m * s; }

/// psi^dagger M chi
cplx sandwich(const CVec& psi, const CMat& m, const CVec& chi);

/// exp(X) for a matrix whose square is a multiple of the identity.
CMat exp_quadratic(const CMat& x);

/// Principal logarithm of a matrix near the identity. Supports 2x2 matrices and
/// 4x4 matrices that are block diagonal in 2x2 blocks (the chiral layout).
/// Throws GroupError if the input is not of that shape or too far from the
/// identity for the principal branch.
CMat log_near_identity(const CMat& g);

// ---------------------------------------------------------------------------
// Antisymmetric index pairs (i<j) packed in lexicographic order

class PairIndex {
 public:
  explicit PairIndex(int d);
  int dimension() const { return d_; }
  int count() const { return static_cast<int>(pairs_.size()); }
  int index(int i, int j) const { return table_[i * 4 + j]; }  // -1 on diagonal
  std::pair<int, int> pair(int k) const { return pairs_[k]; }

 private:
  int d_;
  std::vector<std::pair<int, int>> pairs_;
  std::array<int, 16> table_{};
};

// ---------------------------------------------------------------------------
// Point-loop execution

struct Exec {
  int workers = 1;
};

/// Splits [0, n) into contiguous chunks, one per worker. The first exception in
/// chunk order is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, const Exec& exec, Fn&& fn) {
  const int w = exec.workers < 1 ? 1 : exec.workers;
  if (w == 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  const std::size_t chunk = (n + w - 1) / w;
  for (int k = 0; k < w; ++k) {
    const std::size_t b = std::min(n, k * chunk);
    const std::size_t e = std::min(n, b + chunk);
    threads.emplace_back([&, k, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace topo
