#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topo/algebra.hpp"
#include "topo/types.hpp"

namespace topo {

enum class Boundary { periodic, open };

struct AxisSpec {
  std::size_t count = 0;
  double lower = 0.0;
  double upper = 1.0;
  Boundary boundary = Boundary::periodic;
};

/// Structured grid, row-major with axis 0 slowest.
///   periodic axis: points lower + i*h, h = (upper - lower) / N
///   open axis:     points lower + i*h, h = (upper - lower) / (N - 1)
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<AxisSpec> axes);

  int dimension() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const AxisSpec& axis(int a) const { return axes_[a]; }
  const std::vector<AxisSpec>& axes() const { return axes_; }
  std::size_t count(int a) const { return axes_[a].count; }
  double spacing(int a) const { return h_[a]; }
  Boundary boundary(int a) const { return axes_[a].boundary; }
  std::size_t stride(int a) const { return stride_[a]; }

  std::size_t index_along(std::size_t p, int a) const { return (p / stride_[a]) % axes_[a].count; }
  double coordinate(std::size_t p, int a) const { return axes_[a].lower + static_cast<double>(index_along(p, a)) * h_[a]; }
  /// Neighbour at offset k along axis a (periodic wrap; the caller guarantees
  /// open-axis offsets stay in range).
  std::size_t shift(std::size_t p, int a, int k) const;
  /// True if p lies at least `margin` points away from every open boundary.
  bool interior(std::size_t p, int margin) const;
  double cell_volume() const;
  /// periodic N -> 2N, open N -> 2N - 1 (spacing halves in both cases).
  Grid refined() const;
  /// Throws GridError if any axis has fewer than 2*radius+1 points.
  void require_stencil(int radius) const;
  bool operator==(const Grid& o) const;

 private:
  std::vector<AxisSpec> axes_;
  std::array<double, 4> h_{};
  std::array<std::size_t, 4> stride_{};
  std::size_t size_ = 0;
};

/// Per-point component arrays with a row-major component shape. Points closer
/// than `margin` to an open boundary are invalid and hold NaN.
template <class T>
class BasicField {
 public:
  BasicField() = default;
  BasicField(Grid grid, std::vector<int> shape, int margin = 0)
      : grid_(std::move(grid)), shape_(std::move(shape)), margin_(margin) {
    ncomp_ = 1;
    for (int s : shape_) ncomp_ *= static_cast<std::size_t>(s);
    data_.assign(grid_.size() * ncomp_, T{});
  }

  const Grid& grid() const { return grid_; }
  const std::vector<int>& shape() const { return shape_; }
  std::size_t components() const { return ncomp_; }
  int margin() const { return margin_; }
  void set_margin(int m) { margin_ = m; }
  bool valid(std::size_t p) const { return grid_.interior(p, margin_); }

  std::span<T> at(std::size_t p) { return {data_.data() + p * ncomp_, ncomp_}; }
  std::span<const T> at(std::size_t p) const { return {data_.data() + p * ncomp_, ncomp_}; }
  T& operator()(std::size_t p, std::size_t c) { return data_[p * ncomp_ + c]; }
  const T& operator()(std::size_t p, std::size_t c) const { return data_[p * ncomp_ + c]; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  /// Fills every invalid point with NaN.
  void poison_invalid() {
    const T nan = nan_value();
    for (std::size_t p = 0; p < grid_.size(); ++p)
      if (!valid(p))
        for (std::size_t c = 0; c < ncomp_; ++c) data_[p * ncomp_ + c] = nan;
  }
  static T nan_value() {
    if constexpr (std::is_same_v<T, cplx>)
      return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    else
      return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  Grid grid_;
  std::vector<int> shape_;
  std::size_t ncomp_ = 0;
  int margin_ = 0;
  std::vector<T> data_;
};

using Field = BasicField<double>;
using ComplexField = BasicField<cplx>;

/// Central differences: f' = sum_k w_k (f[i+k] - f[i-k]) / h.
struct DiffScheme {
  int order = 2;
  DiffScheme() = default;
  explicit DiffScheme(int o);
  int radius() const { return order / 2; }
  std::span<const double> weights() const;
};

/// Runs fn(p) for every point that is valid at `margin`.
template <class Fn>
void for_each_valid(const Grid& g, int margin, const Exec& exec, Fn&& fn) {
  parallel_for(g.size(), exec, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p)
      if (g.interior(p, margin)) fn(p);
  });
}

/// Derivative of every component of f along `axis` at point p.
template <class T>
void derivative_at(const BasicField<T>& f, std::size_t p, int axis, const DiffScheme& s, std::span<T> out) {
  const Grid& g = f.grid();
  const auto w = s.weights();
  const double inv_h = 1.0 / g.spacing(axis);
  const std::size_t n = f.components();
  for (std::size_t c = 0; c < n; ++c) out[c] = T{};
  for (int k = 1; k <= s.radius(); ++k) {
    const auto fp = f.at(g.shift(p, axis, k));
    const auto fm = f.at(g.shift(p, axis, -k));
    const double wk = w[k - 1] * inv_h;
    for (std::size_t c = 0; c < n; ++c) out[c] += wk * (fp[c] - fm[c]);
  }
}

template <class T>
BasicField<T> partial_derivative(const BasicField<T>& f, int axis, const DiffScheme& s, const Exec& exec = {});

/// All partial derivatives; the result has shape f.shape() + [d] with the
/// derivative direction as the last index.
template <class T>
BasicField<T> gradient(const BasicField<T>& f, const DiffScheme& s, const Exec& exec = {});

/// (1/sqrt|g|) d_rho (sqrt|g| V^rho). V has shape [d], metric shape [d,d].
Field covariant_divergence(const Field& v, const Field& metric, const DiffScheme& s, const Exec& exec = {});

/// Sum over valid points of f * sqrt|g| * cell volume.
double integrate(const Field& f, const Field& metric);

/// Per-axis physical box [lo, hi] used to restrict statistics.
struct Box {
  std::vector<std::array<double, 2>> range;
  bool contains(const Grid& g, std::size_t p) const;
};

/// Box covered by the valid points of a grid at the given margin.
Box valid_box(const Grid& g, int margin);

/// L-infinity and RMS of a scalar field over its valid points (optionally
/// restricted to a box), reduced sequentially in point order.
ResidualStats statistics(const Field& f, const std::optional<Box>& box = std::nullopt);

/// Pointwise max-abs over components.
template <class T>
Field pointwise_norm(const BasicField<T>& f);

/// |det| of a d x d metric stored row-major.
double metric_determinant(std::span<const double> g, int d);

// Export -------------------------------------------------------------------

/// CSV: header "x0,...,x{d-1},c0,..." (complex fields write re/im pairs).
void write_csv(const Field& f, const std::string& path);
void write_csv(const ComplexField& f, const std::string& path);

/// Binary dump, little-endian:
///   char[8]  magic "TOPOFLD1"
///   u32 dimension, u32 rank, u32 is_complex, u32 margin
///   per axis: u64 count, f64 lower, f64 spacing, u32 boundary (0 periodic, 1 open)
///   rank x u32 component extents
///   values: f64 per real component (complex: re then im), point-major
void write_binary(const Field& f, const std::string& path);
void write_binary(const ComplexField& f, const std::string& path);
Field read_binary(const std::string& path);

}  // namespace topo
