#include "topo/grid.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace topo {

Grid::Grid(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  const int d = dimension();
  if (d < 1 || d > 4) throw GridError("grid dimension must be between 1 and 4");
  size_ = 1;
  for (int a = d - 1; a >= 0; --a) {
    const AxisSpec& ax = axes_[a];
    if (ax.count < 2) throw GridError("axis " + std::to_string(a) + " needs at least 2 points");
    if (!(ax.upper > ax.lower)) throw GridError("axis " + std::to_string(a) + " has non-positive extent");
    h_[a] = (ax.upper - ax.lower) / static_cast<double>(ax.boundary == Boundary::periodic ? ax.count : ax.count - 1);
    stride_[a] = size_;
    size_ *= ax.count;
  }
}

std::size_t Grid::shift(std::size_t p, int a, int k) const {
  const auto n = static_cast<std::ptrdiff_t>(axes_[a].count);
  const auto i = static_cast<std::ptrdiff_t>(index_along(p, a));
  std::ptrdiff_t j = i + k;
  if (axes_[a].boundary == Boundary::periodic) j = ((j % n) + n) % n;
  return p + static_cast<std::size_t>(j - i) * stride_[a];
}

bool Grid::interior(std::size_t p, int margin) const {
  if (margin <= 0) return true;
  for (int a = 0; a < dimension(); ++a) {
    if (axes_[a].boundary == Boundary::periodic) continue;
    const std::size_t i = index_along(p, a);
    if (i < static_cast<std::size_t>(margin) || i + margin >= axes_[a].count) return false;
  }
  return true;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dimension(); ++a) v *= h_[a];
  return v;
}

Grid Grid::refined() const {
  std::vector<AxisSpec> ax = axes_;
  for (auto& x : ax) x.count = x.boundary == Boundary::periodic ? 2 * x.count : 2 * x.count - 1;
  return Grid(ax);
}

void Grid::require_stencil(int radius) const {
  for (int a = 0; a < dimension(); ++a)
    if (axes_[a].count < static_cast<std::size_t>(2 * radius + 1))
      throw GridError("axis " + std::to_string(a) + " has " + std::to_string(axes_[a].count) +
                      " points; the stencil needs at least " + std::to_string(2 * radius + 1));
}

bool Grid::operator==(const Grid& o) const {
  if (dimension() != o.dimension()) return false;
  for (int a = 0; a < dimension(); ++a)
    if (axes_[a].count != o.axes_[a].count || axes_[a].lower != o.axes_[a].lower ||
        axes_[a].upper != o.axes_[a].upper || axes_[a].boundary != o.axes_[a].boundary)
      return false;
  return true;
}

DiffScheme::DiffScheme(int o) : order(o) {
  if (o != 2 && o != 4) throw ValidationError("scheme order must be 2 or 4");
}

std::span<const double> DiffScheme::weights() const {
  static const double w2[] = {0.5};
  static const double w4[] = {2.0 / 3.0, -1.0 / 12.0};
  if (order == 2) return w2;
  return w4;
}

template <class T>
BasicField<T> partial_derivative(const BasicField<T>& f, int axis, const DiffScheme& s, const Exec& exec) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dimension()) throw GridError("axis " + std::to_string(axis) + " out of range");
  g.require_stencil(s.radius());
  BasicField<T> out(g, f.shape(), f.margin() + s.radius());
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) { derivative_at(f, p, axis, s, out.at(p)); });
  out.poison_invalid();
  return out;
}

template <class T>
BasicField<T> gradient(const BasicField<T>& f, const DiffScheme& s, const Exec& exec) {
  const Grid& g = f.grid();
  g.require_stencil(s.radius());
  const int d = g.dimension();
  auto shape = f.shape();
  shape.push_back(d);
  BasicField<T> out(g, shape, f.margin() + s.radius());
  const std::size_t n = f.components();
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    std::vector<T> buf(n);
    auto dst = out.at(p);
    for (int a = 0; a < d; ++a) {
      derivative_at(f, p, a, s, std::span<T>(buf));
      for (std::size_t c = 0; c < n; ++c) dst[c * d + a] = buf[c];
    }
  });
  out.poison_invalid();
  return out;
}

template Field partial_derivative(const Field&, int, const DiffScheme&, const Exec&);
template ComplexField partial_derivative(const ComplexField&, int, const DiffScheme&, const Exec&);
template Field gradient(const Field&, const DiffScheme&, const Exec&);
template ComplexField gradient(const ComplexField&, const DiffScheme&, const Exec&);

double metric_determinant(std::span<const double> g, int d) {
  CMat m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g[i * d + j];
  return std::abs(m.determinant().real());
}

namespace {
std::string point_label(const Grid& g, std::size_t p) {
  std::ostringstream os;
  os << "point " << p << " (";
  for (int a = 0; a < g.dimension(); ++a) os << (a ? ", " : "") << g.coordinate(p, a);
  os << ")";
  return os.str();
}

double checked_sqrt_det(const Field& metric, std::size_t p) {
  const double det = metric_determinant(metric.at(p), metric.grid().dimension());
  if (det < 1e-12) throw DegenerateError("degenerate metric at " + point_label(metric.grid(), p));
  return std::sqrt(det);
}
}  // namespace

Field covariant_divergence(const Field& v, const Field& metric, const DiffScheme& s, const Exec& exec) {
  const Grid& g = v.grid();
  const int d = g.dimension();
  if (v.components() != static_cast<std::size_t>(d)) throw ValidationError("covariant_divergence expects a vector field");
  g.require_stencil(s.radius());
  const int m_in = std::max(v.margin(), metric.margin());
  Field dens(g, {d}, m_in);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!dens.valid(p)) continue;
    const double sg = checked_sqrt_det(metric, p);
    for (int a = 0; a < d; ++a) dens(p, a) = sg * v(p, a);
  }
  Field out(g, {}, m_in + s.radius());
  for_each_valid(g, out.margin(), exec, [&](std::size_t p) {
    double acc = 0;
    double buf[4];
    for (int a = 0; a < d; ++a) {
      derivative_at(dens, p, a, s, std::span<double>(buf, d));
      acc += buf[a];
    }
    out(p, 0) = acc / checked_sqrt_det(metric, p);
  });
  out.poison_invalid();
  return out;
}

double integrate(const Field& f, const Field& metric) {
  if (f.components() != 1) throw ValidationError("integrate expects a scalar field");
  const Grid& g = f.grid();
  const int margin = std::max(f.margin(), metric.margin());
  double sum = 0;
  for (std::size_t p = 0; p < g.size(); ++p)
    if (g.interior(p, margin)) sum += f(p, 0) * checked_sqrt_det(metric, p);
  return sum * g.cell_volume();
}

bool Box::contains(const Grid& g, std::size_t p) const {
  for (int a = 0; a < g.dimension(); ++a) {
    const double x = g.coordinate(p, a);
    const double tol = 1e-9 * g.spacing(a);
    if (x < range[a][0] - tol || x > range[a][1] + tol) return false;
  }
  return true;
}

Box valid_box(const Grid& g, int margin) {
  Box b;
  for (int a = 0; a < g.dimension(); ++a) {
    const auto& ax = g.axis(a);
    if (ax.boundary == Boundary::periodic) {
      b.range.push_back({ax.lower, ax.upper});
    } else {
      b.range.push_back({ax.lower + margin * g.spacing(a), ax.upper - margin * g.spacing(a)});
    }
  }
  return b;
}

ResidualStats statistics(const Field& f, const std::optional<Box>& box) {
  ResidualStats st;
  double sq = 0;
  const Grid& g = f.grid();
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!f.valid(p)) continue;
    if (box && !box->contains(g, p)) continue;
    for (std::size_t c = 0; c < f.components(); ++c) {
      const double r = std::abs(f(p, c));
      if (std::isnan(r)) {
        st.linf = std::numeric_limits<double>::infinity();
        continue;
      }
      st.linf = std::max(st.linf, r);
      sq += r * r;
      ++st.count;
    }
  }
  st.l2 = st.count ? std::sqrt(sq / static_cast<double>(st.count)) : 0.0;
  return st;
}

template <class T>
Field pointwise_norm(const BasicField<T>& f) {
  Field out(f.grid(), {}, f.margin());
  for (std::size_t p = 0; p < f.grid().size(); ++p) {
    double m = 0;
    for (const T& x : f.at(p)) m = std::max(m, static_cast<double>(std::abs(x)));
    out(p, 0) = m;
  }
  out.poison_invalid();
  return out;
}
template Field pointwise_norm(const Field&);
template Field pointwise_norm(const ComplexField&);

// ---------------------------------------------------------------------------

namespace {

template <class T>
void csv_impl(const BasicField<T>& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  const Grid& g = f.grid();
  os << std::setprecision(17);
  for (int a = 0; a < g.dimension(); ++a) os << (a ? "," : "") << "x" << a;
  for (std::size_t c = 0; c < f.components(); ++c) {
    if constexpr (std::is_same_v<T, cplx>)
      os << ",re" << c << ",im" << c;
    else
      os << ",c" << c;
  }
  os << "\n";
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!f.valid(p)) continue;
    for (int a = 0; a < g.dimension(); ++a) os << (a ? "," : "") << g.coordinate(p, a);
    for (const T& x : f.at(p)) {
      if constexpr (std::is_same_v<T, cplx>)
        os << "," << x.real() << "," << x.imag();
      else
        os << "," << x;
    }
    os << "\n";
  }
}

template <class U>
void put(std::ofstream& os, U v) {
  static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof(U));
}
template <class U>
U get(std::ifstream& is) {
  U v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(U));
  if (!is) throw Error("truncated binary field file");
  return v;
}

template <class T>
void binary_impl(const BasicField<T>& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  const Grid& g = f.grid();
  os.write("TOPOFLD1", 8);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dimension()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.shape().size()));
  put<std::uint32_t>(os, std::is_same_v<T, cplx> ? 1u : 0u);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.margin()));
  for (int a = 0; a < g.dimension(); ++a) {
    put<std::uint64_t>(os, g.count(a));
    put<double>(os, g.axis(a).lower);
    put<double>(os, g.spacing(a));
    put<std::uint32_t>(os, g.boundary(a) == Boundary::open ? 1u : 0u);
  }
  for (int s : f.shape()) put<std::uint32_t>(os, static_cast<std::uint32_t>(s));
  for (const T& x : f.values()) {
    if constexpr (std::is_same_v<T, cplx>) {
      put<double>(os, x.real());
      put<double>(os, x.imag());
    } else {
      put<double>(os, x);
    }
  }
}

}  // namespace

void write_csv(const Field& f, const std::string& path) { csv_impl(f, path); }
void write_csv(const ComplexField& f, const std::string& path) { csv_impl(f, path); }
void write_binary(const Field& f, const std::string& path) { binary_impl(f, path); }
void write_binary(const ComplexField& f, const std::string& path) { binary_impl(f, path); }

Field read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "TOPOFLD1", 8) != 0) throw Error(path + ": not a field dump");
  const auto d = get<std::uint32_t>(is);
  const auto rank = get<std::uint32_t>(is);
  const auto is_complex = get<std::uint32_t>(is);
  const auto margin = get<std::uint32_t>(is);
  if (is_complex) throw Error(path + ": complex dumps are not supported by read_binary");
  std::vector<AxisSpec> axes;
  for (std::uint32_t a = 0; a < d; ++a) {
    AxisSpec ax;
    ax.count = get<std::uint64_t>(is);
    ax.lower = get<double>(is);
    const double h = get<double>(is);
    ax.boundary = get<std::uint32_t>(is) ? Boundary::open : Boundary::periodic;
    ax.upper = ax.lower + h * static_cast<double>(ax.boundary == Boundary::periodic ? ax.count : ax.count - 1);
    axes.push_back(ax);
  }
  std::vector<int> shape;
  for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(static_cast<int>(get<std::uint32_t>(is)));
  Field f(Grid(axes), shape, static_cast<int>(margin));
  for (auto& x : f.values()) x = get<double>(is);
  return f;
}

}  // namespace topo
