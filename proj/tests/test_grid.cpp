#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "topo/grid.hpp"

using namespace topo;

namespace {

Grid periodic_line(std::size_t n) {
  return Grid({{n, 0.0, 2.0 * std::numbers::pi, Boundary::periodic}});
}

Field sample(const Grid& g, double (*f)(double)) {
  Field out(g, {});
  for (std::size_t p = 0; p < g.size(); ++p) out(p, 0) = f(g.coordinate(p, 0));
  return out;
}

double max_derivative_error(std::size_t n, int order) {
  const Grid g = periodic_line(n);
  const Field f = sample(g, [](double x) { return std::sin(x); });
  const Field df = partial_derivative(f, 0, DiffScheme(order));
  double e = 0;
  for (std::size_t p = 0; p < g.size(); ++p) e = std::max(e, std::abs(df(p, 0) - std::cos(g.coordinate(p, 0))));
  return e;
}

}  // namespace

TEST_CASE("grid layout") {
  const Grid g({{4, 0, 1, Boundary::periodic}, {5, 0, 1, Boundary::open}});
  CHECK(g.size() == 20);
  CHECK(g.spacing(0) == 0.25);
  CHECK(g.spacing(1) == 0.25);
  CHECK(g.stride(0) == 5);
  CHECK(g.stride(1) == 1);
  CHECK(g.index_along(7, 0) == 1);
  CHECK(g.index_along(7, 1) == 2);
  CHECK(g.shift(0, 0, -1) == 15);
  CHECK(g.interior(7, 1));
  CHECK_FALSE(g.interior(5, 1));
  CHECK(g.cell_volume() == doctest::Approx(0.0625));
}

TEST_CASE("refinement halves the spacing") {
  const Grid g({{8, 0, 1, Boundary::periodic}, {9, 0, 2, Boundary::open}});
  const Grid r = g.refined();
  CHECK(r.count(0) == 16);
  CHECK(r.count(1) == 17);
  CHECK(r.spacing(0) == doctest::Approx(g.spacing(0) / 2));
  CHECK(r.spacing(1) == doctest::Approx(g.spacing(1) / 2));
  CHECK_FALSE(r == g);
}

TEST_CASE("stencil size is checked") {
  CHECK_NOTHROW(Grid({{5, 0, 1, Boundary::open}}).require_stencil(2));
  CHECK_THROWS_AS(Grid({{4, 0, 1, Boundary::open}}).require_stencil(2), GridError);
  CHECK_THROWS_AS(DiffScheme(3), Error);
}

TEST_CASE("central differences converge at their order") {
  for (int order : {2, 4}) {
    const double r = std::log2(max_derivative_error(16, order) / max_derivative_error(32, order));
    CHECK(r == doctest::Approx(order).epsilon(0.05));
  }
}

TEST_CASE("gradient stacks the derivative index last") {
  const Grid g({{12, 0, 2 * std::numbers::pi, Boundary::periodic}, {12, 0, 2 * std::numbers::pi, Boundary::periodic}});
  Field f(g, {2});
  for (std::size_t p = 0; p < g.size(); ++p) {
    f(p, 0) = g.coordinate(p, 0);
    f(p, 1) = std::sin(g.coordinate(p, 1));
  }
  const Field grad = gradient(f, DiffScheme(2));
  CHECK(grad.shape() == std::vector<int>{2, 2});
  const std::size_t p = 5 * 12 + 3;
  CHECK(grad(p, 1) == doctest::Approx(0.0));
  CHECK(grad(p, 2) == doctest::Approx(0.0));
}

TEST_CASE("open boundaries poison the margin") {
  const Grid g({{7, 0, 1, Boundary::open}});
  Field f(g, {});
  for (std::size_t p = 0; p < g.size(); ++p) f(p, 0) = g.coordinate(p, 0) * g.coordinate(p, 0);
  const Field df = partial_derivative(f, 0, DiffScheme(2));
  CHECK(std::isnan(df(0, 0)));
  CHECK(df(3, 0) == doctest::Approx(1.0));
  const ResidualStats st = statistics(df);
  CHECK(st.count == 5);
}

TEST_CASE("statistics and integration") {
  const Grid g = periodic_line(64);
  const Field f = sample(g, [](double x) { return std::cos(x) * std::cos(x); });
  Field metric(g, {1, 1});
  for (std::size_t p = 0; p < g.size(); ++p) metric(p, 0) = 4.0;
  CHECK(integrate(f, metric) == doctest::Approx(2.0 * std::numbers::pi));
  const ResidualStats st = statistics(f);
  CHECK(st.linf == doctest::Approx(1.0));
  CHECK(st.l2 == doctest::Approx(std::sqrt(3.0 / 8.0)));
  Box box{{{{0.0, 1.0}}}};
  CHECK(statistics(f, box).count < st.count);
}

TEST_CASE("covariant divergence on a flat conformal metric") {
  const double L = 2 * std::numbers::pi;
  const Grid g({{32, 0, L, Boundary::periodic}, {32, 0, L, Boundary::periodic}});
  Field v(g, {2}), metric(g, {2, 2});
  for (std::size_t p = 0; p < g.size(); ++p) {
    v(p, 0) = std::sin(g.coordinate(p, 0));
    v(p, 1) = 0;
    metric(p, 0) = metric(p, 3) = 1.0;
  }
  const Field div = covariant_divergence(v, metric, DiffScheme(4));
  double e = 0;
  for (std::size_t p = 0; p < g.size(); ++p) e = std::max(e, std::abs(div(p, 0) - std::cos(g.coordinate(p, 0))));
  CHECK(e < 1e-4);
}

TEST_CASE("binary export round-trips") {
  const Grid g({{3, 0, 1, Boundary::open}, {4, -1, 1, Boundary::periodic}});
  Field f(g, {2}, 1);
  for (std::size_t p = 0; p < g.size(); ++p) {
    f(p, 0) = g.coordinate(p, 0);
    f(p, 1) = 0.5 * static_cast<double>(p);
  }
  const auto dir = std::filesystem::temp_directory_path() / "topo_grid_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "f.bin").string();
  write_binary(f, path);
  const Field back = read_binary(path);
  CHECK(back.grid() == g);
  CHECK(back.shape() == f.shape());
  CHECK(back.margin() == 1);
  CHECK(back.values() == f.values());
  write_csv(f, (dir / "f.csv").string());
  std::ifstream in(dir / "f.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "x0,x1,c0,c1");
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_binary((dir / "missing.bin").string()), Error);
}

TEST_CASE("parallel loops match the serial result") {
  const Grid g({{40, 0, 1, Boundary::periodic}, {40, 0, 1, Boundary::periodic}});
  Field f(g, {});
  for (std::size_t p = 0; p < g.size(); ++p) f(p, 0) = std::sin(3.0 * g.coordinate(p, 0) + g.coordinate(p, 1));
  const Field a = partial_derivative(f, 1, DiffScheme(4), Exec{1});
  const Field b = partial_derivative(f, 1, DiffScheme(4), Exec{4});
  CHECK(a.values() == b.values());
}
