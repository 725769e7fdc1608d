#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "topo/expr.hpp"

using namespace topo;

namespace {

const std::vector<std::string> kVars{"x", "y", "t"};

double eval(const std::string& s, std::vector<double> v = {0, 0, 0}) { return parse_expression(s, kVars).evaluate(v); }

std::size_t error_offset(const std::string& s) {
  try {
    parse_expression(s, kVars);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a parse error for '" << s << "'");
  return 0;
}

}  // namespace

TEST_CASE("evaluation") {
  const double pi = std::numbers::pi;
  CHECK(eval("1 + 2*3") == 7);
  CHECK(eval("(1 + 2)*3") == 9);
  CHECK(eval("2^3^2") == 512);
  CHECK(eval("-2^2") == -4);
  CHECK(eval("2^-1") == 0.5);
  CHECK(eval("8/2/2") == 2);
  CHECK(eval("1 - 2 - 3") == -4);
  CHECK(eval("--3") == 3);
  CHECK(eval("2*sin(x)^2", {pi / 2, 0, 0}) == doctest::Approx(2));
  CHECK(eval("atan2(1, 1)") == doctest::Approx(pi / 4));
  CHECK(eval("pi") == doctest::Approx(pi));
  CHECK(eval("exp(ln(2.5))") == doctest::Approx(2.5));
  CHECK(eval("sqrt(x*x + y*y)", {3, 4, 0}) == doctest::Approx(5));
  CHECK(eval("cosh(t)^2 - sinh(t)^2", {0, 0, 0.7}) == doctest::Approx(1));
  CHECK(eval("tan(x) - sin(x)/cos(x)", {0.3, 0, 0}) == doctest::Approx(0).epsilon(1e-15));
  CHECK(eval("tanh(0)") == 0);
  CHECK(eval("1.5e2 + .5") == 150.5);
  CHECK(eval("x*y - t", {2, 3, 1}) == 5);
}

TEST_CASE("constants resolve at parse time") {
  const Expression e = parse_expression("m*t/q", {"t"}, {{"m", 2.0}, {"q", 4.0}});
  CHECK(e.evaluate(std::vector<double>{3}) == 1.5);
  CHECK(parse_expression("k + 1", {}, {{"k", 1}}).is_constant());
  CHECK_FALSE(parse_expression("x", kVars).is_constant());
}

TEST_CASE("printing round-trips") {
  for (const char* s : {"1 + 2*3", "(1 + 2)*3", "2^3^2", "(2^3)^2", "-x^2", "(-x)^2", "x - (y - t)", "x/(y*t)",
                        "sin(x)*cos(y + t)", "atan2(y, x)", "0.1*sin(x + z_unused)", "2*pi*x", "1e-3*x"}) {
    CAPTURE(s);
    std::vector<std::string> vars = kVars;
    vars.push_back("z_unused");
    const Expression e = parse_expression(s, vars);
    const Expression back = parse_expression(e.print(), vars);
    CHECK(e == back);
    CHECK(back.print() == e.print());
  }
  CHECK(parse_expression("((x))", kVars).print() == "x");
  CHECK(parse_expression("x - (y - t)", kVars).print() == "x - (y - t)");
  CHECK(parse_expression("(x - y) - t", kVars).print() == "x - y - t");
}

TEST_CASE("error positions") {
  CHECK(error_offset("1 +") == 3);
  CHECK(error_offset("") == 0);
  CHECK(error_offset("(1 + 2") == 6);
  CHECK(error_offset("1 + * 2") == 4);
  CHECK(error_offset("foo + 1") == 0);
  CHECK(error_offset("x + bar(1)") == 4);
  CHECK(error_offset("sin()") == 4);
  CHECK(error_offset("atan2(1)") == 0);
  CHECK(error_offset("sin(1, 2)") == 0);
  CHECK(error_offset("1 2") == 2);
  CHECK(error_offset("x $ y") == 2);
  CHECK(error_offset("2^") == 2);
  CHECK(error_offset("1e") == 2);
  CHECK(error_offset("2.5e+") == 5);
  CHECK(error_offset("1e999") == 0);
  CHECK(error_offset(")") == 0);
}

TEST_CASE("error messages carry the offset") {
  try {
    parse_expression("1 +", kVars);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("offset 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_expression("q", kVars), ValidationError);
}
