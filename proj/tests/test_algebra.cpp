#include <doctest.h>

#include "support.hpp"
#include "topo/algebra.hpp"

using namespace topo;
using topo::testing::kAllConfigs;
using topo::testing::rep_of;

TEST_CASE("representation invariants hold in every configuration") {
  for (Config c : kAllConfigs) {
    CAPTURE(SignatureConfig::of(c).name);
    const CliffordRep rep = rep_of(c);
    const InvariantReport inv = check_invariants(rep);
    CHECK(inv.max() <= 1e-14);
    CHECK(rep.gamma.size() == static_cast<std::size_t>(rep.dimension()));
  }
}

TEST_CASE("triple products reduce") {
  for (Config c : kAllConfigs) {
    CAPTURE(SignatureConfig::of(c).name);
    const ResidualStats st = check_trilinear_identity(build_clifford(SignatureConfig::of(c)));
    CHECK(st.linf <= 1e-12);
    const int d = SignatureConfig::of(c).dimension;
    CHECK(st.count == static_cast<std::size_t>(d * d * d));
  }
}

TEST_CASE("parity matrix squares to one and anticommutes with gamma") {
  for (Config c : {Config::D4_13, Config::D2_11, Config::D2_02}) {
    const CliffordRep rep = rep_of(c);
    const CMat id = CMat::identity(rep.spinor_dim);
    CHECK((rep.pi() * rep.pi() - id).max_abs() <= 1e-14);
    for (const CMat& g : rep.gamma) CHECK((g * rep.pi() + rep.pi() * g).max_abs() <= 1e-14);
    const cplx k = parity_product_coefficient(rep);
    CHECK(std::abs(std::abs(k) - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(rep_of(Config::D3_EUC).pi(), ConfigurationError);
}

TEST_CASE("levi-civita symbol") {
  const Epsilon e4(4, -1);
  CHECK(e4.lower(0, 1, 2, 3) == 1);
  CHECK(e4.lower(1, 0, 2, 3) == -1);
  CHECK(e4.lower(0, 0, 2, 3) == 0);
  CHECK(e4.upper(0, 1, 2, 3) == -1);
  CHECK(e4.terms().size() == 24);
  const Epsilon e3(3, 1);
  CHECK(e3.lower(2, 0, 1) == 1);
  CHECK(e3.lower(2, 1, 0) == -1);
  CHECK(e3.upper(0, 1, 2) == 1);
  const Epsilon e2(2, -1);
  CHECK(e2.lower(0, 1) == 1);
  CHECK(e2.upper(0, 1) == -1);
  CHECK(e2.terms().size() == 2);
}

TEST_CASE("configuration lookup") {
  CHECK(SignatureConfig::from_name("D2_02").id == Config::D2_02);
  CHECK(SignatureConfig::of(Config::D4_13).eta_det() == -1);
  CHECK(SignatureConfig::of(Config::D2_11).lorentzian());
  CHECK_FALSE(SignatureConfig::of(Config::D3_EUC).lorentzian());
  CHECK_THROWS_AS(SignatureConfig::from_name("D5_14"), ConfigurationError);
}

TEST_CASE("sigma generators are antisymmetric and close on the algebra basis") {
  for (Config c : kAllConfigs) {
    const CliffordRep rep = rep_of(c);
    const int d = rep.dimension();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) CHECK((rep.sig(a, b) + rep.sig(b, a)).max_abs() <= 1e-15);
    const std::size_t expected = 1 + d * (d - 1) / 2;
    CHECK(rep.algebra_basis().size() == expected);
    CHECK(rep.algebra_gram_inverse().size() == expected * expected);
  }
}

TEST_CASE("hodge dual in four dimensions squares to minus one") {
  const CliffordRep rep = rep_of(Config::D4_13);
  std::vector<double> t(16, 0.0);
  double v = 0.3;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      t[a * 4 + b] = v;
      t[b * 4 + a] = -v;
      v += 0.7;
    }
  const auto m = hodge_dual_pair(rep, t);
  const auto mm = hodge_dual_pair(rep, m);
  for (int i = 0; i < 16; ++i) CHECK(mm[i] == doctest::Approx(-t[i]).epsilon(1e-14));
}

TEST_CASE("hodge dual in three dimensions inverts the epsilon contraction") {
  const CliffordRep rep = rep_of(Config::D3_EUC);
  const std::vector<double> t{0, 1.5, -0.2, -1.5, 0, 0.8, 0.2, -0.8, 0};
  const auto m = hodge_dual_pair(rep, t);
  REQUIRE(m.size() == 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0;
      for (int c = 0; c < 3; ++c) s += rep.epsilon.upper(a, b, c) * m[c];
      CHECK(s == doctest::Approx(t[a * 3 + b]));
    }
}

TEST_CASE("hodge dual rejects bad input") {
  const CliffordRep rep = rep_of(Config::D4_13);
  std::vector<double> t(16, 0.0);
  t[1] = 1.0;
  CHECK_THROWS_AS(hodge_dual_pair(rep, t), ValidationError);
  CHECK_THROWS_AS(hodge_dual_pair(rep, std::vector<double>(9, 0.0)), ValidationError);
  CHECK_THROWS_AS(hodge_dual_pair(rep_of(Config::D2_11), std::vector<double>(4, 0.0)), ValidationError);
}

TEST_CASE("small matrix helpers") {
  const CMat a = CMat::from_rows({1, 2, kI, 3});
  CHECK((a * a.inverse() - CMat::identity(2)).max_abs() < 1e-15);
  CHECK(a.determinant() == cplx(3, -2));
  CHECK_THROWS_AS(CMat::from_rows({1, 2, 2, 4}).inverse(), DegenerateError);
  const CMat x = CMat::from_rows({0, 0.4, -0.4, 0});  // x^2 = -0.16
  const CMat e = exp_quadratic(x);
  CHECK(e(0, 0).real() == doctest::Approx(std::cos(0.4)));
  CHECK(e(0, 1).real() == doctest::Approx(std::sin(0.4)));
  CHECK((log_near_identity(e) - x).max_abs() < 1e-14);
}

TEST_CASE("pair index packing") {
  const PairIndex p(4);
  CHECK(p.count() == 6);
  CHECK(p.index(0, 1) == 0);
  CHECK(p.index(2, 3) == 5);
  CHECK(p.index(1, 1) == -1);
  CHECK(p.pair(3) == std::pair{1, 2});
}
