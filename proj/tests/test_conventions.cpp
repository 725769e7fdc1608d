#include <doctest.h>

#include "topo/algebra.hpp"
#include "topo/manifest.hpp"

using namespace topo;

TEST_CASE("manifest content") {
  const nlohmann::json m = manifest();
  CHECK(m["epsilon"]["lower_01"] == 1);
  CHECK(m["configurations"].size() == 4);
  CHECK(m["configurations"]["D2_02"]["dirac_map"].is_object());
  CHECK(m["configurations"]["D4_13"]["spinor_dim"] == 4);
}

TEST_CASE("manifest hash is stable and self-consistent") {
  const nlohmann::json m = manifest();
  CHECK(manifest_hash() == manifest()["hash"]);
  CHECK(manifest_hash().size() == 64);
  nlohmann::json body = m;
  body.erase("hash");
  CHECK(sha256_hex(body.dump()) == m["hash"]);
}

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("recorded parity coefficients match the representation") {
  const nlohmann::json m = manifest();
  for (Config c : {Config::D4_13, Config::D2_11, Config::D2_02}) {
    const CliffordRep rep = build_clifford(SignatureConfig::of(c));
    const cplx k = parity_product_coefficient(rep);
    const auto& rec = m["configurations"][std::string(rep.config.name)]["pi"]["coefficient"];
    CHECK(rec[0].get<double>() == doctest::Approx(k.real()));
    CHECK(rec[1].get<double>() == doctest::Approx(k.imag()));
  }
  CHECK(m["configurations"]["D3_EUC"]["pi"].is_null());
}
