#include "topo/conventions.hpp"

#include <cmath>

#include <openssl/evp.h>

#include "topo/algebra.hpp"
#include "topo/manifest.hpp"

namespace topo {

namespace conventions {

DiracMap dirac_map(Config c) {
  switch (c) {
    case Config::D4_13: return {cplx(1, 0), cplx(1, 0)};
    case Config::D2_11: return {cplx(1, 0), cplx(1, 0)};
    case Config::D2_02: return {cplx(1, 0), cplx(0, -1)};
    case Config::D3_EUC: return {cplx(1, 0), cplx(1, 0)};
  }
  return {cplx(1, 0), cplx(1, 0)};
}

}  // namespace conventions

namespace {

nlohmann::json unit_complex(cplx z) {
  return nlohmann::json::array({std::lround(z.real()), std::lround(z.imag())});
}

nlohmann::json config_entry(Config c) {
  const CliffordRep rep = build_clifford(SignatureConfig::of(c));
  nlohmann::json e;
  e["dimension"] = rep.dimension();
  e["eta"] = std::vector<int>(rep.config.eta.begin(), rep.config.eta.begin() + rep.dimension());
  e["spinor_dim"] = rep.spinor_dim;
  e["adjoint_form"] = rep.config.lorentzian() ? "gamma^0" : "identity";
  if (rep.parity) {
    std::string prod;
    for (int a = 0; a < rep.dimension(); ++a) prod += "gamma^" + std::to_string(a) + (a + 1 < rep.dimension() ? " " : "");
    e["pi"] = {{"product", prod}, {"coefficient", unit_complex(parity_product_coefficient(rep))}};
  } else {
    e["pi"] = nullptr;
  }
  const auto map = conventions::dirac_map(c);
  e["dirac_map"] = {{"b", unit_complex(map.b)}, {"a", unit_complex(map.a)}};
  nlohmann::json ref = nlohmann::json::array();
  for (int i = 0; i < rep.spinor_dim; ++i) ref.push_back(unit_complex(rep.reference[i]));
  e["reference_spinor"] = ref;
  return e;
}

nlohmann::json manifest_body() {
  nlohmann::json m;
  m["version"] = 1;
  m["epsilon"] = {{"lower_01", conventions::kEpsilonLower},
                  {"upper", "eps^{..} = det(eta) eps_{..}"},
                  {"coordinate_density", "eps^{mu..} = det(eta) eps_{..} det(e^mu_a); eps_{mu..} = eps_{..} det(e^a_mu)"},
                  {"orientation", "+1 multiplies every epsilon"}};
  m["index_order"] = {{"frame", "e[a*d+mu] = e^a_mu"},
                      {"christoffel", "Lambda[(alpha*d+sigma)*d+mu] = Lambda^alpha_{sigma mu}"},
                      {"pairs", "i<j lexicographic"},
                      {"derivative", "component*d + mu"}};
  m["curvature"] = {{"riemann", "R_{ij mu nu} = d_mu C_{ij nu} - d_nu C_{ij mu} + C_{ik mu} C^k_{j nu} - C_{ik nu} C^k_{j mu}"},
                    {"ricci", "R_{bd} = R^a_{bad}, R = eta^{bd} R_{bd}"},
                    {"sphere_ricci_sign", conventions::kSphereRicciSign}};
  m["spinor_connection"] = "Omega_mu = sum_{i<j} C_{ij mu} sigma^{ij} + i q A_mu";
  m["gauge_transformation"] = "psi -> exp(-i q chi) psi, A -> A + d chi";
  m["degeneracy_threshold"] = conventions::kDegeneracyThreshold;
  m["parity_tolerance"] = conventions::kParityTolerance;
  m["calibration"] = {{"seed", conventions::kCalibrationSeed},
                      {"points", conventions::kCalibrationPoints},
                      {"scheme_order", 4},
                      {"spacing", 1e-3},
                      {"m", 1.3},
                      {"q", 0.7},
                      {"candidates", "{1,-1,i,-i}^2"}};
  nlohmann::json configs;
  for (Config c : {Config::D4_13, Config::D2_11, Config::D2_02, Config::D3_EUC})
    configs[std::string(SignatureConfig::of(c).name)] = config_entry(c);
  m["configurations"] = configs;
  return m;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

nlohmann::json manifest() {
  nlohmann::json m = manifest_body();
  m["hash"] = sha256_hex(m.dump());
  return m;
}

std::string manifest_hash() {
  static const std::string h = manifest()["hash"];
  return h;
}

}  // namespace topo
