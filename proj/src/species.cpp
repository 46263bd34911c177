#include "vapordet/species.hpp"

#include <cmath>

#include "vapordet/constants.hpp"
#include "vapordet/error.hpp"

namespace vapordet {

AtomicSpecies cesium_preset() {
  AtomicSpecies cs;
  cs.name = "cesium";
  cs.mass = 132.905451933 * PhysicalConstants::amu;
  cs.sigma_col = 1e-14 * units::cm2;
  cs.A_31 = 1.0 / 34.894e-9;  // 6P_1/2 lifetime
  cs.A_24 = 1.0 / 30.473e-9;  // 6P_3/2 lifetime
  cs.lambda_31 = 894.59295986e-9;
  cs.lambda_24 = 852.34727582e-9;
  return cs;
}

AtomicSpecies species_preset(std::string_view name) {
  if (name == "cesium" || name == "Cs") return cesium_preset();
  throw ConfigError("unknown species preset '" + std::string(name) + "'");
}

AtomicSpecies species_from_json(const nlohmann::json& j) {
  if (j.is_string()) return species_preset(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("species must be a preset name or an object");
  AtomicSpecies s;
  auto req = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
      throw ConfigError(std::string("species: missing numeric field '") + key + "'");
    const double v = j.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("species: '") + key + "' must be positive and finite");
    return v;
  };
  s.name = j.value("name", std::string("custom"));
  s.mass = req("mass");
  s.sigma_col = req("sigma_col");
  s.A_31 = req("A_31");
  s.A_24 = req("A_24");
  s.lambda_31 = req("lambda_31");
  s.lambda_24 = req("lambda_24");
  return s;
}

nlohmann::json species_to_json(const AtomicSpecies& s) {
  return {{"name", s.name},           {"mass", s.mass},
          {"sigma_col", s.sigma_col}, {"A_31", s.A_31},
          {"A_24", s.A_24},           {"lambda_31", s.lambda_31},
          {"lambda_24", s.lambda_24}};
}

}  // namespace vapordet
