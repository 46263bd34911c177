#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace vapordet {

/// Physical data for the active atom. Four levels are modeled: ground
/// sublevels |1>, |2>, the absorption intermediate |3> and the cycling
/// upper level |4>. A_24 doubles as A_42 (same transition).
struct AtomicSpecies {
  std::string name;
  double mass = 0.0;       // kg
  double sigma_col = 0.0;  // m^2
  double A_31 = 0.0;       // s^-1, |3> -> |1> decay rate (also written A_13)
  double A_24 = 0.0;       // s^-1, |4> -> |2> decay rate
  double lambda_31 = 0.0;  // m
  double lambda_24 = 0.0;  // m

  bool operator==(const AtomicSpecies&) const = default;
};

/// Cesium with D1 as |1>-|3> and D2 as |2>-|4>. Lifetimes from Steck's
/// cesium D-line data (34.894 ns, 30.473 ns); cross-section is the generic
/// alkali figure 1e-14 cm^2.
AtomicSpecies cesium_preset();

/// Looks up a built-in preset by name (currently "cesium").
AtomicSpecies species_preset(std::string_view name);

AtomicSpecies species_from_json(const nlohmann::json& j);
nlohmann::json species_to_json(const AtomicSpecies& s);

}  // namespace vapordet
