#include "vapordet/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "vapordet/constants.hpp"
#include "vapordet/error.hpp"

namespace vapordet {

namespace {

struct FieldInfo {
  std::string_view name;
  std::string_view unit;
  double lo;
  double hi;
  bool lo_inclusive;
};

// Sanity ranges for validate_units.
constexpr std::array<FieldInfo, 13> kFields{{
    {"n_density", "m^-3", 0.0, 1e26, false},
    {"temperature", "K", 0.0, 1e4, false},
    {"cell_length", "m", 0.0, 100.0, false},
    {"beam_area", "m^2", 0.0, 1.0, false},
    {"passes", "1", 1.0, 1e7, true},
    {"B_field", "T", 0.0, 100.0, true},
    {"pulse_duration", "s", 0.0, 1.0, false},
    {"omega_e", "s^-1", 0.0, 1e16, true},
    {"detuning", "s^-1", 0.0, 1e17, false},
    {"photon_wavelength", "m", 1e-8, 1e-3, true},
    {"omega_r", "s^-1", 0.0, 1e16, false},
    {"eta_det", "1", 0.0, 1.0, false},
    {"eta_up", "1", 0.0, 1.0, false},
}};

const FieldInfo* find_field(std::string_view name) {
  for (const auto& f : kFields)
    if (f.name == name) return &f;
  return nullptr;
}

double frequency_scale(FrequencyConvention c) {
  return c == FrequencyConvention::angular ? 2.0 * std::numbers::pi : 1.0;
}

}  // namespace

std::string_view to_string(FrequencyConvention c) {
  return c == FrequencyConvention::angular ? "angular" : "ordinary";
}

FrequencyConvention convention_from_string(std::string_view s) {
  if (s == "ordinary") return FrequencyConvention::ordinary;
  if (s == "angular") return FrequencyConvention::angular;
  throw ConfigError("frequency_convention must be 'ordinary' or 'angular', got '" +
                    std::string(s) + "'");
}

DetectorDesign worked_design(FrequencyConvention c) {
  DetectorDesign d;
  d.species = cesium_preset();
  d.n_density = 1e9 * units::per_cm3;
  d.temperature = 1.0 * units::mK;
  d.cell_length = 2.0 * units::mm;
  d.beam_area = 1e-2 * units::mm2;
  d.passes = 100;
  d.B_field = 1.0;
  d.pulse_duration = 10.0 * units::ns;
  d.omega_e = d.species.A_31;
  d.detuning = 0.5 * units::GHz * frequency_scale(c);
  d.photon_wavelength = d.species.lambda_31;
  d.omega_r = 0.01 * d.species.A_24;
  d.eta_det = 1.0 / 8.0;
  d.eta_up = 1.0;
  d.convention = c;
  return d;
}

std::vector<Violation> validate_units(const DetectorDesign& d) {
  std::vector<Violation> out;
  for (const auto& f : kFields) {
    const double v = get_field(d, f.name);
    const bool above_lo = f.lo_inclusive ? v >= f.lo : v > f.lo;
    if (!std::isfinite(v) || !above_lo || v > f.hi) {
      out.push_back({std::string(f.name),
                     std::string(f.name) + " = " + std::to_string(v) + " " +
                         std::string(f.unit) + " outside " + (f.lo_inclusive ? "[" : "(") +
                         std::to_string(f.lo) + ", " + std::to_string(f.hi) + "]"});
    }
  }
  const auto& s = d.species;
  const std::array<std::pair<std::string_view, double>, 6> sp{{{"species.mass", s.mass},
                                                               {"species.sigma_col", s.sigma_col},
                                                               {"species.A_31", s.A_31},
                                                               {"species.A_24", s.A_24},
                                                               {"species.lambda_31", s.lambda_31},
                                                               {"species.lambda_24", s.lambda_24}}};
  for (const auto& [name, v] : sp) {
    if (!std::isfinite(v) || v <= 0.0)
      out.push_back({std::string(name), std::string(name) + " must be finite and positive"});
  }
  return out;
}

bool far_detuned(const DetectorDesign& d) { return d.detuning >= 10.0 * d.omega_e; }

const std::vector<std::string>& design_field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& f : kFields) v.emplace_back(f.name);
    return v;
  }();
  return names;
}

bool is_design_field(std::string_view name) { return find_field(name) != nullptr; }

std::string_view field_unit(std::string_view name) {
  const auto* f = find_field(name);
  if (!f) throw ConfigError("unknown design field '" + std::string(name) + "'");
  return f->unit;
}

double get_field(const DetectorDesign& d, std::string_view name) {
  if (name == "n_density") return d.n_density;
  if (name == "temperature") return d.temperature;
  if (name == "cell_length") return d.cell_length;
  if (name == "beam_area") return d.beam_area;
  if (name == "passes") return static_cast<double>(d.passes);
  if (name == "B_field") return d.B_field;
  if (name == "pulse_duration") return d.pulse_duration;
  if (name == "omega_e") return d.omega_e;
  if (name == "detuning") return d.detuning;
  if (name == "photon_wavelength") return d.photon_wavelength;
  if (name == "omega_r") return d.omega_r;
  if (name == "eta_det") return d.eta_det;
  if (name == "eta_up") return d.eta_up;
  throw ConfigError("unknown design field '" + std::string(name) + "'");
}

void set_field(DetectorDesign& d, std::string_view name, double value) {
  if (name == "n_density") d.n_density = value;
  else if (name == "temperature") d.temperature = value;
  else if (name == "cell_length") d.cell_length = value;
  else if (name == "beam_area") d.beam_area = value;
  else if (name == "passes") {
    if (!std::isfinite(value)) throw ConfigError("passes must be finite");
    d.passes = static_cast<int>(std::lround(std::clamp(value, -1e9, 1e9)));
  }
  else if (name == "B_field") d.B_field = value;
  else if (name == "pulse_duration") d.pulse_duration = value;
  else if (name == "omega_e") d.omega_e = value;
  else if (name == "detuning") d.detuning = value;
  else if (name == "photon_wavelength") d.photon_wavelength = value;
  else if (name == "omega_r") d.omega_r = value;
  else if (name == "eta_det") d.eta_det = value;
  else if (name == "eta_up") d.eta_up = value;
  else throw ConfigError("unknown design field '" + std::string(name) + "'");
}

nlohmann::json design_to_json(const DetectorDesign& d) {
  nlohmann::json j;
  j["species"] = species_to_json(d.species);
  for (const auto& f : kFields) {
    if (f.name == "passes")
      j["passes"] = d.passes;
    else
      j[std::string(f.name)] = get_field(d, f.name);
  }
  j["frequency_convention"] = std::string(to_string(d.convention));
  return j;
}

DetectorDesign design_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("design must be a JSON object");

  FrequencyConvention conv = FrequencyConvention::ordinary;
  if (j.contains("frequency_convention"))
    conv = convention_from_string(j.at("frequency_convention").get<std::string>());

  bool from_preset = false;
  DetectorDesign d;
  if (j.contains("preset")) {
    const auto p = j.at("preset").get<std::string>();
    if (p != "worked") throw ConfigError("unknown design preset '" + p + "'");
    d = worked_design(conv);
    from_preset = true;
  }
  d.convention = conv;
  if (j.contains("species")) {
    d.species = species_from_json(j.at("species"));
  } else if (!from_preset) {
    d.species = cesium_preset();
  }
  if (!from_preset) d.photon_wavelength = d.species.lambda_31;

  const double fscale = frequency_scale(conv);
  const double A31 = d.species.A_31;
  const double A24 = d.species.A_24;
  struct Alias {
    std::string_view key;
    std::string_view field;
    double scale;
  };
  const std::array<Alias, 25> aliases{{
      {"n_density", "n_density", 1.0},
      {"n_density_cm3", "n_density", units::per_cm3},
      {"temperature", "temperature", 1.0},
      {"temperature_mK", "temperature", units::mK},
      {"cell_length", "cell_length", 1.0},
      {"cell_length_mm", "cell_length", units::mm},
      {"beam_area", "beam_area", 1.0},
      {"beam_area_mm2", "beam_area", units::mm2},
      {"passes", "passes", 1.0},
      {"B_field", "B_field", 1.0},
      {"pulse_duration", "pulse_duration", 1.0},
      {"pulse_duration_ns", "pulse_duration", units::ns},
      {"omega_e", "omega_e", 1.0},
      {"omega_e_per_A31", "omega_e", A31},
      {"detuning", "detuning", 1.0},
      {"detuning_GHz", "detuning", units::GHz * fscale},
      {"detuning_MHz", "detuning", units::MHz * fscale},
      {"photon_wavelength", "photon_wavelength", 1.0},
      {"photon_wavelength_nm", "photon_wavelength", units::nm},
      {"omega_r", "omega_r", 1.0},
      {"omega_r_per_A24", "omega_r", A24},
      {"eta_det", "eta_det", 1.0},
      {"eta_up", "eta_up", 1.0},
      {"B_field_T", "B_field", 1.0},
      {"temperature_K", "temperature", 1.0},
  }};

  std::vector<std::string_view> seen;
  for (const auto& [key, value] : j.items()) {
    if (key == "preset" || key == "species" || key == "frequency_convention") continue;
    const Alias* a = nullptr;
    for (const auto& cand : aliases)
      if (cand.key == key) a = &cand;
    if (!a) throw ConfigError("design: unknown field '" + key + "'");
    if (!value.is_number())
      throw ConfigError("design: field '" + key + "' must be a number");
    if (std::find(seen.begin(), seen.end(), a->field) != seen.end())
      throw ConfigError("design: field '" + std::string(a->field) + "' given more than once");
    seen.push_back(a->field);
    set_field(d, a->field, value.get<double>() * a->scale);
  }

  if (!from_preset) {
    for (const auto& f : kFields) {
      if (f.name == "eta_up" || f.name == "photon_wavelength") continue;  // defaulted
      if (std::find(seen.begin(), seen.end(), f.name) == seen.end())
        throw ConfigError("design: missing field '" + std::string(f.name) + "'");
    }
  }
  return d;
}

}  // namespace vapordet
