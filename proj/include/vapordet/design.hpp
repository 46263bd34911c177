#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vapordet/species.hpp"

namespace vapordet {

/// How a frequency quoted in Hz-like units maps onto the stored s^-1 value,
/// and whether the Zeeman shift uses h (ordinary) or hbar (angular).
enum class FrequencyConvention { ordinary, angular };

std::string_view to_string(FrequencyConvention c);
FrequencyConvention convention_from_string(std::string_view s);

/// One detector instance. All fields SI; rates and Rabi frequencies in s^-1.
struct DetectorDesign {
  AtomicSpecies species;
  double n_density = 0.0;          // m^-3
  double temperature = 0.0;        // K
  double cell_length = 0.0;        // m
  double beam_area = 0.0;          // m^2
  int passes = 1;                  // q
  double B_field = 0.0;            // T
  double pulse_duration = 0.0;     // s, photon and escort
  double omega_e = 0.0;            // s^-1, escort Rabi frequency
  double detuning = 0.0;           // s^-1, Raman detuning from |3>
  double photon_wavelength = 0.0;  // m
  double omega_r = 0.0;            // s^-1, readout Rabi frequency
  double eta_det = 1.0;            // imaging detection efficiency
  double eta_up = 1.0;             // upconversion pre-efficiency
  FrequencyConvention convention = FrequencyConvention::ordinary;

  bool operator==(const DetectorDesign&) const = default;
};

/// Worked cesium design: n = 1e9 cm^-3, T = 1 mK, T_p = 10 ns,
/// detuning 0.5 GHz, omega_e = A_31, 2 mm cell, 1e-2 mm^2 beam, 100 passes,
/// B = 1 T, omega_r = 0.01 A_24, eta_det = 1/8.
DetectorDesign worked_design(FrequencyConvention c = FrequencyConvention::ordinary);

struct Violation {
  std::string field;
  std::string message;
};

/// Empty iff every field is finite and inside its sanity range.
std::vector<Violation> validate_units(const DetectorDesign& d);

/// Far-detuning check for adiabatic elimination of |3>: detuning >= 10 omega_e.
bool far_detuned(const DetectorDesign& d);

/// Names accepted by get_field/set_field (the tunable scalar fields).
const std::vector<std::string>& design_field_names();
bool is_design_field(std::string_view name);
double get_field(const DetectorDesign& d, std::string_view name);
/// `passes` is rounded to the nearest integer.
void set_field(DetectorDesign& d, std::string_view name, double value);

/// Unit string for a design field, e.g. "m^-3".
std::string_view field_unit(std::string_view name);

/// Plain SI JSON (field names as in DetectorDesign).
nlohmann::json design_to_json(const DetectorDesign& d);

}  // namespace vapordet

namespace vapordet {

/// Reads a design document. Every field may be given in SI under its plain
/// name or in lab units under a suffixed name (n_density_cm3, temperature_mK,
/// cell_length_mm, beam_area_mm2, pulse_duration_ns, detuning_GHz,
/// detuning_MHz, photon_wavelength_nm, omega_e_per_A31, omega_r_per_A24).
/// "preset": "worked" starts from worked_design(); otherwise all fields are
/// required. "species" is a preset name or an AtomicSpecies object.
/// "frequency_convention" selects how detuning_GHz/MHz are converted.
DetectorDesign design_from_json(const nlohmann::json& j);

}  // namespace vapordet
