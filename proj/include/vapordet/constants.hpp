#pragma once

#include <numbers>

namespace vapordet {

// CODATA 2018. SI throughout.
struct PhysicalConstants {
  static constexpr double k_B = 1.380649e-23;       // J/K (exact)
  static constexpr double h = 6.62607015e-34;       // J s (exact)
  static constexpr double hbar = h / (2.0 * std::numbers::pi);
  static constexpr double mu_B = 9.2740100783e-24;  // J/T
  static constexpr double eps_0 = 8.8541878128e-12; // F/m
  static constexpr double c = 299792458.0;          // m/s (exact)
  static constexpr double amu = 1.66053906660e-27;  // kg
};

namespace units {
inline constexpr double per_cm3 = 1e6;  // cm^-3 -> m^-3
inline constexpr double mm = 1e-3;
inline constexpr double mm2 = 1e-6;
inline constexpr double nm = 1e-9;
inline constexpr double ns = 1e-9;
inline constexpr double us = 1e-6;
inline constexpr double ms = 1e-3;
inline constexpr double mK = 1e-3;
inline constexpr double GHz = 1e9;
inline constexpr double MHz = 1e6;
inline constexpr double cm2 = 1e-4;
}  // namespace units

}  // namespace vapordet
