#pragma once

#include <json.hpp>

#include "vapordet/design.hpp"

namespace vapordet {

struct EfficiencyBudget {
  double loss_scatter = 0.0;       // photon Raman-scattered instead of absorbed
  double loss_transmission = 0.0;  // photon leaves the cell unabsorbed
  double loss_collision = 0.0;     // excited atom collisionally quenched before readout
  double eta = 0.0;
  bool clamped = false;  // losses summed past the [0,1] range
};

struct NetDarkCount {
  double linear = 0.0;  // N * P_dc
  double exact = 0.0;   // 1 - (1 - P_dc)^N
};

// Closed-form detector model. All functions take SI designs and return SI.

/// sqrt(M / (3 k_B T)) / (n sigma)
double collision_time(const DetectorDesign& d);

/// detuning^2 / (lambda_ph^2 n omega_e^2 T_p A_31). Infinite when omega_e = 0.
double absorption_length(const DetectorDesign& d);

/// (2 omega_r^2 + A_24^2) / (A_24 omega_r^2 eta_det)
double readout_time(const DetectorDesign& d);

/// 2 mu_B B / (3 h) under the ordinary convention, 2 mu_B B / (3 hbar)
/// under the angular one (selected by d.convention).
double zeeman_detuning(const DetectorDesign& d);
double zeeman_detuning(const DetectorDesign& d, FrequencyConvention c);

/// t_ro A_24 omega_r^2 / (6 (delta^2 + omega_r^2 / 3))
double dark_count_prob(const DetectorDesign& d);

/// Atoms in the beam volume, n * A * l_cell, rounded.
double atom_count(const DetectorDesign& d);

NetDarkCount net_dark_count(double atoms, double p_dc);
NetDarkCount net_dark_count(const DetectorDesign& d);

/// (T_p A_31 omega_e^2 / (16 detuning^2))^2
double scatter_loss(const DetectorDesign& d);

EfficiencyBudget efficiency_budget(const DetectorDesign& d);

/// Everything cmd_budget reports, evaluated once.
struct BudgetReport {
  EfficiencyBudget budget;
  double atom_count = 0.0;
  double tau_col = 0.0;
  double l_abs = 0.0;
  double t_ro = 0.0;
  double zeeman_detuning = 0.0;
  double p_dc = 0.0;
  NetDarkCount net_dark;
  bool far_detuned = true;
};

BudgetReport budget_report(const DetectorDesign& d);

nlohmann::json to_json(const EfficiencyBudget& b);
nlohmann::json to_json(const BudgetReport& r);

}  // namespace vapordet
