#include "vapordet/detector_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vapordet/constants.hpp"
#include "vapordet/error.hpp"

namespace vapordet {

double collision_time(const DetectorDesign& d) {
  if (!(d.temperature > 0.0)) throw DomainError("collision_time: temperature must be positive");
  if (!(d.n_density > 0.0)) throw DomainError("collision_time: n_density must be positive");
  const double thermal = std::sqrt(d.species.mass / (3.0 * PhysicalConstants::k_B * d.temperature));
  return thermal / (d.n_density * d.species.sigma_col);
}

double absorption_length(const DetectorDesign& d) {
  if (!(d.species.A_31 > 0.0)) throw DomainError("absorption_length: A_31 must be positive");
  const double denom = d.photon_wavelength * d.photon_wavelength * d.n_density * d.omega_e *
                       d.omega_e * d.pulse_duration * d.species.A_31;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return d.detuning * d.detuning / denom;
}

double readout_time(const DetectorDesign& d) {
  if (!(d.eta_det > 0.0)) throw DomainError("readout_time: eta_det must be positive");
  if (!(d.omega_r > 0.0)) throw DomainError("readout_time: omega_r must be positive");
  const double A = d.species.A_24;
  const double wr2 = d.omega_r * d.omega_r;
  return (2.0 * wr2 + A * A) / (A * wr2 * d.eta_det);
}

double zeeman_detuning(const DetectorDesign& d, FrequencyConvention c) {
  const double planck = c == FrequencyConvention::angular ? PhysicalConstants::hbar
                                                           : PhysicalConstants::h;
  return 2.0 * PhysicalConstants::mu_B * d.B_field / (3.0 * planck);
}

double zeeman_detuning(const DetectorDesign& d) { return zeeman_detuning(d, d.convention); }

double dark_count_prob(const DetectorDesign& d) {
  const double delta = zeeman_detuning(d);
  const double wr2 = d.omega_r * d.omega_r;
  return readout_time(d) * d.species.A_24 * wr2 / (6.0 * (delta * delta + wr2 / 3.0));
}

double atom_count(const DetectorDesign& d) {
  return std::round(d.n_density * d.beam_area * d.cell_length);
}

NetDarkCount net_dark_count(double atoms, double p_dc) {
  NetDarkCount out;
  out.linear = atoms * p_dc;
  // 1 - (1-p)^N without cancellation for small p
  out.exact = -std::expm1(atoms * std::log1p(-p_dc));
  return out;
}

NetDarkCount net_dark_count(const DetectorDesign& d) {
  return net_dark_count(atom_count(d), dark_count_prob(d));
}

double scatter_loss(const DetectorDesign& d) {
  const double x = d.pulse_duration * d.species.A_31 * d.omega_e * d.omega_e /
                   (16.0 * d.detuning * d.detuning);
  return x * x;
}

EfficiencyBudget efficiency_budget(const DetectorDesign& d) {
  EfficiencyBudget b;
  b.loss_scatter = scatter_loss(d);
  b.loss_transmission = std::exp(-static_cast<double>(d.passes) * d.cell_length /
                                 absorption_length(d));
  b.loss_collision = readout_time(d) / (2.0 * collision_time(d));
  const double raw = 1.0 - b.loss_scatter - b.loss_transmission - b.loss_collision;
  b.clamped = raw < 0.0 || raw > 1.0;
  b.eta = d.eta_up * std::clamp(raw, 0.0, 1.0);
  return b;
}

BudgetReport budget_report(const DetectorDesign& d) {
  BudgetReport r;
  r.budget = efficiency_budget(d);
  r.atom_count = atom_count(d);
  r.tau_col = collision_time(d);
  r.l_abs = absorption_length(d);
  r.t_ro = readout_time(d);
  r.zeeman_detuning = zeeman_detuning(d);
  r.p_dc = dark_count_prob(d);
  r.net_dark = net_dark_count(r.atom_count, r.p_dc);
  r.far_detuned = far_detuned(d);
  return r;
}

nlohmann::json to_json(const EfficiencyBudget& b) {
  return {{"loss_scatter", b.loss_scatter},
          {"loss_transmission", b.loss_transmission},
          {"loss_collision", b.loss_collision},
          {"eta", b.eta},
          {"clamped", b.clamped}};
}

nlohmann::json to_json(const BudgetReport& r) {
  nlohmann::json l_abs = std::isfinite(r.l_abs) ? nlohmann::json(r.l_abs) : nlohmann::json(nullptr);
  return {{"budget", to_json(r.budget)},
          {"atom_count", r.atom_count},
          {"tau_col_s", r.tau_col},
          {"l_abs_m", l_abs},
          {"t_ro_s", r.t_ro},
          {"zeeman_detuning_per_s", r.zeeman_detuning},
          {"p_dc", r.p_dc},
          {"net_dark_count", {{"linear", r.net_dark.linear}, {"exact", r.net_dark.exact}}},
          {"validity", {{"far_detuned", r.far_detuned}, {"clamped", r.budget.clamped}}}};
}

}  // namespace vapordet
