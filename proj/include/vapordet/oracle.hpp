#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vapordet/design.hpp"
#include "vapordet/dynamics.hpp"
#include "vapordet/ode.hpp"

// Brute-force evolution of the effective two-level Hamiltonian in the
// single-excitation sector: one photon spread over a comb of field modes, or
// one atom in |2>. Amplitudes follow
//
//   d alpha_l/dt = -sum_i f_li(t) beta_i exp(+i d_l t)
//   d beta_i/dt  =  sum_l conj(f_li(t)) alpha_l exp(-i d_l t)
//
// with d_l = omega_l - omega_0. The pair is anti-Hermitian as written, so the
// norm (equivalently the total excitation) is conserved exactly.

namespace vapordet {

/// Frequency comb of field modes and their mode functions at the atoms.
struct ModeGrid {
  std::size_t mode_count = 0;
  std::size_t atom_count = 0;
  double omega_0 = 0.0;                // rad/s, comb centre
  std::vector<double> offsets;         // rad/s, omega_l - omega_0, strictly increasing
  std::vector<cplx> mode_functions;    // Phi_l(r_i), row-major [mode][atom]
  std::vector<double> atom_z;          // m, positions along the beam
  double quantization_bandwidth = 0.0; // rad/s, mode_count * spacing

  double spacing() const { return quantization_bandwidth / static_cast<double>(mode_count); }
  cplx phi(std::size_t mode, std::size_t atom) const {
    return mode_functions[mode * atom_count + atom];
  }
};

/// Uniform comb of `modes` modes centred on omega_0 = 2 pi c / lambda_ph,
/// plane-wave phases exp(i omega_l z_i / c) with atoms placed uniformly in
/// the beam volume by a seeded RNG.
ModeGrid make_mode_grid(const DetectorDesign& d, std::size_t modes, std::size_t atoms,
                        double bandwidth, std::uint64_t seed);

struct AmplitudeState {
  std::vector<cplx> alpha;  // per mode
  std::vector<cplx> beta;   // per atom
  double time = 0.0;
};

/// f_li(t) = envelope(t) * f0_li, f0 = omega_e conj(g) / (2 detuning) and
/// g_li = G Phi_l(r_i). G folds sqrt(omega / (2 eps_0 hbar)) <3|d_z|1> into one
/// constant fixed by G^2 = A_31 * spacing / (2 pi), which makes the comb's
/// Markov decay rate equal (A_31 / 2) |eps|^2.
struct EffectiveCoupling {
  std::vector<cplx> f0;  // row-major [mode][atom], s^-1
  double omega_0 = 0.0;
  double g_scale = 0.0;  // G, s^-1/2 * (rad)^1/2
  PulseShape escort;
  std::size_t mode_count = 0;
  std::size_t atom_count = 0;

  cplx at(std::size_t mode, std::size_t atom, double t) const {
    return escort(t) * f0[mode * atom_count + atom];
  }
};

EffectiveCoupling build_coupling(const DetectorDesign& d, const ModeGrid& grid,
                                 const PulseShape& escort);

/// Sum |alpha|^2 + sum |beta|^2.
double total_excitation(const AmplitudeState& s);

/// Photon occupying a square wavepacket of the given duration arriving at
/// z = 0 at t = 0; all atoms in |1>.
AmplitudeState square_photon(const ModeGrid& grid, double duration);

struct OracleOptions {
  ode::Tolerance tol{1e-13, 1e-13};
  std::size_t samples = 101;        // trajectory samples including both ends
  double max_norm_drift = 1e-6;
};

/// Integrates from initial.time to t_final (> initial.time); returns the
/// sampled trajectory. Throws IntegrationError on norm drift.
std::vector<AmplitudeState> integrate_schrodinger(const ModeGrid& grid,
                                                  const EffectiveCoupling& coupling,
                                                  const AmplitudeState& initial, double t_final,
                                                  const OracleOptions& opts = {});

/// Propagates to any t_target, forwards or backwards; final state only.
AmplitudeState propagate(const ModeGrid& grid, const EffectiveCoupling& coupling,
                         const AmplitudeState& initial, double t_target,
                         const ode::Tolerance& tol = {1e-13, 1e-13});

/// Per-atom Markov solution driven by phi_i(t) = G sum_l alpha_l(0) Phi_l(r_i)
/// exp(-i d_l t), the incident field each atom sees.
std::vector<AbsorptionResult> markov_prediction(const DetectorDesign& d, const ModeGrid& grid,
                                                const EffectiveCoupling& coupling,
                                                const AmplitudeState& initial, double t_final,
                                                const MarkovOptions& opts = {});

struct DeskOptions {
  std::size_t modes = 64;
  std::size_t atoms = 8;
  double revival_factor = 4.0;  // comb revival period / pulse duration
  std::uint64_t seed = 1;
  OracleOptions oracle{};
};

struct MarkovComparison {
  double oracle_absorb = 0.0;     // sum_i |beta_i(T)|^2
  double markov_absorb = 0.0;     // sum_i p_absorb from the Markov solution
  double relative_difference = 0.0;
  double norm_drift = 0.0;        // max |norm - norm(0)| along the trajectory
  double excitation_drift = 0.0;  // max |total_excitation - initial|
  double kappa_T = 0.0;           // per-atom Markov damping * pulse duration
  std::vector<AmplitudeState> trajectory;
};

/// Desk-scale comparison: square photon and escort of length T_p, comb of
/// `modes` modes with spacing 2 pi / (revival_factor T_p).
MarkovComparison compare_with_markov(const DetectorDesign& d, const DeskOptions& opts = {});

/// CSV: time_s, alpha_sq_<l>..., beta_sq_<i>..., total_excitation.
std::string oracle_trajectory_csv(const std::vector<AmplitudeState>& traj);

}  // namespace vapordet
