#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vapordet/design.hpp"
#include "vapordet/ode.hpp"

// Single-atom absorption in the Markov limit:
//
//   d beta/dt = eps(t) phi(t) - (A_31 / 2) |eps(t)|^2 beta(t)
//
// eps(t) = conj(i Omega(t) / (2 detuning)) is evaluated in the frame rotating
// at the two-photon carrier omega_0, so the exp(-i omega_0 t) factor is carried
// by the photon drive phi(t) and drops out of both. With a real escort
// envelope eps = -i Omega / (2 detuning).

namespace vapordet {

using cplx = std::complex<double>;

struct PulseShape {
  enum class Kind { square, sampled };
  Kind kind = Kind::square;
  double duration = 0.0;       // s
  std::vector<cplx> samples;   // uniform grid over [0, duration], peak-scaled

  static PulseShape square(double duration);
  /// Throws DomainError unless duration > 0, >= 2 samples, all finite.
  static PulseShape sampled(double duration, std::vector<cplx> samples);

  /// Envelope at t; zero outside [0, duration], linear between samples.
  cplx operator()(double t) const;
  /// Times at which the envelope has a kink or jump.
  std::vector<double> breakpoints() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  cplx beta;
};

struct AbsorptionResult {
  cplx beta_final;
  double p_absorb = 0.0;   // |beta(T)|^2
  double p_scatter = 0.0;  // A_31 * integral |eps|^2 |beta|^2 dt
  std::vector<TrajectoryPoint> trajectory;
};

struct MarkovOptions {
  ode::Tolerance tol{};  // on beta divided by its magnitude bound, default 1e-10
  std::size_t trajectory_samples = 0;  // uniform samples over [0, t_end], 0 = none
};

/// Escort coupling eps(t) for the design's square escort of length T_p.
cplx escort_coupling(const DetectorDesign& d, double t);
/// Escort coupling for an arbitrary envelope scaled by omega_e.
cplx escort_coupling(const DetectorDesign& d, const PulseShape& escort, double t);

/// Amplitude damping rate kappa = (A_31 / 2) |eps|^2 during a square escort.
double markov_damping(const DetectorDesign& d);

/// Closed form for square escort and photon pulses of common length T_p and
/// a constant drive phi: beta(t) = (eps phi / kappa)(1 - exp(-kappa t)).
AbsorptionResult solve_markov_square(const DetectorDesign& d, cplx photon_drive,
                                     std::size_t trajectory_samples = 0);

/// General problem: escort envelope s(t) (Omega(t) = omega_e s(t)) and drive
/// phi(t), integrated over [0, t_end] with segments split at `breakpoints`.
struct MarkovProblem {
  std::function<cplx(double)> escort_envelope;
  std::function<cplx(double)> drive;
  double t_end = 0.0;
  std::vector<double> breakpoints;
};

AbsorptionResult solve_markov(const DetectorDesign& d, const MarkovProblem& problem,
                              const MarkovOptions& opts = {});

/// Numerical integration for sampled or square pulse shapes; the photon
/// envelope is scaled by `photon_drive`. Integrates to the later pulse end.
AbsorptionResult solve_markov_numeric(const DetectorDesign& d, const PulseShape& escort,
                                      const PulseShape& photon, cplx photon_drive,
                                      const MarkovOptions& opts = {});

/// Per-atom photon drive magnitude that makes N atoms over q passes absorb
/// with the bulk optical depth q l_cell / l_abs (weak per-atom limit):
/// |phi|^2 = 4 lambda_ph^2 A_31 / (T_p A). Independent of the escort.
double photon_drive(const DetectorDesign& d);

/// Drive that gives p_absorb = p under the closed form (square pulses).
double drive_for_absorption(const DetectorDesign& d, double p);

/// 1 - (1 - p_atom)^(N q) with p_atom from the closed form at photon_drive(d).
double aggregate_absorption(const DetectorDesign& d);

/// Compares the closed-form efficiency scatter term with the scattered
/// fraction f = p_scatter / (p_absorb + p_scatter) of the Markov solution.
/// In the weak limit f -> 2 kappa T_p / 3 while the budget term is
/// (kappa T_p / 2)^2, so f^2 / budget_term -> 16/9.
struct ScatterCrosscheck {
  double budget_term = 0.0;      // (T_p A_31 omega_e^2 / (16 detuning^2))^2
  double markov_fraction = 0.0;  // f
  double ratio = 0.0;            // f / budget_term
  double ratio_squared = 0.0;    // f^2 / budget_term
};
ScatterCrosscheck scatter_crosscheck(const DetectorDesign& d);

/// CSV with columns time_s, re_beta, im_beta, abs_beta_sq.
std::string trajectory_csv(const std::vector<TrajectoryPoint>& traj);

}  // namespace vapordet
