#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vapordet/design.hpp"

namespace vapordet {

/// Per-stage probabilities of the readout chain for one exposure.
struct ReadoutChain {
  double p_absorb = 1.0;    // photon absorbed by some atom
  double p_survive = 1.0;   // excited atom not quenched before readout
  double p_register = 1.0;  // excited atom yields >= 1 detected photon
  double p_dark = 0.0;      // ground atom yields a dark count
  std::uint64_t atoms = 0;  // atoms in the interaction volume

  double per_photon() const { return p_absorb * p_survive * p_register; }
};

struct ReadoutScenario {
  DetectorDesign design;
  int n_photons_true = 0;
  double readout_duration = 0.0;  // s
  std::uint64_t trials = 1;
  std::uint64_t rng_seed = 0;
};

/// True when n_photons_true > atom_count / 10: the one-photon-per-atom
/// picture starts to break down.
bool photon_count_flagged(const ReadoutScenario& s);

/// Chain implied by the design: absorption 1 - loss_scatter - loss_transmission,
/// survival exp(-D / (2 tau_col)), registration 1 - exp(-D / t_ro), and dark
/// probability min(1, P_dc D / t_ro). Throws DomainError for D <= 0.
ReadoutChain readout_chain(const DetectorDesign& d, double readout_duration);

struct TrialOutcome {
  int n_absorbed = 0;
  int n_atoms_detected = 0;
  int n_dark_atoms = 0;
  int inferred_n = 0;

  bool operator==(const TrialOutcome&) const = default;
};

/// Each trial draws from its own generator seeded by (rng_seed, trial index),
/// so results do not depend on evaluation order.
std::vector<TrialOutcome> run_trials(const ReadoutChain& chain, int n_photons_true,
                                     std::uint64_t trials, std::uint64_t rng_seed);
std::vector<TrialOutcome> run_trials(const ReadoutScenario& scenario);

struct DiscriminationReport {
  int n_min = 0;
  int n_max = 0;
  int m_max = 0;                                // inferred values 0..m_max tabulated
  std::vector<std::vector<double>> confusion;  // [n - n_min][m]
  std::vector<std::vector<double>> std_error;  // binomial standard error per cell
  std::vector<double> error_n_vs_n1;           // size n_max - n_min
  std::vector<double> error_std;               // standard error of error_n_vs_n1
  std::uint64_t trials = 0;
  std::uint64_t rng_seed = 0;
};

/// Confusion matrix P(inferred = m | true = n) for n in [n_min, n_max], with
/// the equal-prior maximum-likelihood error between n and n+1 (ties decided
/// for the smaller n). Seeds per row are derived from rng_seed and n.
DiscriminationReport discrimination_report(const ReadoutChain& chain, int n_min, int n_max,
                                           std::uint64_t trials, std::uint64_t rng_seed);
DiscriminationReport discrimination_report(const DetectorDesign& d, double readout_duration,
                                           int n_min, int n_max, std::uint64_t trials,
                                           std::uint64_t rng_seed);

/// ML error between two outcome distributions p(m|n), p(m|n+1).
double ml_pair_error(const std::vector<double>& lower, const std::vector<double>& upper);

struct FluorescenceCount {
  double expected_detected = 0.0;  // D / t_ro
  double scatter_rate = 0.0;       // A_24 omega_r^2 / (2 omega_r^2 + A_24^2), s^-1
};

FluorescenceCount fluorescence_photon_count(const DetectorDesign& d, double readout_duration);

struct TrialSummary {
  std::uint64_t trials = 0;
  double mean_absorbed = 0.0;
  double mean_detected = 0.0;
  double mean_dark = 0.0;
  double fraction_exact = 0.0;     // inferred_n == n_photons_true
  double fraction_any_dark = 0.0;  // >= 1 dark atom
  std::vector<std::uint64_t> histogram;  // counts of inferred_n
};

TrialSummary summarize(const std::vector<TrialOutcome>& outcomes, int n_photons_true);

nlohmann::json to_json(const ReadoutChain& c);
nlohmann::json to_json(const TrialSummary& s);
nlohmann::json to_json(const DiscriminationReport& r);
/// Rows n, columns m; each cell P(m|n).
std::string confusion_csv(const DiscriminationReport& r);

}  // namespace vapordet
