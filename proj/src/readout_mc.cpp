#include "vapordet/readout_mc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "vapordet/detector_model.hpp"
#include "vapordet/error.hpp"

namespace vapordet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

int binomial(std::mt19937_64& rng, int n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<int> dist(n, p);
  return dist(rng);
}

void check_chain(const ReadoutChain& c) {
  for (double p : {c.p_absorb, c.p_survive, c.p_register, c.p_dark})
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("readout chain probabilities must lie in [0, 1]");
}

}  // namespace

bool photon_count_flagged(const ReadoutScenario& s) {
  return static_cast<double>(s.n_photons_true) > atom_count(s.design) / 10.0;
}

ReadoutChain readout_chain(const DetectorDesign& d, double readout_duration) {
  if (!(readout_duration > 0.0)) throw DomainError("readout_duration must be positive");
  const auto b = efficiency_budget(d);
  const double t_ro = readout_time(d);
  ReadoutChain c;
  c.p_absorb = std::clamp(d.eta_up * (1.0 - b.loss_scatter - b.loss_transmission), 0.0, 1.0);
  c.p_survive = std::exp(-readout_duration / (2.0 * collision_time(d)));
  c.p_register = -std::expm1(-readout_duration / t_ro);
  c.p_dark = std::min(1.0, dark_count_prob(d) * readout_duration / t_ro);
  c.atoms = static_cast<std::uint64_t>(atom_count(d));
  return c;
}

std::vector<TrialOutcome> run_trials(const ReadoutChain& chain, int n_photons_true,
                                     std::uint64_t trials, std::uint64_t rng_seed) {
  check_chain(chain);
  if (n_photons_true < 0) throw DomainError("n_photons_true must be non-negative");
  if (trials == 0) throw DomainError("trials must be at least 1");
  std::vector<TrialOutcome> out(trials);
  for (std::uint64_t k = 0; k < trials; ++k) {
    std::mt19937_64 rng(stream_seed(rng_seed, k));
    TrialOutcome& o = out[k];
    o.n_absorbed = binomial(rng, n_photons_true, chain.p_absorb);
    const int survivors = binomial(rng, o.n_absorbed, chain.p_survive);
    o.n_atoms_detected = binomial(rng, survivors, chain.p_register);
    const auto ground = chain.atoms > static_cast<std::uint64_t>(o.n_absorbed)
                            ? chain.atoms - static_cast<std::uint64_t>(o.n_absorbed)
                            : 0;
    o.n_dark_atoms = binomial(rng, static_cast<int>(ground), chain.p_dark);
    o.inferred_n = o.n_atoms_detected + o.n_dark_atoms;
  }
  return out;
}

std::vector<TrialOutcome> run_trials(const ReadoutScenario& s) {
  return run_trials(readout_chain(s.design, s.readout_duration), s.n_photons_true, s.trials,
                    s.rng_seed);
}

double ml_pair_error(const std::vector<double>& lower, const std::vector<double>& upper) {
  const std::size_t m = std::max(lower.size(), upper.size());
  double miss_lower = 0.0;  // true n, decided n+1
  double miss_upper = 0.0;  // true n+1, decided n
  for (std::size_t k = 0; k < m; ++k) {
    const double a = k < lower.size() ? lower[k] : 0.0;
    const double b = k < upper.size() ? upper[k] : 0.0;
    if (a >= b)
      miss_upper += b;
    else
      miss_lower += a;
  }
  return 0.5 * (miss_lower + miss_upper);
}

DiscriminationReport discrimination_report(const ReadoutChain& chain, int n_min, int n_max,
                                           std::uint64_t trials, std::uint64_t rng_seed) {
  if (n_min < 0 || n_max < n_min) throw DomainError("discrimination_report: empty or negative n range");
  DiscriminationReport r;
  r.n_min = n_min;
  r.n_max = n_max;
  r.trials = trials;
  r.rng_seed = rng_seed;

  std::vector<std::vector<TrialOutcome>> rows;
  int m_max = 0;
  for (int n = n_min; n <= n_max; ++n) {
    rows.push_back(run_trials(chain, n, trials, stream_seed(rng_seed, static_cast<std::uint64_t>(n))));
    for (const auto& o : rows.back()) m_max = std::max(m_max, o.inferred_n);
  }
  r.m_max = m_max;
  const double T = static_cast<double>(trials);
  for (const auto& row : rows) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(m_max) + 1, 0);
    for (const auto& o : row) ++counts[static_cast<std::size_t>(o.inferred_n)];
    std::vector<double> p(counts.size()), se(counts.size());
    for (std::size_t m = 0; m < counts.size(); ++m) {
      p[m] = static_cast<double>(counts[m]) / T;
      se[m] = std::sqrt(p[m] * (1.0 - p[m]) / T);
    }
    r.confusion.push_back(std::move(p));
    r.std_error.push_back(std::move(se));
  }
  for (std::size_t k = 0; k + 1 < r.confusion.size(); ++k) {
    const auto& lo = r.confusion[k];
    const auto& hi = r.confusion[k + 1];
    double a = 0.0, b = 0.0;
    for (std::size_t m = 0; m < lo.size(); ++m) {
      if (lo[m] >= hi[m])
        b += hi[m];
      else
        a += lo[m];
    }
    r.error_n_vs_n1.push_back(ml_pair_error(lo, hi));
    r.error_std.push_back(0.5 * std::sqrt(a * (1.0 - a) / T + b * (1.0 - b) / T));
  }
  return r;
}

DiscriminationReport discrimination_report(const DetectorDesign& d, double readout_duration,
                                           int n_min, int n_max, std::uint64_t trials,
                                           std::uint64_t rng_seed) {
  return discrimination_report(readout_chain(d, readout_duration), n_min, n_max, trials, rng_seed);
}

FluorescenceCount fluorescence_photon_count(const DetectorDesign& d, double readout_duration) {
  if (!(readout_duration > 0.0)) throw DomainError("readout_duration must be positive");
  FluorescenceCount f;
  const double A = d.species.A_24;
  const double wr2 = d.omega_r * d.omega_r;
  f.scatter_rate = A * wr2 / (2.0 * wr2 + A * A);
  f.expected_detected = readout_duration / readout_time(d);
  return f;
}

TrialSummary summarize(const std::vector<TrialOutcome>& outcomes, int n_photons_true) {
  TrialSummary s;
  s.trials = outcomes.size();
  if (outcomes.empty()) return s;
  std::uint64_t exact = 0, any_dark = 0;
  double abs = 0.0, det = 0.0, dark = 0.0;
  for (const auto& o : outcomes) {
    abs += o.n_absorbed;
    det += o.n_atoms_detected;
    dark += o.n_dark_atoms;
    if (o.inferred_n == n_photons_true) ++exact;
    if (o.n_dark_atoms > 0) ++any_dark;
    if (static_cast<std::size_t>(o.inferred_n) >= s.histogram.size())
      s.histogram.resize(static_cast<std::size_t>(o.inferred_n) + 1, 0);
    ++s.histogram[static_cast<std::size_t>(o.inferred_n)];
  }
  const double T = static_cast<double>(outcomes.size());
  s.mean_absorbed = abs / T;
  s.mean_detected = det / T;
  s.mean_dark = dark / T;
  s.fraction_exact = static_cast<double>(exact) / T;
  s.fraction_any_dark = static_cast<double>(any_dark) / T;
  return s;
}

nlohmann::json to_json(const ReadoutChain& c) {
  return {{"p_absorb", c.p_absorb},   {"p_survive", c.p_survive}, {"p_register", c.p_register},
          {"p_dark", c.p_dark},       {"atoms", c.atoms},         {"per_photon", c.per_photon()}};
}

nlohmann::json to_json(const TrialSummary& s) {
  return {{"trials", s.trials},
          {"mean_absorbed", s.mean_absorbed},
          {"mean_detected", s.mean_detected},
          {"mean_dark", s.mean_dark},
          {"fraction_exact", s.fraction_exact},
          {"fraction_any_dark", s.fraction_any_dark},
          {"histogram", s.histogram}};
}

nlohmann::json to_json(const DiscriminationReport& r) {
  return {{"n_min", r.n_min},
          {"n_max", r.n_max},
          {"m_max", r.m_max},
          {"trials", r.trials},
          {"rng_seed", r.rng_seed},
          {"confusion", r.confusion},
          {"std_error", r.std_error},
          {"error_n_vs_n1", r.error_n_vs_n1},
          {"error_std", r.error_std}};
}

std::string confusion_csv(const DiscriminationReport& r) {
  std::ostringstream os;
  os << std::setprecision(17) << "n_true";
  for (int m = 0; m <= r.m_max; ++m) os << ",m_" << m;
  os << ",error_n_vs_n1\n";
  for (std::size_t k = 0; k < r.confusion.size(); ++k) {
    os << r.n_min + static_cast<int>(k);
    for (double p : r.confusion[k]) os << ',' << p;
    os << ',';
    if (k < r.error_n_vs_n1.size()) os << r.error_n_vs_n1[k];
    os << '\n';
  }
  return os.str();
}

}  // namespace vapordet
