#include "vapordet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "vapordet/detector_model.hpp"
#include "vapordet/error.hpp"

namespace vapordet {

namespace {

constexpr cplx kI{0.0, 1.0};

// g(x) = 1 - 2 (1 - e^-x)/x + (1 - e^-2x)/(2x); the bracket of the closed-form
// re-emission integral divided by T. Series below 0.5 avoids cancellation.
double scatter_shape(double x) {
  if (x == 0.0) return 0.0;
  if (x < 0.5) {
    double sum = 0.0;
    double xpow = x * x;          // x^(k-1) for k = 3
    double fact = 6.0;            // k!
    double pow2 = 4.0;            // 2^(k-1)
    for (int k = 3; k < 60; ++k) {
      const double term = ((k + 1) % 2 == 0 ? 1.0 : -1.0) * (pow2 - 2.0) * xpow / fact;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      xpow *= x;
      fact *= static_cast<double>(k + 1);
      pow2 *= 2.0;
    }
    return sum;
  }
  return 1.0 + 2.0 * std::expm1(-x) / x - std::expm1(-2.0 * x) / (2.0 * x);
}

// (1 - e^-x) / x
double saturation(double x) { return x == 0.0 ? 1.0 : -std::expm1(-x) / x; }

std::vector<double> uniform_times(double t_end, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {t_end};
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(t_end * static_cast<double>(k) / static_cast<double>(n - 1));
  return out;
}

}  // namespace

PulseShape PulseShape::square(double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw DomainError("pulse duration must be positive and finite");
  PulseShape p;
  p.kind = Kind::square;
  p.duration = duration;
  return p;
}

PulseShape PulseShape::sampled(double duration, std::vector<cplx> samples) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw DomainError("pulse duration must be positive and finite");
  if (samples.size() < 2) throw DomainError("sampled pulse needs at least 2 samples");
  for (const auto& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw DomainError("sampled pulse has non-finite samples");
  PulseShape p;
  p.kind = Kind::sampled;
  p.duration = duration;
  p.samples = std::move(samples);
  return p;
}

cplx PulseShape::operator()(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  if (kind == Kind::square) return 1.0;
  const double pos = t / duration * static_cast<double>(samples.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), samples.size() - 2);
  const double frac = pos - static_cast<double>(k);
  return samples[k] + frac * (samples[k + 1] - samples[k]);
}

std::vector<double> PulseShape::breakpoints() const {
  if (kind == Kind::square) return {0.0, duration};
  std::vector<double> out;
  out.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    out.push_back(duration * static_cast<double>(k) / static_cast<double>(samples.size() - 1));
  return out;
}

cplx escort_coupling(const DetectorDesign& d, double t) {
  if (t < 0.0 || t > d.pulse_duration) return 0.0;
  return std::conj(kI * d.omega_e / (2.0 * d.detuning));
}

cplx escort_coupling(const DetectorDesign& d, const PulseShape& escort, double t) {
  return std::conj(kI * d.omega_e * escort(t) / (2.0 * d.detuning));
}

double markov_damping(const DetectorDesign& d) {
  const double eps = d.omega_e / (2.0 * d.detuning);
  return 0.5 * d.species.A_31 * eps * eps;
}

AbsorptionResult solve_markov_square(const DetectorDesign& d, cplx photon_drive,
                                     std::size_t trajectory_samples) {
  const double T = d.pulse_duration;
  if (!(T > 0.0)) throw DomainError("solve_markov_square: pulse_duration must be positive");
  const cplx eps = escort_coupling(d, 0.0);
  const double kappa = markov_damping(d);
  const cplx source = eps * photon_drive;

  auto beta_at = [&](double t) { return source * t * saturation(kappa * t); };

  AbsorptionResult r;
  r.beta_final = beta_at(T);
  r.p_absorb = std::norm(r.beta_final);
  // 2 kappa * integral |beta|^2 = 2 kappa |source|^2 T^3 g(x) / x^2
  const double x = kappa * T;
  r.p_scatter = x == 0.0 ? 0.0 : 2.0 * std::norm(source) * T * T * scatter_shape(x) / x;
  for (double t : uniform_times(T, trajectory_samples)) r.trajectory.push_back({t, beta_at(t)});
  return r;
}

AbsorptionResult solve_markov(const DetectorDesign& d, const MarkovProblem& problem,
                              const MarkovOptions& opts) {
  if (!(problem.t_end > 0.0)) throw DomainError("solve_markov: t_end must be positive");
  const double A31 = d.species.A_31;
  const double scale = d.omega_e / (2.0 * d.detuning);

  // Integrate u = beta / b with b the magnitude bound |eps|max |phi|max
  // min(t_end, 1/kappa_max), so tolerances act relative to the solution.
  double esc_max = 0.0, drive_max = 0.0;
  for (int k = 0; k <= 256; ++k) {
    const double t = problem.t_end * k / 256.0;
    esc_max = std::max(esc_max, std::abs(problem.escort_envelope(t)));
    drive_max = std::max(drive_max, std::abs(problem.drive(t)));
  }
  for (double t : problem.breakpoints) {
    esc_max = std::max(esc_max, std::abs(problem.escort_envelope(t)));
    drive_max = std::max(drive_max, std::abs(problem.drive(t)));
  }
  const double eps_max = std::abs(scale) * esc_max;
  const double kappa_max = 0.5 * A31 * eps_max * eps_max;
  double b = eps_max * drive_max * std::min(problem.t_end, kappa_max > 0.0 ? 1.0 / kappa_max : problem.t_end);
  if (!(b > 0.0) || !std::isfinite(b)) b = 1.0;
  const double inv_b = 1.0 / b;

  // y[0] = beta / b, y[1] = accumulated re-emission probability / b^2
  const ode::Rhs rhs = [&](double t, const ode::State& y, ode::State& dydt) {
    const cplx eps = std::conj(kI * scale * problem.escort_envelope(t));
    const double e2 = std::norm(eps);
    dydt[0] = eps * problem.drive(t) * inv_b - 0.5 * A31 * e2 * y[0];
    dydt[1] = A31 * e2 * std::norm(y[0]);
  };

  std::vector<double> cuts{0.0, problem.t_end};
  for (double b : problem.breakpoints)
    if (b > 0.0 && b < problem.t_end) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto sample_times = uniform_times(problem.t_end, opts.trajectory_samples);
  std::size_t next_sample = 0;

  AbsorptionResult r;
  ode::State y{0.0, 0.0};
  if (!sample_times.empty() && sample_times.front() == 0.0) {
    r.trajectory.push_back({0.0, 0.0});
    ++next_sample;
  }
  const auto record = [&](double t, const ode::State& x) {
    if (next_sample < sample_times.size() && t == sample_times[next_sample]) {
      r.trajectory.push_back({t, b * x[0]});
      ++next_sample;
    }
  };
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double seg_end = cuts[s + 1];
    std::vector<double> times{cuts[s]};
    for (std::size_t k = next_sample; k < sample_times.size() && sample_times[k] <= seg_end; ++k)
      if (sample_times[k] > cuts[s]) times.push_back(sample_times[k]);
    if (times.back() != seg_end) times.push_back(seg_end);
    ode::integrate_times(rhs, y, times, opts.tol, record);
  }
  while (next_sample < sample_times.size()) {
    r.trajectory.push_back({sample_times[next_sample], b * y[0]});
    ++next_sample;
  }
  r.beta_final = b * y[0];
  r.p_absorb = std::norm(r.beta_final);
  r.p_scatter = b * b * y[1].real();
  return r;
}

AbsorptionResult solve_markov_numeric(const DetectorDesign& d, const PulseShape& escort,
                                      const PulseShape& photon, cplx photon_drive,
                                      const MarkovOptions& opts) {
  MarkovProblem p;
  p.escort_envelope = [&escort](double t) { return escort(t); };
  p.drive = [&photon, photon_drive](double t) { return photon_drive * photon(t); };
  p.t_end = std::max(escort.duration, photon.duration);
  p.breakpoints = escort.breakpoints();
  const auto pb = photon.breakpoints();
  p.breakpoints.insert(p.breakpoints.end(), pb.begin(), pb.end());
  return solve_markov(d, p, opts);
}

double photon_drive(const DetectorDesign& d) {
  const double lam = d.photon_wavelength;
  return std::sqrt(4.0 * lam * lam * d.species.A_31 / (d.pulse_duration * d.beam_area));
}

double drive_for_absorption(const DetectorDesign& d, double p) {
  if (p < 0.0 || p > 1.0) throw DomainError("drive_for_absorption: p outside [0, 1]");
  const double eps = d.omega_e / (2.0 * d.detuning);
  const double T = d.pulse_duration;
  if (eps == 0.0) throw DomainError("drive_for_absorption: no escort, nothing can be absorbed");
  return std::sqrt(p) / (eps * T * saturation(markov_damping(d) * T));
}

double aggregate_absorption(const DetectorDesign& d) {
  const double p_atom = solve_markov_square(d, photon_drive(d)).p_absorb;
  const double trials = atom_count(d) * static_cast<double>(d.passes);
  return -std::expm1(trials * std::log1p(-p_atom));
}

ScatterCrosscheck scatter_crosscheck(const DetectorDesign& d) {
  ScatterCrosscheck c;
  c.budget_term = scatter_loss(d);
  const auto r = solve_markov_square(d, photon_drive(d));
  const double total = r.p_absorb + r.p_scatter;
  c.markov_fraction = total > 0.0 ? r.p_scatter / total : 0.0;
  c.ratio = c.budget_term > 0.0 ? c.markov_fraction / c.budget_term : 0.0;
  c.ratio_squared = c.budget_term > 0.0 ? c.markov_fraction * c.markov_fraction / c.budget_term : 0.0;
  return c;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& traj) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "time_s,re_beta,im_beta,abs_beta_sq\n";
  for (const auto& p : traj)
    os << p.t << ',' << p.beta.real() << ',' << p.beta.imag() << ',' << std::norm(p.beta) << '\n';
  return os.str();
}

}  // namespace vapordet
