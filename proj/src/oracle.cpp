#include "vapordet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "vapordet/constants.hpp"
#include "vapordet/error.hpp"

namespace vapordet {

namespace {

constexpr cplx kI{0.0, 1.0};

// State layout: [alpha_0 .. alpha_{M-1}, beta_0 .. beta_{N-1}].
ode::Rhs schrodinger_rhs(const ModeGrid& grid, const EffectiveCoupling& c) {
  const std::size_t M = grid.mode_count;
  const std::size_t N = grid.atom_count;
  return [&grid, &c, M, N, phase = std::vector<cplx>(M)](double t, const ode::State& y,
                                                          ode::State& dydt) mutable {
    const cplx s = c.escort(t);
    for (std::size_t l = 0; l < M; ++l) phase[l] = std::polar(1.0, grid.offsets[l] * t);
    for (std::size_t i = 0; i < N; ++i) dydt[M + i] = 0.0;
    if (s == cplx{}) {
      for (std::size_t l = 0; l < M; ++l) dydt[l] = 0.0;
      return;
    }
    const cplx sc = std::conj(s);
    for (std::size_t l = 0; l < M; ++l) {
      const cplx* f = &c.f0[l * N];
      cplx acc = 0.0;
      for (std::size_t i = 0; i < N; ++i) acc += f[i] * y[M + i];
      dydt[l] = -s * phase[l] * acc;
      const cplx a = sc * std::conj(phase[l]) * y[l];
      for (std::size_t i = 0; i < N; ++i) dydt[M + i] += std::conj(f[i]) * a;
    }
  };
}

ode::State pack(const AmplitudeState& s) {
  ode::State y(s.alpha.begin(), s.alpha.end());
  y.insert(y.end(), s.beta.begin(), s.beta.end());
  return y;
}

AmplitudeState unpack(const ode::State& y, std::size_t M, double t) {
  AmplitudeState s;
  s.alpha.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(M));
  s.beta.assign(y.begin() + static_cast<std::ptrdiff_t>(M), y.end());
  s.time = t;
  return s;
}

void check_shapes(const ModeGrid& grid, const EffectiveCoupling& c, const AmplitudeState& s) {
  if (s.alpha.size() != grid.mode_count || s.beta.size() != grid.atom_count ||
      c.mode_count != grid.mode_count || c.atom_count != grid.atom_count)
    throw DomainError("oracle: state, grid and coupling dimensions disagree");
}

}  // namespace

ModeGrid make_mode_grid(const DetectorDesign& d, std::size_t modes, std::size_t atoms,
                        double bandwidth, std::uint64_t seed) {
  if (modes == 0 || atoms == 0) throw DomainError("mode grid needs at least one mode and atom");
  if (!(bandwidth > 0.0)) throw DomainError("mode grid bandwidth must be positive");
  ModeGrid g;
  g.mode_count = modes;
  g.atom_count = atoms;
  g.quantization_bandwidth = bandwidth;
  g.omega_0 = 2.0 * std::numbers::pi * PhysicalConstants::c / d.photon_wavelength;
  const double dw = bandwidth / static_cast<double>(modes);
  const double centre = 0.5 * static_cast<double>(modes - 1);
  for (std::size_t l = 0; l < modes; ++l)
    g.offsets.push_back((static_cast<double>(l) - centre) * dw);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < atoms; ++i) {
    // transverse coordinates are drawn to keep the stream layout fixed, but
    // on-axis plane waves do not depend on them
    (void)unit(rng);
    (void)unit(rng);
    g.atom_z.push_back(unit(rng) * d.cell_length);
  }
  g.mode_functions.resize(modes * atoms);
  for (std::size_t l = 0; l < modes; ++l) {
    const double k = (g.omega_0 + g.offsets[l]) / PhysicalConstants::c;
    for (std::size_t i = 0; i < atoms; ++i)
      g.mode_functions[l * atoms + i] = std::polar(1.0, std::fmod(k * g.atom_z[i], 2.0 * std::numbers::pi));
  }
  return g;
}

EffectiveCoupling build_coupling(const DetectorDesign& d, const ModeGrid& grid,
                                 const PulseShape& escort) {
  EffectiveCoupling c;
  c.mode_count = grid.mode_count;
  c.atom_count = grid.atom_count;
  c.omega_0 = grid.omega_0;
  c.escort = escort;
  c.g_scale = std::sqrt(d.species.A_31 * grid.spacing() / (2.0 * std::numbers::pi));
  const double rabi_over = d.omega_e / (2.0 * d.detuning);
  c.f0.resize(grid.mode_count * grid.atom_count);
  for (std::size_t l = 0; l < grid.mode_count; ++l)
    for (std::size_t i = 0; i < grid.atom_count; ++i)
      c.f0[l * grid.atom_count + i] = rabi_over * std::conj(c.g_scale * grid.phi(l, i));
  return c;
}

double total_excitation(const AmplitudeState& s) {
  double sum = 0.0;
  for (const auto& a : s.alpha) sum += std::norm(a);
  for (const auto& b : s.beta) sum += std::norm(b);
  return sum;
}

AmplitudeState square_photon(const ModeGrid& grid, double duration) {
  if (!(duration > 0.0)) throw DomainError("square_photon: duration must be positive");
  AmplitudeState s;
  s.alpha.resize(grid.mode_count);
  s.beta.assign(grid.atom_count, 0.0);
  double norm = 0.0;
  for (std::size_t l = 0; l < grid.mode_count; ++l) {
    const double w = grid.offsets[l];
    // integral_0^T exp(i w t) dt
    s.alpha[l] = w == 0.0 ? cplx(duration) : (std::polar(1.0, w * duration) - 1.0) / (kI * w);
    norm += std::norm(s.alpha[l]);
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (auto& a : s.alpha) a *= inv;
  return s;
}

AmplitudeState propagate(const ModeGrid& grid, const EffectiveCoupling& coupling,
                         const AmplitudeState& initial, double t_target,
                         const ode::Tolerance& tol) {
  check_shapes(grid, coupling, initial);
  ode::State y = pack(initial);
  // split at escort edges so the integrator never straddles a jump
  std::vector<double> cuts{initial.time};
  for (double b : coupling.escort.breakpoints()) {
    const bool inside = t_target > initial.time ? (b > initial.time && b < t_target)
                                                : (b < initial.time && b > t_target);
    if (inside) cuts.push_back(b);
  }
  cuts.push_back(t_target);
  if (t_target < initial.time)
    std::sort(cuts.begin() + 1, cuts.end() - 1, std::greater<>());
  else
    std::sort(cuts.begin() + 1, cuts.end() - 1);
  const auto rhs = schrodinger_rhs(grid, coupling);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) ode::integrate(rhs, cuts[k], cuts[k + 1], y, tol);
  return unpack(y, grid.mode_count, t_target);
}

std::vector<AmplitudeState> integrate_schrodinger(const ModeGrid& grid,
                                                  const EffectiveCoupling& coupling,
                                                  const AmplitudeState& initial, double t_final,
                                                  const OracleOptions& opts) {
  check_shapes(grid, coupling, initial);
  if (!(t_final > initial.time))
    throw DomainError("integrate_schrodinger: t_final must exceed the initial time");
  const double n0 = total_excitation(initial);
  if (std::abs(n0 - 1.0) > 1e-9) throw DomainError("integrate_schrodinger: initial state not normalized");

  std::vector<double> times;
  const std::size_t ns = std::max<std::size_t>(opts.samples, 2);
  for (std::size_t k = 0; k < ns; ++k)
    times.push_back(initial.time +
                    (t_final - initial.time) * static_cast<double>(k) / static_cast<double>(ns - 1));

  std::vector<double> cuts{initial.time, t_final};
  for (double b : coupling.escort.breakpoints())
    if (b > initial.time && b < t_final) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<AmplitudeState> traj;
  traj.reserve(ns);
  traj.push_back(initial);
  std::size_t next = 1;

  ode::State y = pack(initial);
  const auto rhs = schrodinger_rhs(grid, coupling);
  const auto check = [&](const AmplitudeState& s) {
    const double drift = std::abs(total_excitation(s) - n0);
    if (drift > opts.max_norm_drift) {
      std::ostringstream os;
      os << "integration failed: norm drift " << drift << " at t = " << s.time;
      throw IntegrationError(os.str());
    }
  };
  const auto record = [&](double t, const ode::State& x) {
    if (next < ns && t == times[next]) {
      traj.push_back(unpack(x, grid.mode_count, t));
      check(traj.back());
      ++next;
    }
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double seg_end = cuts[k + 1];
    std::vector<double> seg{cuts[k]};
    for (std::size_t j = next; j < ns && times[j] <= seg_end; ++j)
      if (times[j] > cuts[k]) seg.push_back(times[j]);
    if (seg.back() != seg_end) seg.push_back(seg_end);
    ode::integrate_times(rhs, y, seg, opts.tol, record);
  }
  while (next < ns) {
    traj.push_back(unpack(y, grid.mode_count, times[next]));
    check(traj.back());
    ++next;
  }
  return traj;
}

std::vector<AbsorptionResult> markov_prediction(const DetectorDesign& d, const ModeGrid& grid,
                                                const EffectiveCoupling& coupling,
                                                const AmplitudeState& initial, double t_final,
                                                const MarkovOptions& opts) {
  check_shapes(grid, coupling, initial);
  std::vector<AbsorptionResult> out;
  const double t0 = initial.time;
  for (std::size_t i = 0; i < grid.atom_count; ++i) {
    std::vector<cplx> weights(grid.mode_count);
    for (std::size_t l = 0; l < grid.mode_count; ++l)
      weights[l] = coupling.g_scale * initial.alpha[l] * grid.phi(l, i);
    MarkovProblem p;
    p.escort_envelope = [&coupling, t0](double t) { return coupling.escort(t + t0); };
    p.drive = [&grid, w = std::move(weights), t0](double t) {
      cplx sum = 0.0;
      for (std::size_t l = 0; l < grid.mode_count; ++l)
        sum += w[l] * std::polar(1.0, -grid.offsets[l] * (t + t0));
      return sum;
    };
    p.t_end = t_final - t0;
    for (double b : coupling.escort.breakpoints()) p.breakpoints.push_back(b - t0);
    out.push_back(solve_markov(d, p, opts));
  }
  return out;
}

MarkovComparison compare_with_markov(const DetectorDesign& d, const DeskOptions& opts) {
  const double T = d.pulse_duration;
  const double spacing = 2.0 * std::numbers::pi / (opts.revival_factor * T);
  const auto grid =
      make_mode_grid(d, opts.modes, opts.atoms, spacing * static_cast<double>(opts.modes), opts.seed);
  const auto coupling = build_coupling(d, grid, PulseShape::square(T));
  const auto initial = square_photon(grid, T);

  MarkovComparison cmp;
  cmp.kappa_T = markov_damping(d) * T;
  cmp.trajectory = integrate_schrodinger(grid, coupling, initial, T, opts.oracle);
  const double n0 = total_excitation(initial);
  for (const auto& s : cmp.trajectory) {
    const double drift = std::abs(total_excitation(s) - n0);
    cmp.norm_drift = std::max(cmp.norm_drift, drift);
    cmp.excitation_drift = std::max(cmp.excitation_drift, drift);
  }
  for (const auto& b : cmp.trajectory.back().beta) cmp.oracle_absorb += std::norm(b);

  MarkovOptions mo;
  mo.tol = {1e-11, 1e-11};
  for (const auto& r : markov_prediction(d, grid, coupling, initial, T, mo))
    cmp.markov_absorb += r.p_absorb;
  cmp.relative_difference = std::abs(cmp.oracle_absorb - cmp.markov_absorb) / cmp.markov_absorb;
  return cmp;
}

std::string oracle_trajectory_csv(const std::vector<AmplitudeState>& traj) {
  std::ostringstream os;
  os << std::setprecision(17) << "time_s";
  if (!traj.empty()) {
    for (std::size_t l = 0; l < traj.front().alpha.size(); ++l) os << ",alpha_sq_" << l;
    for (std::size_t i = 0; i < traj.front().beta.size(); ++i) os << ",beta_sq_" << i;
  }
  os << ",total_excitation\n";
  for (const auto& s : traj) {
    os << s.time;
    for (const auto& a : s.alpha) os << ',' << std::norm(a);
    for (const auto& b : s.beta) os << ',' << std::norm(b);
    os << ',' << total_excitation(s) << '\n';
  }
  return os.str();
}

}  // namespace vapordet
