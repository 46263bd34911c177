#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "vapordet/error.hpp"

// Thin layer over Boost.Odeint's dense-output Dormand-Prince 5(4) stepper.

namespace vapordet::ode {

using cplx = std::complex<double>;
using State = std::vector<cplx>;
/// dy/dt = f(t, y), written into dydt (pre-sized).
using Rhs = std::function<void(double t, const State& y, State& dydt)>;
using Observer = std::function<void(double t, const State& y)>;

struct Tolerance {
  double atol = 1e-10;
  double rtol = 1e-10;
  double h_init = 0.0;  // 0 selects span * 1e-3
  double h_max = 0.0;   // 0 means unbounded
  std::size_t max_steps = 50'000'000;  // per interval between observed times
};

/// Integrates y through `times` (monotone, either direction, times[0] is the
/// start) and calls `observe` at each of them, interpolating inside steps.
/// The last step ends exactly on times.back(), so callers can split at
/// discontinuities. Step failures surface as IntegrationError.
inline void integrate_times(const Rhs& f, State& y, const std::vector<double>& times,
                            const Tolerance& tol, const Observer& observe = {}) {
  namespace oi = boost::numeric::odeint;
  if (times.size() < 2) {
    if (observe && !times.empty()) observe(times.front(), y);
    return;
  }
  const double span = times.back() - times.front();
  if (span == 0.0) {
    if (observe)
      for (double t : times) observe(t, y);
    return;
  }
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double h0 = dir * (tol.h_init > 0.0 ? tol.h_init : std::abs(span) * 1e-3);
  auto stepper = oi::make_dense_output(tol.atol, tol.rtol, tol.h_max,
                                       oi::runge_kutta_dopri5<State>());
  const auto sys = [&f](const State& x, State& dxdt, double t) { f(t, x, dxdt); };
  const auto obs = [&observe](const State& x, double t) {
    if (observe) observe(t, x);
  };
  const int cap = tol.max_steps > static_cast<std::size_t>(std::numeric_limits<int>::max())
                      ? std::numeric_limits<int>::max()
                      : static_cast<int>(tol.max_steps);
  try {
    oi::integrate_times(stepper, sys, y, times.begin(), times.end(), h0, obs,
                        oi::max_step_checker(cap));
  } catch (const oi::odeint_error& e) {
    throw IntegrationError(std::string("integration failed between t = ") +
                           std::to_string(times.front()) + " and " +
                           std::to_string(times.back()) + " s: " + e.what());
  }
}

/// Integrates y from t0 to t1 (t1 < t0 runs backwards).
inline void integrate(const Rhs& f, double t0, double t1, State& y, const Tolerance& tol = {}) {
  integrate_times(f, y, {t0, t1}, tol);
}

}  // namespace vapordet::ode
