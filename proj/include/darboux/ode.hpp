#pragma once

// Thin wrapper over Boost.Odeint's Dormand-Prince 5(4) dense-output stepper.

#include <functional>
#include <span>
#include <vector>

namespace darboux::ode {

using State = std::vector<double>;
using Rhs = std::function<void(const State& z, State& dzdt, double t)>;
using Sampler = std::function<void(double t, const State& z)>;

/// Integrates z' = rhs(z, t) starting at times.front() with z0 and reports
/// the dense-output state at every entry of `times` (monotone, either
/// direction). Absolute and relative local error per step are bounded by
/// `tol`. Throws IntegrationError on step-size collapse or a non-finite state.
void integrate(const Rhs& rhs, State z0, std::span<const double> times, double tol,
               const Sampler& sample);

/// Convenience: the state at `t_end` starting from z0 at `t0`.
State flow(const Rhs& rhs, State z0, double t0, double t_end, double tol);

}  // namespace darboux::ode
