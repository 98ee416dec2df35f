#include "darboux/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "darboux/error.hpp"

namespace darboux::ode {

namespace odeint = boost::numeric::odeint;

namespace {

// Steps allowed between two consecutive sample times before the run is
// declared stuck.
constexpr int kMaxStepsBetweenSamples = 5'000'000;

bool finite(const State& z) {
  return std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void integrate(const Rhs& rhs, State z0, std::span<const double> times, double tol,
               const Sampler& sample) {
  if (times.empty()) return;
  if (!(tol > 0.0)) throw ContractError("ode::integrate: tolerance must be positive");
  if (!finite(z0)) throw ContractError("ode::integrate: non-finite initial state");

  const double span = times.back() - times.front();
  if (span == 0.0) {
    for (double t : times) sample(t, z0);
    return;
  }
  const double dt0 = span / 1000.0;
  double last_valid = times.front();

  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
  auto observer = [&](const State& z, double t) {
    if (!finite(z)) {
      throw IntegrationError("integration blew up (non-finite state) after t=" + std::to_string(last_valid),
                             last_valid);
    }
    last_valid = t;
    sample(t, z);
  };
  auto system = [&rhs](const State& z, State& dz, double t) { rhs(z, dz, t); };

  try {
    odeint::integrate_times(stepper, system, z0, times.begin(), times.end(), dt0, observer,
                            odeint::max_step_checker(kMaxStepsBetweenSamples));
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("step size underflow near t=") + std::to_string(last_valid) + ": " +
                               e.what(),
                           last_valid);
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("integration stalled near t=") + std::to_string(last_valid) + ": " +
                               e.what(),
                           last_valid);
  }
}

State flow(const Rhs& rhs, State z0, double t0, double t_end, double tol) {
  const double times[2] = {t0, t_end};
  State out = z0;
  integrate(rhs, std::move(z0), times, tol, [&out](double, const State& z) { out = z; });
  return out;
}

}  // namespace darboux::ode
