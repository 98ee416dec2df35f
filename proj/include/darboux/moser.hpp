#pragma once

// Moser's constructive route to Darboux coordinates for the per-site radial
// symplectic form Omega(q,p) = J / (1 + nu (q^2 + p^2)), and the closed-form
// transformation it produces.

#include <optional>
#include <utility>

#include "darboux/poly.hpp"
#include "darboux/radial.hpp"
#include "darboux/state.hpp"

namespace darboux::moser {

/// Time-dependent Moser field V_t(q,p) = chi(t, s) (q, p) per site.
struct MoserField {
  RadialSeries chi;
  bool closed_form_available = true;
  /// Unset while nu stays formal.
  std::optional<double> nu;
};

enum class Direction { forward, inverse };

/// forward: (q,p) -> (x,y) = xi(s_q) (q,p); inverse: (x,y) -> (q,p) = sigma(s_x) (x,y).
struct DarbouxMap {
  Direction direction = Direction::inverse;
  double nu = 0.5;
};

// Closed-form radial factors. Below kSeriesThreshold in s each switches to its
// order-6 Taylor polynomial.
inline constexpr double kSeriesThreshold = 1e-4;

double log_factor(double s);           ///< ln(1+s)/s - 1
double chi(double t, double s);        ///< (1+s)/(2(1+ts)) * log_factor(s)
double sigma(double s);                ///< sqrt((e^s-1)/s)
double sigma_prime(double s);          ///< d sigma / ds
double xi(double s);                   ///< sqrt(ln(1+s)/s)
double h_function(double rho);         ///< (e^{rho^2}-1)/rho^2
double h_derivative(double rho);       ///< d h / d rho

/// Radial coefficient c(s) = (ln(1+s)/s - 1)/2 of the potential
/// a(q,p) = c(s) (-p, q), expanded through s^order.
RadialSeries build_vector_potential(int order);

/// The potential as phase polynomials (a_1, a_2) on a single site, degree 2*order+1.
std::pair<Poly, Poly> vector_potential_poly(int order);

/// d_p a_1 - d_q a_2 - nu A/(1 + nu A) on a single site, through degree
/// 2*order. Vanishes identically when the potential solves the curl equation.
Poly curl_residual(int order);

/// chi = g * c where Omega_t^{-T} = g J, g = (1+s)/(1+ts), and J a = c (q,p).
MoserField build_moser_field(int order);

LatticeState darboux_apply(const DarbouxMap& map, const LatticeState& state);

/// max |(D phi^-1)^T Omega(phi^-1(x,y)) (D phi^-1) - J| over sites and entries,
/// with analytic derivatives of sigma. Uses the inverse map regardless of
/// map.direction.
double verify_pullback(const DarbouxMap& map, const LatticeState& state);

/// Adaptive Dormand-Prince integration of (q,p)' = chi(t,s)(q,p) per site on
/// [0, t_end] with the closed-form chi.
LatticeState flow_V_numeric(const LatticeState& state0, double nu, double t_end, double tol = 1e-10);

struct HOdeCheck {
  Rat series_residual;      ///< max |coefficient| of the substituted series
  double numeric_residual;  ///< max |residual| on the rho grid
  double max() const { return std::max(series_residual.abs().to_double(), numeric_residual); }
};

/// Substitutes h(rho) = (e^{rho^2}-1)/rho^2 into
/// h' + (2/rho)(1 - rho^2) h - 2/rho = 0, as a series through rho^8 and
/// numerically on rho in [0.05, 0.5].
HOdeCheck check_h_ode();

}  // namespace darboux::moser
