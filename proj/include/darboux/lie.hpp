#pragma once

// Lie-series calculus in the extended phase space (t, x, y) along the Moser
// field, and the normal forms it produces.

#include <optional>
#include <string>
#include <vector>

#include "darboux/moser.hpp"
#include "darboux/poly.hpp"
#include "darboux/radial.hpp"
#include "darboux/state.hpp"

namespace darboux::lie {

/// Extended field (1, V_t) with V_t acting on every site as chi(t, s_j)(x_j, y_j).
/// With `cap_L` set, only chi's coefficients up to s^L are used, i.e. the
/// Taylor polynomial of V_t of degree 2L+1.
struct ExtendedField {
  RadialSeries chi;
  std::optional<int> cap_L;

  /// Moser field expanded through s^order, optionally capped.
  static ExtendedField moser(int order, std::optional<int> cap_L = std::nullopt);

  /// Highest chi coefficient that takes part in the Lie derivative.
  int effective_order() const;
};

enum class LieSign { plus = 1, minus = -1 };

/// d_t f + sum_j chi(t, s_j) (x_j d_{x_j} f + y_j d_{y_j} f), truncated at f's
/// degree. Errors when the field series is too short for that degree.
Poly lie_derivative(const Poly& f, const ExtendedField& field);

/// sum_{k=0}^{K} sign^k / k! L^k f, keeping the t dependence.
Poly lie_series(const Poly& f, const ExtendedField& field, int K, LieSign sign);

/// lie_series with t replaced by tau after summation.
Poly exp_trunc(const Poly& f, const ExtendedField& field, int K, LieSign sign, const Rat& tau);

/// Conserved quantity P = ln(1 + nu A)/(2 nu) per site, summed over sites,
/// expanded through the ring's degree.
Poly p_poly(Ring ring);

struct PTransform {
  /// residual(s) = (x^2+y^2)/2 - exp_K(L_{-V} P)(1, x, y) = series(s) / nu.
  RadialSeries series;
  /// The same residual as a single-site phase polynomial.
  Poly residual;
  std::optional<int> min_s_degree;
  std::optional<int> min_phase_degree;
};

/// Transforms P of a single site by the truncated inverse Lie series.
/// Requires s_order >= K + 3.
PTransform transform_P(int K, std::optional<int> cap_L, int s_order);

enum class Model { salerno, al };

/// Taylor expansion of the AL/Salerno Hamiltonian (cartesian form) through
/// the ring's degree: H_0 = sum_j gamma/(4 nu^2)(s_j - ln(1+s_j)) and
/// H_1 = eps sum_j (x_{j+1} x_j + y_{j+1} y_j). AL drops H_0.
Poly hamiltonian_poly(Model model, Ring ring, Boundary bc = Boundary::periodic);

/// exp_K(L_{-V^{(2L+1)}} H)(1, x, y) truncated at `degree`, on `sites`
/// periodic sites (sites >= 3).
Poly transform_H(Model model, int K, int L, int degree, int sites);

/// Translation-invariant per-site building blocks of the normal forms.
struct SiteTerm {
  std::string label;  ///< e.g. "(x_j^2+y_j^2)^2"
  Poly coefficient;   ///< polynomial in the parameters only
};

struct SiteDecomposition {
  std::vector<SiteTerm> terms;
  Poly remainder;  ///< part not spanned by the basis (zero when fully recognised)
};

/// Writes a periodic Poly as sum_j [ sum_i c_i * b_i(j) ] over the basis
/// A_j^k, (x_{j+1}x_j + y_{j+1}y_j), A_j^k ((x_{j+1}+x_{j-1})x_j + (y_{j+1}+y_{j-1})y_j).
SiteDecomposition per_site_decomposition(const Poly& h);

/// "sum_j [ 1/8*gamma*(x_j^2+y_j^2)^2 + ... ]"
std::string format_per_site(const SiteDecomposition& d);

}  // namespace darboux::lie
