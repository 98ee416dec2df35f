#pragma once

// Power series in the per-site radial variable s = nu*(x^2 + y^2), with
// coefficients that are polynomials in t and the formal parameters.

#include <optional>
#include <string_view>
#include <vector>

#include "darboux/poly.hpp"

namespace darboux {

/// Named radial functions, all analytic at s = 0.
enum class RadialFn {
  log_factor,  ///< ln(1+s)/s - 1
  g_factor,    ///< (1+s)/(1+t s)
  chi,         ///< g_factor * log_factor / 2, the Moser field multiplier
  sigma,       ///< sqrt((e^s - 1)/s), inverse Darboux factor
  xi,          ///< sqrt(ln(1+s)/s), forward Darboux factor
  p_radial,    ///< ln(1+s)/2, so that P = p_radial(s)/nu
  h,           ///< (e^s - 1)/s, i.e. sigma^2
};

std::string_view to_string(RadialFn fn);
std::optional<RadialFn> radial_fn_from_string(std::string_view name);

/// Ring of the coefficients: no phase variables.
inline constexpr Ring kCoefficientRing{0, 0};

class RadialSeries {
 public:
  explicit RadialSeries(int order);
  explicit RadialSeries(std::vector<Poly> coeffs);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Poly& operator[](int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
  const std::vector<Poly>& coeffs() const { return coeffs_; }
  void set(int k, Poly c);

  /// Coefficient k as an exact number; contract error if it depends on t or
  /// on a parameter.
  Rat constant_coeff(int k) const;
  /// Lowest power with a nonzero coefficient.
  std::optional<int> min_degree() const;

  RadialSeries truncated(int order) const;
  /// Series square root; requires the s^0 coefficient to be exactly 1.
  RadialSeries sqrt() const;
  /// Value at a numeric s with t and parameters evaluated.
  double evaluate(double s, const ParamValues& params = {}, double t = 0.0) const;

  RadialSeries& operator+=(const RadialSeries& o);
  RadialSeries& operator-=(const RadialSeries& o);
  RadialSeries& operator*=(const Rat& c);

  friend RadialSeries operator+(RadialSeries a, const RadialSeries& b) { return a += b; }
  friend RadialSeries operator-(RadialSeries a, const RadialSeries& b) { return a -= b; }
  /// Cauchy product truncated at the smaller order.
  friend RadialSeries operator*(const RadialSeries& a, const RadialSeries& b);
  friend RadialSeries operator*(RadialSeries a, const Rat& c) { return a *= c; }
  friend bool operator==(const RadialSeries&, const RadialSeries&) = default;

 private:
  std::vector<Poly> coeffs_;
};

/// Taylor expansion of a named radial function at s = 0 through s^order.
RadialSeries radial_expand(RadialFn fn, int order);

/// Embeds sum_k c_k s^k into the phase ring at one site, as
/// sum_k c_k nu^(k + nu_shift) (x_j^2 + y_j^2)^k. A negative shift is allowed
/// only where it leaves every nonzero term with a nonnegative nu power.
Poly radial_to_poly(const RadialSeries& series, Ring ring, int site, int nu_shift = 0);

/// Numeric coefficients of a series with constant coefficients.
std::vector<double> numeric_coeffs(const RadialSeries& series);

}  // namespace darboux
