#include "darboux/radial.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "darboux/error.hpp"

namespace darboux {

namespace {

Poly number(const Rat& c) { return Poly::constant(kCoefficientRing, c); }

Poly time_power(int k, const Rat& c) {
  MIndex m(0);
  m.set_t(k);
  return Poly::monomial(kCoefficientRing, m, c);
}

constexpr std::array<std::pair<RadialFn, std::string_view>, 7> kNames{{
    {RadialFn::log_factor, "log_factor"},
    {RadialFn::g_factor, "g_factor"},
    {RadialFn::chi, "chi"},
    {RadialFn::sigma, "sigma"},
    {RadialFn::xi, "xi"},
    {RadialFn::p_radial, "p_radial"},
    {RadialFn::h, "h"},
}};

}  // namespace

std::string_view to_string(RadialFn fn) {
  for (const auto& [f, name] : kNames) {
    if (f == fn) return name;
  }
  return "?";
}

std::optional<RadialFn> radial_fn_from_string(std::string_view name) {
  for (const auto& [f, n] : kNames) {
    if (n == name) return f;
  }
  return std::nullopt;
}

RadialSeries::RadialSeries(int order) {
  if (order < 0) throw ContractError("RadialSeries: negative order");
  coeffs_.assign(static_cast<std::size_t>(order + 1), Poly(kCoefficientRing));
}

RadialSeries::RadialSeries(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw ContractError("RadialSeries: needs at least one coefficient");
  for (const auto& c : coeffs_) {
    if (c.ring().sites != 0) throw ContractError("RadialSeries: coefficients must be free of phase variables");
  }
}

void RadialSeries::set(int k, Poly c) {
  if (c.ring().sites != 0) throw ContractError("RadialSeries: coefficients must be free of phase variables");
  coeffs_.at(static_cast<std::size_t>(k)) = std::move(c);
}

Rat RadialSeries::constant_coeff(int k) const {
  const Poly& c = (*this)[k];
  if (c.is_zero()) return Rat(0);
  if (c.size() != 1 || c.depends_on_time() || c.terms().begin()->first.has_params()) {
    throw ContractError("RadialSeries: coefficient is not a pure number");
  }
  return c.terms().begin()->second;
}

std::optional<int> RadialSeries::min_degree() const {
  for (int k = 0; k <= order(); ++k) {
    if (!(*this)[k].is_zero()) return k;
  }
  return std::nullopt;
}

RadialSeries RadialSeries::truncated(int new_order) const {
  if (new_order > order()) throw ContractError("RadialSeries: cannot extend a truncated series");
  return RadialSeries(std::vector<Poly>(coeffs_.begin(), coeffs_.begin() + new_order + 1));
}

RadialSeries RadialSeries::sqrt() const {
  if (!((*this)[0] == number(Rat(1)))) {
    throw ContractError("RadialSeries::sqrt: leading coefficient must be 1");
  }
  RadialSeries r(order());
  r.set(0, number(Rat(1)));
  for (int k = 1; k <= order(); ++k) {
    Poly acc = (*this)[k];
    for (int i = 1; i < k; ++i) acc -= r[i] * r[k - i];
    r.set(k, acc * Rat(1, 2));
  }
  return r;
}

double RadialSeries::evaluate(double s, const ParamValues& params, double t) const {
  double sum = 0.0;
  for (int k = order(); k >= 0; --k) {
    sum = sum * s + eval_point((*this)[k], {}, {}, params, t);
  }
  return sum;
}

RadialSeries& RadialSeries::operator+=(const RadialSeries& o) {
  if (o.order() < order()) coeffs_.resize(o.coeffs_.size(), Poly(kCoefficientRing));
  for (int k = 0; k <= order(); ++k) coeffs_[static_cast<std::size_t>(k)] += o[k];
  return *this;
}

RadialSeries& RadialSeries::operator-=(const RadialSeries& o) {
  if (o.order() < order()) coeffs_.resize(o.coeffs_.size(), Poly(kCoefficientRing));
  for (int k = 0; k <= order(); ++k) coeffs_[static_cast<std::size_t>(k)] -= o[k];
  return *this;
}

RadialSeries& RadialSeries::operator*=(const Rat& c) {
  for (auto& p : coeffs_) p *= c;
  return *this;
}

RadialSeries operator*(const RadialSeries& a, const RadialSeries& b) {
  const int order = std::min(a.order(), b.order());
  RadialSeries r(order);
  for (int k = 0; k <= order; ++k) {
    Poly acc(kCoefficientRing);
    for (int i = 0; i <= k; ++i) acc += a[i] * b[k - i];
    r.set(k, std::move(acc));
  }
  return r;
}

RadialSeries radial_expand(RadialFn fn, int order) {
  if (order < 0) throw ContractError("radial_expand: negative order");
  RadialSeries r(order);
  switch (fn) {
    case RadialFn::log_factor:
      // ln(1+s)/s - 1 = sum_{k>=1} (-1)^k s^k / (k+1)
      for (int k = 1; k <= order; ++k) r.set(k, number(Rat(k % 2 ? -1 : 1, k + 1)));
      return r;
    case RadialFn::g_factor:
      // (1+s) sum_k (-t s)^k
      r.set(0, number(Rat(1)));
      for (int k = 1; k <= order; ++k) {
        r.set(k, time_power(k, Rat(k % 2 ? -1 : 1)) + time_power(k - 1, Rat(k % 2 ? 1 : -1)));
      }
      return r;
    case RadialFn::chi:
      return radial_expand(RadialFn::g_factor, order) * radial_expand(RadialFn::log_factor, order) *
             Rat(1, 2);
    case RadialFn::h:
      for (int k = 0; k <= order; ++k) r.set(k, number(Rat(1) / factorial(static_cast<unsigned>(k + 1))));
      return r;
    case RadialFn::sigma:
      return radial_expand(RadialFn::h, order).sqrt();
    case RadialFn::xi: {
      RadialSeries ratio = radial_expand(RadialFn::log_factor, order);
      ratio.set(0, number(Rat(1)));
      return ratio.sqrt();
    }
    case RadialFn::p_radial:
      for (int k = 1; k <= order; ++k) r.set(k, number(Rat(k % 2 ? 1 : -1, 2 * k)));
      return r;
  }
  throw ContractError("radial_expand: unknown function");
}

Poly radial_to_poly(const RadialSeries& series, Ring ring, int site, int nu_shift) {
  if (site < 0 || site >= ring.sites) throw ContractError("radial_to_poly: unknown site");
  const Poly amplitude = Poly::variable(ring, Var::x(site)) * Poly::variable(ring, Var::x(site)) +
                         Poly::variable(ring, Var::y(site)) * Poly::variable(ring, Var::y(site));
  Poly result(ring);
  Poly power = Poly::constant(ring, Rat(1));
  for (int k = 0; k <= series.order() && 2 * k <= ring.max_degree; ++k) {
    if (k > 0) power *= amplitude;
    const Poly& c = series[k];
    if (c.is_zero()) continue;
    const int nu_exp = k + nu_shift;
    if (nu_exp < 0) throw ContractError("radial_to_poly: negative power of nu");
    for (const auto& [cm, cc] : c.terms()) {
      MIndex lifted(ring.sites);
      lifted.set_t(cm.t());
      lifted.set_param(Param::nu, cm.param(Param::nu) + nu_exp);
      lifted.set_param(Param::gamma, cm.param(Param::gamma));
      lifted.set_param(Param::eps, cm.param(Param::eps));
      result += Poly::monomial(ring, lifted, cc) * power;
    }
  }
  return result;
}

std::vector<double> numeric_coeffs(const RadialSeries& series) {
  std::vector<double> out;
  out.reserve(series.coeffs().size());
  for (int k = 0; k <= series.order(); ++k) out.push_back(series.constant_coeff(k).to_double());
  return out;
}

}  // namespace darboux
