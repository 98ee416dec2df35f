#include "darboux/moser.hpp"

#include <array>
#include <cmath>

#include "darboux/error.hpp"
#include "darboux/ode.hpp"

namespace darboux::moser {

namespace {

constexpr int kBranchOrder = 6;
constexpr double kMaxRadial = 10.0;

struct TaylorBranch {
  std::vector<double> log_factor = numeric_coeffs(radial_expand(RadialFn::log_factor, kBranchOrder));
  std::vector<double> sigma = numeric_coeffs(radial_expand(RadialFn::sigma, kBranchOrder));
  std::vector<double> xi = numeric_coeffs(radial_expand(RadialFn::xi, kBranchOrder));
  std::vector<double> h = numeric_coeffs(radial_expand(RadialFn::h, kBranchOrder));
};

const TaylorBranch& branch() {
  static const TaylorBranch b;
  return b;
}

double horner(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

double horner_derivative(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) v = v * s + static_cast<double>(k) * c[k];
  return v;
}

}  // namespace

double log_factor(double s) {
  if (std::abs(s) < kSeriesThreshold) return horner(branch().log_factor, s);
  return std::log1p(s) / s - 1.0;
}

double chi(double t, double s) { return (1.0 + s) / (2.0 * (1.0 + t * s)) * log_factor(s); }

double sigma(double s) {
  if (std::abs(s) < kSeriesThreshold) return horner(branch().sigma, s);
  return std::sqrt(std::expm1(s) / s);
}

double sigma_prime(double s) {
  if (std::abs(s) < kSeriesThreshold) return horner_derivative(branch().sigma, s);
  const double h_prime = (std::exp(s) * (s - 1.0) + 1.0) / (s * s);
  return h_prime / (2.0 * sigma(s));
}

double xi(double s) {
  if (std::abs(s) < kSeriesThreshold) return horner(branch().xi, s);
  return std::sqrt(std::log1p(s) / s);
}

double h_function(double rho) {
  const double s = rho * rho;
  if (s < kSeriesThreshold) return horner(branch().h, s);
  return std::expm1(s) / s;
}

double h_derivative(double rho) {
  const double s = rho * rho;
  if (s < kSeriesThreshold) return 2.0 * rho * horner_derivative(branch().h, s);
  return 2.0 * rho * (std::exp(s) * (s - 1.0) + 1.0) / (s * s);
}

RadialSeries build_vector_potential(int order) {
  if (order < 1) throw ContractError("build_vector_potential: order must be >= 1");
  return radial_expand(RadialFn::log_factor, order) * Rat(1, 2);
}

std::pair<Poly, Poly> vector_potential_poly(int order) {
  const Ring ring{1, 2 * order + 1};
  const Poly c = radial_to_poly(build_vector_potential(order), ring, 0);
  const Poly q = Poly::variable(ring, Var::x(0));
  const Poly p = Poly::variable(ring, Var::y(0));
  return {-(c * p), c * q};
}

Poly curl_residual(int order) {
  const auto [a1, a2] = vector_potential_poly(order);
  const Ring ring = a1.ring();
  // nu A / (1 + nu A) = sum_{k>=1} (-1)^{k+1} s^k
  RadialSeries rhs(order);
  for (int k = 1; k <= order; ++k) rhs.set(k, Poly::constant(kCoefficientRing, Rat(k % 2 ? 1 : -1)));
  Poly residual = diff(a1, Var::y(0)) - diff(a2, Var::x(0)) - radial_to_poly(rhs, ring, 0);
  return low_degree_part(residual, 2 * order);
}

MoserField build_moser_field(int order) {
  if (order < 1) throw ContractError("build_moser_field: order must be >= 1");
  // Omega_t = (t + (1-t)/(1+s)) J, so Omega_t^{-T} = g J with g = (1+s)/(1+ts);
  // J applied to c (-p, q) gives c (q, p).
  RadialSeries chi = radial_expand(RadialFn::g_factor, order) * build_vector_potential(order);
  return MoserField{std::move(chi), true, std::nullopt};
}

LatticeState darboux_apply(const DarbouxMap& map, const LatticeState& state) {
  state.validate();
  LatticeState out = state;
  for (int j = 0; j < state.sites(); ++j) {
    const double s = map.nu * state.amplitude(j);
    if (s >= kMaxRadial) throw ContractError("darboux_apply: radial variable outside the supported range");
    const double factor = map.direction == Direction::forward ? xi(s) : sigma(s);
    out.x[static_cast<std::size_t>(j)] *= factor;
    out.y[static_cast<std::size_t>(j)] *= factor;
  }
  return out;
}

double verify_pullback(const DarbouxMap& map, const LatticeState& state) {
  state.validate();
  double worst = 0.0;
  for (int j = 0; j < state.sites(); ++j) {
    const double x = state.x[static_cast<std::size_t>(j)];
    const double y = state.y[static_cast<std::size_t>(j)];
    const double s = map.nu * (x * x + y * y);
    const double sg = sigma(s);
    const double dsg = sigma_prime(s);
    // D = sigma I + 2 nu sigma' (x,y)^T (x,y)
    const std::array<std::array<double, 2>, 2> d{{
        {sg + 2.0 * map.nu * dsg * x * x, 2.0 * map.nu * dsg * x * y},
        {2.0 * map.nu * dsg * y * x, sg + 2.0 * map.nu * dsg * y * y},
    }};
    const double q = sg * x;
    const double p = sg * y;
    const double w = 1.0 / (1.0 + map.nu * (q * q + p * p));
    const std::array<std::array<double, 2>, 2> omega{{{0.0, w}, {-w, 0.0}}};
    const std::array<std::array<double, 2>, 2> j_std{{{0.0, 1.0}, {-1.0, 0.0}}};
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        double v = 0.0;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) v += d[a][r] * omega[a][b] * d[b][c];
        }
        worst = std::max(worst, std::abs(v - j_std[r][c]));
      }
    }
  }
  return worst;
}

LatticeState flow_V_numeric(const LatticeState& state0, double nu, double t_end, double tol) {
  state0.validate();
  const int n = state0.sites();
  auto rhs = [nu, n](const ode::State& z, ode::State& dz, double t) {
    for (int j = 0; j < n; ++j) {
      const auto iq = static_cast<std::size_t>(j);
      const auto ip = static_cast<std::size_t>(n + j);
      const double c = chi(t, nu * (z[iq] * z[iq] + z[ip] * z[ip]));
      dz[iq] = c * z[iq];
      dz[ip] = c * z[ip];
    }
  };
  return LatticeState::unpack(ode::flow(rhs, state0.packed(), 0.0, t_end, tol), state0.bc);
}

HOdeCheck check_h_ode() {
  // rho * residual = 2 s h_s + 2 (1 - s) h - 2 with s = rho^2; through rho^8.
  constexpr int kOrder = 4;
  const RadialSeries h = radial_expand(RadialFn::h, kOrder);
  Rat series_max(0);
  for (int k = 0; k <= kOrder; ++k) {
    Rat c = Rat(2 * k) * h.constant_coeff(k) + Rat(2) * h.constant_coeff(k);
    if (k > 0) c -= Rat(2) * h.constant_coeff(k - 1);
    if (k == 0) c -= Rat(2);
    series_max = std::max(series_max, c.abs());
  }

  double numeric_max = 0.0;
  for (int i = 0; i <= 45; ++i) {
    const double rho = 0.05 + 0.01 * i;
    const double r = h_derivative(rho) + (2.0 / rho) * (1.0 - rho * rho) * h_function(rho) - 2.0 / rho;
    numeric_max = std::max(numeric_max, std::abs(r));
  }
  return HOdeCheck{series_max, numeric_max};
}

}  // namespace darboux::moser
