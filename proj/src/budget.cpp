#include "darboux/budget.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "darboux/error.hpp"
#include "darboux/lie.hpp"

namespace darboux::budget {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ContractError(std::string("error_budget: ") + name + " must be positive");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ContractError(std::string("error_budget: ") + name + " must be nonnegative");
  }
}

}  // namespace

double gamma_star() { return std::numbers::e / (1.0 + std::numbers::e * std::numbers::e); }

double ErrorBudget::total_bound() const { return truncation_bound + field_truncation_bound.value_or(0.0); }

ErrorBudget error_budget(const BudgetInputs& in) {
  require_nonnegative(in.f_majorant, "f_majorant");
  require_nonnegative(in.X_majorant, "X_majorant");
  require_positive(in.rho, "rho");
  require_positive(in.delta, "delta");
  require_positive(in.T, "T");
  if (!(in.d1 > 0.0 && in.d1 < 1.0) || !(in.d2 > 0.0 && in.d2 < 1.0)) {
    throw ContractError("error_budget: d1 and d2 must lie in (0, 1)");
  }
  if (in.K < 0) throw ContractError("error_budget: K must be >= 0");
  if (in.Y_majorant) require_nonnegative(*in.Y_majorant, "Y_majorant");

  ErrorBudget b;
  b.inputs = in;
  b.gamma = 1.0 / (in.d1 * in.delta) + in.X_majorant / (in.d2 * in.rho);
  b.gamma_star = gamma_star();
  b.below_gamma_star = b.gamma < b.gamma_star;
  b.convergence_warning = b.gamma >= 1.0 / std::numbers::e;
  const double x = std::numbers::e * b.gamma;
  b.truncation_bound = std::pow(x, in.K + 1) * in.f_majorant;
  if (in.Y_majorant) {
    b.gamma3 = *in.Y_majorant / (in.d2 * in.rho);
    b.field_truncation_bound = x < 1.0 ? *b.gamma3 * in.f_majorant * (1.0 + x / ((1.0 - x) * (1.0 - x)))
                                       : std::numeric_limits<double>::infinity();
  }
  return b;
}

double default_delta(double nu, double rho) {
  require_positive(nu, "nu");
  require_positive(rho, "rho");
  return 1.0 / (2.0 * nu * rho * rho);
}

PMajorants p_majorants(double nu, double rho, int s_order, std::optional<int> cap_L) {
  require_positive(nu, "nu");
  require_positive(rho, "rho");
  if (s_order < 1) throw ContractError("p_majorants: s_order must be >= 1");
  const ExactParams exact{Rat::from_double(nu), std::nullopt, std::nullopt};

  PMajorants out;
  out.f = majorant_norm(substitute_params(lie::p_poly(Ring{1, 2 * s_order}), exact), rho);

  const Ring ring{1, 2 * s_order + 1};
  const Poly x = Poly::variable(ring, Var::x(0));
  const Poly y = Poly::variable(ring, Var::y(0));
  auto field_norm = [&](const RadialSeries& chi) {
    const Poly c = substitute_params(radial_to_poly(chi, ring, 0), exact);
    return majorant_norm(c * x, rho, 1.0) + majorant_norm(c * y, rho, 1.0);
  };
  const RadialSeries chi = moser::build_moser_field(s_order).chi;
  out.X = field_norm(chi);
  if (cap_L) {
    RadialSeries tail = chi;
    for (int k = 0; k <= std::min(*cap_L, s_order); ++k) tail.set(k, Poly(kCoefficientRing));
    out.Y = field_norm(tail);
  }
  return out;
}

ErrorBudget p_budget(double nu, double rho, int K, std::optional<int> cap_L, double d) {
  const PMajorants m = p_majorants(nu, rho, K + 6, cap_L);
  const double delta = default_delta(nu, rho);
  return error_budget(BudgetInputs{m.f, m.X, rho, delta, delta, d, d, K, m.Y});
}

nlohmann::json to_json(const ErrorBudget& b) {
  nlohmann::json j;
  j["inputs"] = {{"f_majorant", b.inputs.f_majorant}, {"X_majorant", b.inputs.X_majorant},
                 {"rho", b.inputs.rho},               {"delta", b.inputs.delta},
                 {"T", b.inputs.T},                   {"d1", b.inputs.d1},
                 {"d2", b.inputs.d2},                 {"K", b.inputs.K}};
  j["inputs"]["Y_majorant"] = b.inputs.Y_majorant ? nlohmann::json(*b.inputs.Y_majorant) : nlohmann::json();
  j["gamma"] = b.gamma;
  j["gamma3"] = b.gamma3 ? nlohmann::json(*b.gamma3) : nlohmann::json();
  j["gamma_star"] = b.gamma_star;
  j["below_gamma_star"] = b.below_gamma_star;
  j["convergence_warning"] = b.convergence_warning;
  j["truncation_bound"] = b.truncation_bound;
  j["field_truncation_bound"] =
      b.field_truncation_bound ? nlohmann::json(*b.field_truncation_bound) : nlohmann::json();
  return j;
}

}  // namespace darboux::budget
