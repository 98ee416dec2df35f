#pragma once

// Cauchy-estimate error budget for truncated Lie series: convergence
// aggregates and the resulting a-priori remainder bounds.

#include <optional>

#include <json.hpp>

namespace darboux::budget {

/// e / (1 + e^2): above it the series at t = +-1 is not guaranteed.
double gamma_star();

struct BudgetInputs {
  double f_majorant = 0.0;
  double X_majorant = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  double T = 0.0;
  double d1 = 0.25;
  double d2 = 0.25;
  int K = 0;
  std::optional<double> Y_majorant;  ///< norm of the dropped field tail
};

struct ErrorBudget {
  BudgetInputs inputs;
  double gamma = 0.0;                 ///< 1/(d1 delta) + |X|/(d2 rho)
  std::optional<double> gamma3;       ///< |Y|/(d2 rho)
  double gamma_star = 0.0;
  bool below_gamma_star = false;
  bool convergence_warning = false;   ///< gamma >= 1/e
  double truncation_bound = 0.0;      ///< (e gamma)^{K+1} |f|
  std::optional<double> field_truncation_bound;  ///< gamma3 |f| (1 + sum_k k (e gamma)^k)

  /// truncation_bound plus the field-truncation bound when present.
  double total_bound() const;
};

/// Validates and evaluates the budget. Positive reals and 0 < d1, d2 < 1 required.
ErrorBudget error_budget(const BudgetInputs& in);

/// delta = T = 1/(2 nu rho^2)
double default_delta(double nu, double rho);

/// Majorants of P (single site), of the Moser field and of its tail past
/// degree 2L+1, with nu substituted and t ranging over the unit disc.
struct PMajorants {
  double f = 0.0;
  double X = 0.0;
  std::optional<double> Y;
};
PMajorants p_majorants(double nu, double rho, int s_order, std::optional<int> cap_L);

/// Budget for transforming P with the default domain (delta = T, d1 = d2 = d).
ErrorBudget p_budget(double nu, double rho, int K, std::optional<int> cap_L, double d = 0.25);

nlohmann::json to_json(const ErrorBudget& b);

}  // namespace darboux::budget
