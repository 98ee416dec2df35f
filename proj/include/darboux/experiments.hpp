#pragma once

// Quantitative studies: the truncated-series remainder law for P and the
// flow-closeness exponents between the lattices and their normal forms.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace darboux::experiments {

struct StudyConfig {
  std::vector<int> K_range{1, 2, 3, 4, 5, 6};
  std::optional<int> L;  ///< field cap for the capped truncation rows
  std::vector<double> rho_grid{0.2, 0.1, 0.05, 0.025};
  double nu = 0.5;
  double gamma = 1.0;
  double al_eps = 0.5;  ///< fixed eps of the AL pair; Salerno pairs use eps = rho^2
  std::uint64_t seed = 1;
  int sites = 8;
  int budget_points = 100;
  double d = 0.25;
  double tol = 1e-12;
  int samples = 201;
  int jobs = 1;
  std::string csv_out;
  std::string json_out;

  /// rho_grid strictly decreasing, positive, length >= 3; K in [0, 8]; and so on.
  void validate() const;
};

nlohmann::json to_json(const StudyConfig& cfg);
/// Overlays the keys present in `j` on `base`; unknown keys are an error.
StudyConfig config_from_json(const nlohmann::json& j, StudyConfig base = {});

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

/// Least-squares line through (log x_i, log y_i). Requires >= 2 positive pairs.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct TruncationCell {
  int K = 0;
  std::optional<int> capped_L;
  int min_degree = 0;       ///< exact, from the symbolic residual
  int expected_degree = 0;  ///< 2 min(L, K) + 4
  std::optional<double> slope;  ///< unset when the residual vanishes identically
  std::vector<double> residual;      ///< |residual| at radius rho_i
  std::vector<double> sup_residual;  ///< sup over random points of the disc of radius rho_i
  std::vector<double> bound;         ///< budget bound at rho_i
  std::vector<double> gamma;
  std::vector<bool> below_gamma_star;
  bool degree_ok = false;
  bool slope_ok = false;
  bool dominance_ok = false;
  bool gamma_flag_ok = false;  ///< Gamma < Gamma* wherever rho <= 0.1
  bool pass = false;
};

struct TruncationReport {
  StudyConfig config;
  std::vector<TruncationCell> cells;
  bool pass = false;
};

/// One uncapped row per K, plus a capped row per K when cfg.L is set.
TruncationReport truncation_study(const StudyConfig& cfg);

enum class Pair { salerno_z0, salerno_z1, al_z0 };

std::string_view to_string(Pair p);
std::optional<Pair> pair_from_string(std::string_view name);

struct ClosenessCell {
  double rho = 0.0;
  double eps = 0.0;
  double horizon = 0.0;
  std::optional<double> max_deviation;  ///< unset when the integration failed
  std::string error;
};

struct ClosenessReport {
  StudyConfig config;
  Pair pair = Pair::salerno_z0;
  std::vector<ClosenessCell> cells;
  std::optional<LogLogFit> fit;
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool pass = false;
};

/// Target exponent window of a pair.
std::pair<double, double> exponent_window(Pair p);

ClosenessReport closeness_scaling(const StudyConfig& cfg, Pair pair);

/// Header "K,min_degree,slope,capped_L".
std::string to_csv(const TruncationReport& r);
/// Header "rho,eps,horizon,max_deviation".
std::string to_csv(const ClosenessReport& r);
nlohmann::json to_json(const TruncationReport& r);
nlohmann::json to_json(const ClosenessReport& r);

/// Writes `content` to `path`; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace darboux::experiments
