#include "darboux/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "darboux/budget.hpp"
#include "darboux/error.hpp"
#include "darboux/lattice.hpp"
#include "darboux/lie.hpp"
#include "darboux/parallel.hpp"

namespace darboux::experiments {

namespace {

constexpr double kSlopeTolerance = 0.15;
constexpr double kGammaFlagRadius = 0.1;

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }
nlohmann::json optional_json(const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::string fmt_optional(const std::optional<double>& v, std::string_view missing) {
  return v ? fmt::format("{}", *v) : std::string(missing);
}

struct CellSpec {
  int K;
  std::optional<int> cap;
};

TruncationCell run_truncation_cell(const StudyConfig& cfg, const CellSpec& spec) {
  TruncationCell cell;
  cell.K = spec.K;
  cell.capped_L = spec.cap;
  cell.expected_degree = 2 * (spec.cap ? std::min(*spec.cap, spec.K) : spec.K) + 4;

  const lie::PTransform pt = lie::transform_P(spec.K, spec.cap, spec.K + 6);
  cell.min_degree = pt.min_phase_degree.value_or(0);
  cell.degree_ok = pt.min_phase_degree && cell.min_degree == cell.expected_degree;

  const ParamValues values{cfg.nu, 0.0, 0.0};
  auto residual_at = [&](double x, double y) {
    const double xs[1] = {x};
    const double ys[1] = {y};
    return std::abs(eval_point(pt.residual, xs, ys, values));
  };

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(spec.K), static_cast<std::uint32_t>(spec.cap.value_or(-1) + 1)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double theta0 = 2.0 * std::numbers::pi * unit(rng);

  cell.dominance_ok = true;
  cell.gamma_flag_ok = true;
  bool any_zero = false;
  for (double rho : cfg.rho_grid) {
    const double r = residual_at(rho * std::cos(theta0), rho * std::sin(theta0));
    any_zero = any_zero || r == 0.0;
    cell.residual.push_back(r);

    double sup = 0.0;
    for (int i = 0; i < cfg.budget_points; ++i) {
      const double radius = rho * std::sqrt(unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      sup = std::max(sup, residual_at(radius * std::cos(theta), radius * std::sin(theta)));
    }
    cell.sup_residual.push_back(sup);

    const budget::ErrorBudget b = budget::p_budget(cfg.nu, rho, spec.K, spec.cap, cfg.d);
    cell.bound.push_back(b.total_bound());
    cell.gamma.push_back(b.gamma);
    cell.below_gamma_star.push_back(b.below_gamma_star);
    cell.dominance_ok = cell.dominance_ok && sup <= b.total_bound();
    if (rho <= kGammaFlagRadius) cell.gamma_flag_ok = cell.gamma_flag_ok && b.below_gamma_star;
  }

  if (any_zero) {
    cell.slope_ok = pt.residual.is_zero();
  } else {
    cell.slope = fit_loglog(cfg.rho_grid, cell.residual).slope;
    cell.slope_ok = std::abs(*cell.slope - cell.min_degree) <= kSlopeTolerance;
  }
  cell.pass = cell.degree_ok && cell.slope_ok && cell.dominance_ok && cell.gamma_flag_ok;
  return cell;
}

ClosenessCell run_closeness_cell(const StudyConfig& cfg, Pair pair, double rho, const LatticeState& direction) {
  using lattice::ModelKind;
  ClosenessCell cell;
  cell.rho = rho;
  const bool al = pair == Pair::al_z0;
  cell.eps = al ? cfg.al_eps : rho * rho;
  cell.horizon = al ? 1.0 / cell.eps : 1.0 / (rho * rho + cell.eps);
  const double gamma = al ? 0.0 : cfg.gamma;
  const lattice::ModelParams a{al ? ModelKind::al : ModelKind::salerno, cfg.nu, gamma, cell.eps};
  const lattice::ModelParams b{pair == Pair::salerno_z1 ? ModelKind::z1 : ModelKind::z0, cfg.nu, gamma, cell.eps};
  try {
    const auto curve = lattice::compare_flows(a, b, lattice::scaled(direction, rho), cell.horizon,
                                              lattice::Transport::darboux, cfg.tol, cfg.samples);
    cell.max_deviation = curve.max;
  } catch (const IntegrationError& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

void StudyConfig::validate() const {
  if (rho_grid.size() < 3) throw ContractError("StudyConfig: rho_grid needs at least 3 radii");
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (!(rho_grid[i] > 0.0) || !std::isfinite(rho_grid[i])) throw ContractError("StudyConfig: radii must be positive");
    if (i > 0 && !(rho_grid[i] < rho_grid[i - 1])) {
      throw ContractError("StudyConfig: rho_grid must be strictly decreasing");
    }
  }
  for (int k : K_range) {
    if (k < 0 || k > 8) throw ContractError("StudyConfig: K must lie in [0, 8]");
  }
  if (L && *L < 1) throw ContractError("StudyConfig: L must be >= 1");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ContractError("StudyConfig: nu must be positive");
  if (!std::isfinite(gamma)) throw ContractError("StudyConfig: gamma must be finite");
  if (!(al_eps > 0.0) || !std::isfinite(al_eps)) throw ContractError("StudyConfig: al_eps must be positive");
  if (sites < 1) throw ContractError("StudyConfig: sites must be >= 1");
  if (budget_points < 1) throw ContractError("StudyConfig: budget_points must be >= 1");
  if (!(d > 0.0 && d < 1.0)) throw ContractError("StudyConfig: d must lie in (0, 1)");
  if (!(tol >= 1e-13 && tol <= 1e-6)) throw ContractError("StudyConfig: tol must lie in [1e-13, 1e-6]");
  if (samples < 2) throw ContractError("StudyConfig: samples must be >= 2");
  if (jobs < 0) throw ContractError("StudyConfig: jobs must be >= 0");
}

nlohmann::json to_json(const StudyConfig& c) {
  return nlohmann::json{{"K_range", c.K_range},
                        {"L", optional_json(c.L)},
                        {"rho_grid", c.rho_grid},
                        {"nu", c.nu},
                        {"gamma", c.gamma},
                        {"al_eps", c.al_eps},
                        {"seed", c.seed},
                        {"sites", c.sites},
                        {"budget_points", c.budget_points},
                        {"d", c.d},
                        {"tol", c.tol},
                        {"samples", c.samples},
                        {"jobs", c.jobs},
                        {"csv_out", c.csv_out},
                        {"json_out", c.json_out}};
}

StudyConfig config_from_json(const nlohmann::json& j, StudyConfig c) {
  if (!j.is_object()) throw ContractError("study config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "K_range") c.K_range = v.get<std::vector<int>>();
      else if (key == "L") c.L = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (key == "rho_grid") c.rho_grid = v.get<std::vector<double>>();
      else if (key == "nu") c.nu = v.get<double>();
      else if (key == "gamma") c.gamma = v.get<double>();
      else if (key == "al_eps") c.al_eps = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "sites") c.sites = v.get<int>();
      else if (key == "budget_points") c.budget_points = v.get<int>();
      else if (key == "d") c.d = v.get<double>();
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "samples") c.samples = v.get<int>();
      else if (key == "jobs") c.jobs = v.get<int>();
      else if (key == "csv_out") c.csv_out = v.get<std::string>();
      else if (key == "json_out") c.json_out = v.get<std::string>();
      else throw ContractError("study config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("study config: ") + e.what());
  }
  return c;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("fit_loglog: need >= 2 paired values");
  const auto n = static_cast<double>(x.size());
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ContractError("fit_loglog: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ContractError("fit_loglog: abscissae must not all coincide");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < lx.size(); ++i) fit.residuals.push_back(ly[i] - (fit.intercept + fit.slope * lx[i]));
  return fit;
}

TruncationReport truncation_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<CellSpec> specs;
  for (int k : cfg.K_range) specs.push_back({k, std::nullopt});
  if (cfg.L) {
    for (int k : cfg.K_range) specs.push_back({k, cfg.L});
  }
  TruncationReport report;
  report.config = cfg;
  report.cells = parallel_map<TruncationCell>(resolve_jobs(cfg.jobs), specs.size(),
                                              [&](std::size_t i) { return run_truncation_cell(cfg, specs[i]); });
  report.pass = std::all_of(report.cells.begin(), report.cells.end(), [](const auto& c) { return c.pass; });
  return report;
}

std::string_view to_string(Pair p) {
  switch (p) {
    case Pair::salerno_z0: return "salerno-z0";
    case Pair::salerno_z1: return "salerno-z1";
    case Pair::al_z0: return "al-z0";
  }
  return "?";
}

std::optional<Pair> pair_from_string(std::string_view name) {
  for (Pair p : {Pair::salerno_z0, Pair::salerno_z1, Pair::al_z0}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::pair<double, double> exponent_window(Pair p) {
  return p == Pair::salerno_z1 ? std::pair{4.5, 5.5} : std::pair{2.7, 3.3};
}

ClosenessReport closeness_scaling(const StudyConfig& cfg, Pair pair) {
  cfg.validate();
  const LatticeState direction = lattice::random_direction(cfg.sites, Boundary::periodic, cfg.seed);
  ClosenessReport report;
  report.config = cfg;
  report.pair = pair;
  std::tie(report.window_lo, report.window_hi) = exponent_window(pair);
  report.cells = parallel_map<ClosenessCell>(resolve_jobs(cfg.jobs), cfg.rho_grid.size(), [&](std::size_t i) {
    return run_closeness_cell(cfg, pair, cfg.rho_grid[i], direction);
  });

  std::vector<double> rho;
  std::vector<double> dev;
  bool all_ok = true;
  for (const auto& c : report.cells) {
    if (c.max_deviation && *c.max_deviation > 0.0) {
      rho.push_back(c.rho);
      dev.push_back(*c.max_deviation);
    } else {
      all_ok = false;
    }
  }
  if (rho.size() >= 2) report.fit = fit_loglog(rho, dev);
  report.pass = all_ok && report.fit && report.fit->slope >= report.window_lo && report.fit->slope <= report.window_hi;
  return report;
}

std::string to_csv(const TruncationReport& r) {
  std::string out = "K,min_degree,slope,capped_L\n";
  for (const auto& c : r.cells) {
    out += fmt::format("{},{},{},{}\n", c.K, c.min_degree, fmt_optional(c.slope, "exact"),
                       c.capped_L ? std::to_string(*c.capped_L) : std::string());
  }
  return out;
}

std::string to_csv(const ClosenessReport& r) {
  std::string out = "rho,eps,horizon,max_deviation\n";
  for (const auto& c : r.cells) {
    out += fmt::format("{},{},{},{}\n", c.rho, c.eps, c.horizon, fmt_optional(c.max_deviation, "nan"));
  }
  return out;
}

nlohmann::json to_json(const TruncationReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"K", c.K},
                     {"capped_L", optional_json(c.capped_L)},
                     {"min_degree", c.min_degree},
                     {"expected_degree", c.expected_degree},
                     {"slope", optional_json(c.slope)},
                     {"residual", c.residual},
                     {"sup_residual", c.sup_residual},
                     {"bound", c.bound},
                     {"gamma", c.gamma},
                     {"below_gamma_star", c.below_gamma_star},
                     {"degree_ok", c.degree_ok},
                     {"slope_ok", c.slope_ok},
                     {"dominance_ok", c.dominance_ok},
                     {"gamma_flag_ok", c.gamma_flag_ok},
                     {"pass", c.pass}});
  }
  return {{"config", to_json(r.config)}, {"study", "truncation"}, {"cells", cells}, {"pass", r.pass}};
}

nlohmann::json to_json(const ClosenessReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json cell{{"rho", c.rho},
                        {"eps", c.eps},
                        {"horizon", c.horizon},
                        {"max_deviation", optional_json(c.max_deviation)}};
    if (!c.error.empty()) cell["error"] = c.error;
    cells.push_back(std::move(cell));
  }
  nlohmann::json fit;
  if (r.fit) fit = {{"slope", r.fit->slope}, {"intercept", r.fit->intercept}, {"residuals", r.fit->residuals}};
  return {{"config", to_json(r.config)},
          {"study", "closeness"},
          {"pair", std::string(to_string(r.pair))},
          {"window", {r.window_lo, r.window_hi}},
          {"cells", cells},
          {"fit", fit},
          {"pass", r.pass}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << content;
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace darboux::experiments
