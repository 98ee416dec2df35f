#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "darboux/budget.hpp"
#include "darboux/error.hpp"
#include "darboux/experiments.hpp"
#include "darboux/lattice.hpp"
#include "darboux/lie.hpp"
#include "darboux/moser.hpp"
#include "darboux/parallel.hpp"

namespace darboux::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { integer, real, seed, text, flag, int_list, real_list };

struct ParamDef {
  std::string key;
  Kind kind;
  json fallback;  ///< null means unset
  std::string help;
  std::vector<std::string> choices = {};
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  int verbosity = 0;
  int jobs = 0;
  bool ci = false;

  void info(const std::string& msg) const {
    if (verbosity >= 1) err << "[info] " << msg << '\n';
  }
  void warn(const std::string& msg) const { err << "[warn] " << msg << '\n'; }
};

struct Command {
  std::string name;
  std::string help;
  std::vector<ParamDef> params;
  bool randomized = false;
  std::function<int(const json&, const Context&)> run;
};

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

json convert_scalar(const ParamDef& p, const std::string& raw) {
  const std::string where = flag_name(p.key) + ": ";
  try {
    std::size_t used = 0;
    switch (p.kind) {
      case Kind::integer:
      case Kind::int_list: {
        const int v = std::stoi(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::real:
      case Kind::real_list: {
        const double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::seed: {
        if (!raw.empty() && raw.front() == '-') break;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != raw.size()) break;
        return static_cast<std::uint64_t>(v);
      }
      case Kind::text:
        if (!p.choices.empty() && std::find(p.choices.begin(), p.choices.end(), raw) == p.choices.end()) {
          throw UsageError(where + "'" + raw + "' is not one of " + fmt::format("{}", fmt::join(p.choices, ", ")));
        }
        return raw;
      case Kind::flag:
        return raw == "true" || raw == "1";
    }
  } catch (const std::logic_error&) {
  }
  throw UsageError(where + "cannot parse '" + raw + "'");
}

std::string type_name(Kind k) {
  switch (k) {
    case Kind::integer:
    case Kind::int_list: return "INT";
    case Kind::real:
    case Kind::real_list: return "FLOAT";
    case Kind::seed: return "UINT";
    default: return "TEXT";
  }
}

/// Checks a value from a config file against the parameter's type.
void check_value(const ParamDef& p, const json& v) {
  const std::string where = "config key '" + p.key + "': ";
  if (v.is_null()) return;
  auto fail = [&] { throw UsageError(where + "unexpected value " + v.dump()); };
  switch (p.kind) {
    case Kind::integer:
      if (!v.is_number_integer()) fail();
      break;
    case Kind::real:
      if (!v.is_number()) fail();
      break;
    case Kind::seed:
      if (!v.is_number_unsigned()) fail();
      break;
    case Kind::text:
      if (!v.is_string()) fail();
      convert_scalar(p, v.get<std::string>());
      break;
    case Kind::flag:
      if (!v.is_boolean()) fail();
      break;
    case Kind::int_list:
    case Kind::real_list:
      if (!v.is_array()) fail();
      for (const auto& e : v) {
        if (p.kind == Kind::int_list ? !e.is_number_integer() : !e.is_number()) fail();
      }
      break;
  }
}

template <typename T>
std::optional<T> get_optional(const json& cfg, const std::string& key) {
  const json& v = cfg.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

std::uint64_t resolve_seed(const json& cfg, const Context& ctx) {
  if (cfg.at("seed").is_null()) {
    if (ctx.ci) throw UsageError("--seed is mandatory for randomized commands in --ci mode");
    ctx.info(fmt::format("no seed given, using {}", kDefaultSeed));
    return kDefaultSeed;
  }
  return cfg.at("seed").get<std::uint64_t>();
}

void emit(const Context& ctx, const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    ctx.out << content;
  } else {
    experiments::write_file(path, content);
    ctx.info("wrote " + path);
  }
}

lattice::ModelKind model_of(const json& cfg, const std::string& key) {
  return *lattice::model_from_string(cfg.at(key).get<std::string>());
}

Boundary bc_of(const json& cfg) { return *boundary_from_string(cfg.at("bc").get<std::string>()); }

// ---------------------------------------------------------------- commands

int run_normal_form(const json& cfg, const Context& ctx) {
  const auto model = cfg.at("model").get<std::string>() == "al" ? lie::Model::al : lie::Model::salerno;
  const int K = cfg.at("K").get<int>();
  const int L = cfg.at("L").get<int>();
  const int degree = cfg.at("degree").get<int>();
  const int sites = cfg.at("sites").get<int>();
  if (K < 0) throw ContractError("normal-form: K must be >= 0");
  ctx.info(fmt::format("transforming H with K={} L={} degree={} sites={}", K, L, degree, sites));

  const Poly h = lie::transform_H(model, K, L, degree, sites);
  const lie::SiteDecomposition d = lie::per_site_decomposition(h);
  const std::string formula = lie::format_per_site(d);
  json doc{{"model", cfg.at("model")}, {"K", K},           {"L", L},
           {"degree", degree},         {"sites", sites},   {"per_site", formula},
           {"remainder_terms", d.remainder.size()}, {"poly", to_json(h)}};
  if (cfg.at("json").get<bool>()) {
    ctx.out << doc.dump(2) << '\n';
  } else {
    ctx.out << formula << '\n';
  }
  const auto path = cfg.at("out").get<std::string>();
  if (!path.empty()) experiments::write_file(path, doc.dump(2) + "\n");
  return 0;
}

int run_verify_darboux(const json& cfg, const Context& ctx) {
  const double nu = cfg.at("nu").get<double>();
  const double rho = cfg.at("rho").get<double>();
  const int samples = cfg.at("samples").get<int>();
  const double tol = cfg.at("tol").get<double>();
  if (!(nu > 0.0)) throw ContractError("verify-darboux: nu must be positive");
  if (!(rho > 0.0)) throw ContractError("verify-darboux: rho must be positive");
  if (samples < 1) throw ContractError("verify-darboux: samples must be >= 1");
  const std::uint64_t seed = resolve_seed(cfg, ctx);

  const moser::DarbouxMap map{moser::Direction::inverse, nu};
  const auto residuals = parallel_map<double>(resolve_jobs(ctx.jobs), static_cast<std::size_t>(samples),
                                              [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = rho * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    return moser::verify_pullback(map, LatticeState({r * std::cos(theta)}, {r * std::sin(theta)}));
  });
  const double worst = *std::max_element(residuals.begin(), residuals.end());
  const bool pass = worst < tol;
  json doc{{"max_residual", worst}, {"samples", samples}, {"pass", pass},
           {"nu", nu},              {"rho", rho},         {"tol", tol}, {"seed", seed}};
  ctx.out << doc.dump(2) << '\n';
  return pass ? 0 : 1;
}

experiments::StudyConfig study_config(const json& cfg, const Context& ctx) {
  experiments::StudyConfig s;
  if (cfg.contains("K")) s.K_range = cfg.at("K").get<std::vector<int>>();
  if (cfg.contains("L")) s.L = get_optional<int>(cfg, "L");
  s.rho_grid = cfg.at("rho_grid").get<std::vector<double>>();
  s.nu = cfg.at("nu").get<double>();
  if (cfg.contains("gamma")) s.gamma = cfg.at("gamma").get<double>();
  if (cfg.contains("al_eps")) s.al_eps = cfg.at("al_eps").get<double>();
  if (cfg.contains("sites")) s.sites = cfg.at("sites").get<int>();
  if (cfg.contains("budget_points")) s.budget_points = cfg.at("budget_points").get<int>();
  if (cfg.contains("d")) s.d = cfg.at("d").get<double>();
  if (cfg.contains("tol")) s.tol = cfg.at("tol").get<double>();
  if (cfg.contains("samples")) s.samples = cfg.at("samples").get<int>();
  s.csv_out = cfg.at("csv").get<std::string>();
  s.json_out = cfg.at("json").get<std::string>();
  s.seed = resolve_seed(cfg, ctx);
  s.jobs = ctx.jobs;
  s.validate();
  return s;
}

int run_truncation_study(const json& cfg, const Context& ctx) {
  const experiments::StudyConfig s = study_config(cfg, ctx);
  const auto report = experiments::truncation_study(s);
  for (const auto& c : report.cells) {
    ctx.info(fmt::format("K={} L={} min_degree={} slope={} pass={}", c.K, c.capped_L ? std::to_string(*c.capped_L) : "-",
                         c.min_degree, c.slope ? fmt::format("{:.4f}", *c.slope) : "exact", c.pass));
  }
  if (!s.csv_out.empty()) experiments::write_file(s.csv_out, experiments::to_csv(report));
  emit(ctx, s.json_out, to_json(report).dump(2) + "\n");
  return report.pass ? 0 : 1;
}

std::string with_suffix(const std::string& path, std::string_view suffix) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_" + std::string(suffix);
  return path.substr(0, dot) + "_" + std::string(suffix) + path.substr(dot);
}

int run_closeness_scaling(const json& cfg, const Context& ctx) {
  const experiments::StudyConfig s = study_config(cfg, ctx);
  const auto which = cfg.at("pair").get<std::string>();
  std::vector<experiments::Pair> pairs;
  if (which == "all") {
    pairs = {experiments::Pair::salerno_z0, experiments::Pair::salerno_z1, experiments::Pair::al_z0};
  } else {
    pairs = {*experiments::pair_from_string(which)};
  }
  json reports = json::array();
  bool pass = true;
  for (auto pair : pairs) {
    const auto report = experiments::closeness_scaling(s, pair);
    for (const auto& c : report.cells) {
      if (!c.error.empty()) ctx.warn(fmt::format("{} rho={}: {}", to_string(pair), c.rho, c.error));
    }
    ctx.info(fmt::format("{}: exponent {} pass={}", to_string(pair),
                         report.fit ? fmt::format("{:.4f}", report.fit->slope) : "n/a", report.pass));
    if (!s.csv_out.empty()) {
      const std::string path = pairs.size() == 1 ? s.csv_out : with_suffix(s.csv_out, to_string(pair));
      experiments::write_file(path, experiments::to_csv(report));
    }
    reports.push_back(to_json(report));
    pass = pass && report.pass;
  }
  const json doc = pairs.size() == 1 ? reports.front() : json{{"reports", reports}, {"pass", pass}};
  emit(ctx, s.json_out, doc.dump(2) + "\n");
  return pass ? 0 : 1;
}

lattice::ModelParams model_params(const json& cfg, lattice::ModelKind kind, bool any_al, double eps) {
  const auto gamma = get_optional<double>(cfg, "gamma");
  return lattice::ModelParams{kind, cfg.at("nu").get<double>(), gamma.value_or(any_al ? 0.0 : 1.0), eps};
}

int run_simulate(const json& cfg, const Context& ctx) {
  const auto kind = model_of(cfg, "model");
  const auto params = model_params(cfg, kind, kind == lattice::ModelKind::al, cfg.at("eps").get<double>());
  params.validate();
  const int sites = cfg.at("sites").get<int>();
  const double rho = cfg.at("rho").get<double>();
  if (!(rho >= 0.0)) throw ContractError("simulate: rho must be >= 0");
  const auto state0 =
      lattice::scaled(lattice::random_direction(sites, bc_of(cfg), resolve_seed(cfg, ctx)), rho);
  const auto tr = lattice::integrate(params, state0, cfg.at("t_end").get<double>(), cfg.at("tol").get<double>(),
                                     cfg.at("samples").get<int>());

  std::string csv = "t";
  for (int j = 0; j < sites; ++j) csv += fmt::format(",x_{}", j);
  for (int j = 0; j < sites; ++j) csv += fmt::format(",y_{}", j);
  csv += ",H,P_or_norm\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    csv += fmt::format("{}", tr.times[i]);
    for (double v : tr.states[i].x) csv += fmt::format(",{}", v);
    for (double v : tr.states[i].y) csv += fmt::format(",{}", v);
    const double second = params.nonstandard_bracket() ? tr.P_values[i] : tr.norm_values[i];
    csv += fmt::format(",{},{}\n", tr.H_values[i], second);
  }
  emit(ctx, cfg.at("out").get<std::string>(), csv);
  return 0;
}

int run_compare_flows(const json& cfg, const Context& ctx) {
  const auto kind_a = model_of(cfg, "model_a");
  const auto kind_b = model_of(cfg, "model_b");
  const bool any_al = kind_a == lattice::ModelKind::al || kind_b == lattice::ModelKind::al;
  const auto transport = *lattice::transport_from_string(cfg.at("transport").get<std::string>());
  const auto rho_grid = cfg.at("rho_grid").get<std::vector<double>>();
  const auto fixed_eps = get_optional<double>(cfg, "eps");
  const auto fixed_horizon = get_optional<double>(cfg, "horizon");
  const LatticeState u = lattice::random_direction(cfg.at("sites").get<int>(), bc_of(cfg), resolve_seed(cfg, ctx));

  json cells = json::array();
  std::vector<double> rhos;
  std::vector<double> devs;
  for (double rho : rho_grid) {
    if (!(rho > 0.0)) throw ContractError("compare-flows: radii must be positive");
    const double eps = fixed_eps.value_or(rho * rho);
    const double horizon = fixed_horizon.value_or(1.0 / (rho * rho + eps));
    const auto curve = lattice::compare_flows(model_params(cfg, kind_a, any_al, eps),
                                              model_params(cfg, kind_b, any_al, eps), lattice::scaled(u, rho),
                                              horizon, transport, cfg.at("tol").get<double>(),
                                              cfg.at("samples").get<int>());
    cells.push_back({{"rho", rho}, {"eps", eps}, {"horizon", horizon}, {"max_deviation", curve.max}});
    if (curve.max > 0.0) {
      rhos.push_back(rho);
      devs.push_back(curve.max);
    }
  }
  json doc{{"model_a", cfg.at("model_a")}, {"model_b", cfg.at("model_b")}, {"transport", cfg.at("transport")},
           {"cells", cells}, {"fit", nullptr}};
  if (rhos.size() >= 2) {
    const auto fit = experiments::fit_loglog(rhos, devs);
    doc["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"residuals", fit.residuals}};
  }
  emit(ctx, cfg.at("json").get<std::string>(), doc.dump(2) + "\n");
  return 0;
}

int run_error_budget(const json& cfg, const Context& ctx) {
  const double nu = cfg.at("nu").get<double>();
  const double rho = cfg.at("rho").get<double>();
  const int K = cfg.at("K").get<int>();
  const auto L = get_optional<int>(cfg, "L");
  budget::BudgetInputs in;
  in.rho = rho;
  in.K = K;
  in.d1 = cfg.at("d1").get<double>();
  in.d2 = cfg.at("d2").get<double>();
  in.delta = get_optional<double>(cfg, "delta").value_or(budget::default_delta(nu, rho));
  in.T = get_optional<double>(cfg, "T").value_or(in.delta);
  if (cfg.at("from_P").get<bool>()) {
    if (K < 0) throw ContractError("error-budget: K must be >= 0");
    const auto m = budget::p_majorants(nu, rho, K + 6, L);
    in.f_majorant = m.f;
    in.X_majorant = m.X;
    in.Y_majorant = m.Y;
  } else {
    const auto f = get_optional<double>(cfg, "f_majorant");
    const auto x = get_optional<double>(cfg, "X_majorant");
    if (!f || !x) throw UsageError("error-budget: give --f-majorant and --X-majorant, or --from-P");
    in.f_majorant = *f;
    in.X_majorant = *x;
    in.Y_majorant = get_optional<double>(cfg, "Y_majorant");
  }
  const auto b = budget::error_budget(in);
  if (b.convergence_warning) ctx.warn(fmt::format("Gamma = {} >= 1/e: the series at t = +-1 is not guaranteed", b.gamma));
  ctx.out << budget::to_json(b).dump(2) << '\n';
  return 0;
}

std::vector<Command> commands() {
  const std::vector<std::string> lattice_models{"dnls", "al", "salerno", "z0", "z1"};
  const std::vector<std::string> bcs{"periodic", "fixed"};
  const json default_grid{0.2, 0.1, 0.05, 0.025};
  const json closeness_grid{0.2, 0.1, 0.05};
  return {
      {"normal-form",
       "Exact normal form of the Salerno/AL Hamiltonian on a periodic ring",
       {{"model", Kind::text, "salerno", "salerno or al", {"salerno", "al"}},
        {"K", Kind::integer, 1, "Lie-series truncation order"},
        {"L", Kind::integer, 1, "field cap: Taylor degree 2L+1"},
        {"degree", Kind::integer, 6, "phase-degree truncation"},
        {"sites", Kind::integer, 3, "number of periodic sites (>= 3)"},
        {"json", Kind::flag, false, "print the JSON document instead of the per-site formula"},
        {"out", Kind::text, "", "also write the JSON document to this file"}},
       false,
       run_normal_form},
      {"verify-darboux",
       "Pullback residual of the standard form through the inverse map at random points",
       {{"nu", Kind::real, 0.5, "radial coupling nu"},
        {"rho", Kind::real, 0.3, "ball radius"},
        {"samples", Kind::integer, 100, "number of random points"},
        {"seed", Kind::seed, nullptr, "RNG seed"},
        {"tol", Kind::real, 1e-10, "pass threshold"}},
       true,
       run_verify_darboux},
      {"truncation-study",
       "Remainder degree and log-log slope of the truncated transform of P",
       {{"K", Kind::int_list, json{1, 2, 3, 4, 5, 6}, "truncation orders"},
        {"L", Kind::integer, nullptr, "field cap for the additional capped rows"},
        {"rho_grid", Kind::real_list, default_grid, "decreasing radii"},
        {"nu", Kind::real, 0.5, "radial coupling nu"},
        {"budget_points", Kind::integer, 100, "random points per radius for the budget check"},
        {"d", Kind::real, 0.25, "domain restriction d1 = d2"},
        {"seed", Kind::seed, nullptr, "RNG seed"},
        {"csv", Kind::text, "", "CSV table path"},
        {"json", Kind::text, "", "JSON report path (stdout when empty)"}},
       true,
       run_truncation_study},
      {"closeness-scaling",
       "Deviation exponent between a lattice flow and its normal form",
       {{"pair", Kind::text, "all", "salerno-z0, salerno-z1, al-z0 or all",
         {"salerno-z0", "salerno-z1", "al-z0", "all"}},
        {"rho_grid", Kind::real_list, closeness_grid, "decreasing radii"},
        {"nu", Kind::real, 0.5, "radial coupling nu"},
        {"gamma", Kind::real, 1.0, "on-site coupling of the Salerno pairs"},
        {"al_eps", Kind::real, 0.5, "fixed eps of the AL pair"},
        {"sites", Kind::integer, 8, "number of sites"},
        {"tol", Kind::real, 1e-12, "integrator tolerance"},
        {"samples", Kind::integer, 201, "comparison times per run"},
        {"seed", Kind::seed, nullptr, "RNG seed of the initial direction"},
        {"csv", Kind::text, "", "CSV path (per-pair suffix for 'all')"},
        {"json", Kind::text, "", "JSON report path (stdout when empty)"}},
       true,
       run_closeness_scaling},
      {"simulate",
       "Integrate one lattice model from a seeded random state",
       {{"model", Kind::text, "salerno", "dnls, al, salerno, z0 or z1", lattice_models},
        {"nu", Kind::real, 0.5, "radial coupling nu"},
        {"gamma", Kind::real, nullptr, "on-site coupling (default 1, or 0 for al)"},
        {"eps", Kind::real, 0.1, "hopping eps"},
        {"sites", Kind::integer, 8, "number of sites"},
        {"bc", Kind::text, "periodic", "periodic or fixed", bcs},
        {"rho", Kind::real, 0.1, "norm of the initial state"},
        {"seed", Kind::seed, nullptr, "RNG seed of the initial direction"},
        {"t_end", Kind::real, 10.0, "final time"},
        {"tol", Kind::real, 1e-10, "integrator tolerance"},
        {"samples", Kind::integer, 201, "output rows"},
        {"out", Kind::text, "", "CSV path (stdout when empty)"}},
       true,
       run_simulate},
      {"compare-flows",
       "Maximal deviation between two model flows over a radius grid",
       {{"model_a", Kind::text, "salerno", "first model", lattice_models},
        {"model_b", Kind::text, "z0", "second model", lattice_models},
        {"transport", Kind::text, "darboux", "none or darboux", {"none", "darboux"}},
        {"rho_grid", Kind::real_list, closeness_grid, "radii"},
        {"nu", Kind::real, 0.5, "radial coupling nu"},
        {"gamma", Kind::real, nullptr, "on-site coupling (default 1, or 0 when al is involved)"},
        {"eps", Kind::real, nullptr, "hopping eps (default rho^2 per radius)"},
        {"horizon", Kind::real, nullptr, "time horizon (default 1/(rho^2+eps))"},
        {"sites", Kind::integer, 8, "number of sites"},
        {"bc", Kind::text, "periodic", "periodic or fixed", bcs},
        {"tol", Kind::real, 1e-12, "integrator tolerance"},
        {"samples", Kind::integer, 201, "comparison times"},
        {"seed", Kind::seed, nullptr, "RNG seed of the initial direction"},
        {"json", Kind::text, "", "JSON report path (stdout when empty)"}},
       true,
       run_compare_flows},
      {"error-budget",
       "Convergence aggregates and remainder bounds of a truncated Lie series",
       {{"f_majorant", Kind::real, nullptr, "norm of the transformed function"},
        {"X_majorant", Kind::real, nullptr, "norm of the generating field"},
        {"Y_majorant", Kind::real, nullptr, "norm of the dropped field tail"},
        {"from_P", Kind::flag, false, "compute the three norms for P and the Moser field"},
        {"nu", Kind::real, 0.5, "radial coupling nu (default domain and --from-P)"},
        {"rho", Kind::real, 0.1, "polydisk radius"},
        {"delta", Kind::real, nullptr, "time-domain radius (default 1/(2 nu rho^2))"},
        {"T", Kind::real, nullptr, "time window (default delta)"},
        {"d1", Kind::real, 0.25, "time-domain restriction"},
        {"d2", Kind::real, 0.25, "phase-domain restriction"},
        {"K", Kind::integer, 1, "truncation order"},
        {"L", Kind::integer, nullptr, "field cap (with --from-P)"}},
       false,
       run_error_budget},
  };
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::vector<Command> cmds = commands();

  CLI::App app{"Darboux coordinates and normal forms for Ablowitz-Ladik and Salerno lattices", "darboux"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  bool dump_config = false;
  bool ci = false;
  int verbosity = 0;
  std::optional<int> jobs_flag;
  app.add_option("--config", config_path, std::string("JSON config file (default: $") + kConfigEnv + ")");
  app.add_flag("--dump-config", dump_config, "print the effective configuration as JSON and exit");
  app.add_flag("--ci", ci, "CI mode: randomized commands require --seed");
  app.add_flag("-v,--verbose", verbosity, "more diagnostics on stderr (repeatable)");
  app.add_option("--jobs", jobs_flag, "worker threads (0: one per logical core)");

  std::vector<std::map<std::string, std::vector<std::string>>> raw(cmds.size());
  std::vector<std::map<std::string, CLI::Option*>> opts(cmds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    CLI::App* sub = app.add_subcommand(cmds[c].name, cmds[c].help);
    subs.push_back(sub);
    for (const auto& p : cmds[c].params) {
      std::string desc = p.help;
      if (!p.fallback.is_null() && p.kind != Kind::flag) desc += " [" + p.fallback.dump() + "]";
      if (p.kind == Kind::flag) {
        opts[c][p.key] = sub->add_flag(flag_name(p.key))->description(desc);
      } else {
        CLI::Option* o = sub->add_option(flag_name(p.key), raw[c][p.key], desc);
        o->type_name(type_name(p.kind));
        if (p.kind == Kind::int_list || p.kind == Kind::real_list) {
          o->delimiter(',')->expected(1, CLI::detail::expected_max_vector_size);
        } else {
          o->expected(1);
        }
        opts[c][p.key] = o;
      }
    }
  }

  if (args.empty()) {
    err << app.help();
    return 2;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << "\n" << app.help();
    return 2;
  }

  std::size_t index = 0;
  while (index < subs.size() && !subs[index]->parsed()) ++index;
  const Command& cmd = cmds[index];

  Context ctx{out, err, verbosity, 0, ci};
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') config_path = env;
    }

    json effective = json::object();
    for (const auto& p : cmd.params) effective[p.key] = p.fallback;
    json jobs = 0;

    if (!config_path.empty()) {
      ctx.info("reading config " + config_path);
      const json file = read_config_file(config_path);
      for (const auto& [key, v] : file.items()) {
        if (key == "command") {
          if (v != cmd.name) throw UsageError("config file is for command " + v.dump() + ", not '" + cmd.name + "'");
          continue;
        }
        if (key == "jobs") {
          if (!v.is_number_integer()) throw UsageError("config key 'jobs' must be an integer");
          jobs = v;
          continue;
        }
        const auto it = std::find_if(cmd.params.begin(), cmd.params.end(), [&](const auto& p) { return p.key == key; });
        if (it == cmd.params.end()) throw UsageError("config key '" + key + "' is not a parameter of " + cmd.name);
        check_value(*it, v);
        effective[key] = v;
      }
    }

    for (const auto& p : cmd.params) {
      CLI::Option* o = opts[index].at(p.key);
      if (o->count() == 0) continue;
      if (p.kind == Kind::flag) {
        effective[p.key] = true;
      } else if (p.kind == Kind::int_list || p.kind == Kind::real_list) {
        json list = json::array();
        for (const auto& s : raw[index][p.key]) list.push_back(convert_scalar(p, s));
        effective[p.key] = list;
      } else {
        effective[p.key] = convert_scalar(p, raw[index][p.key].back());
      }
    }
    if (jobs_flag) jobs = *jobs_flag;
    if (jobs.get<int>() < 0) throw UsageError("--jobs must be >= 0");
    ctx.jobs = jobs.get<int>();

    if (dump_config) {
      json dumped{{"command", cmd.name}, {"jobs", jobs}};
      dumped.update(effective);
      out << dumped.dump(2) << '\n';
      return 0;
    }
    if (ci && cmd.randomized && effective.at("seed").is_null()) {
      throw UsageError("--seed is mandatory for " + cmd.name + " in --ci mode");
    }
    return cmd.run(effective, ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << subs[index]->help();
    return 2;
  } catch (const ContractError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return 2;
  } catch (const IntegrationError& e) {
    err << "integration failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace darboux::cli
