// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include <fmt/core.h>

#include "darboux/experiments.hpp"
#include "darboux/lattice.hpp"
#include "darboux/lie.hpp"
#include "darboux/moser.hpp"
#include "support.hpp"

using namespace darboux;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  fmt::print("[{}] {:>2} {}: {} ({:.2f} s, limit {:.0f} s{})\n", pass ? "PASS" : "FAIL", n, title, o.detail, secs,
             limit_s, in_time ? "" : ", too slow");
  std::fflush(stdout);
}

Poly var(Ring r, Var v) { return Poly::variable(r, v); }
Poly par(Ring r, Param p) { return Poly::parameter(r, p); }

// Per-site blocks of the normal forms, built directly from their definitions.
Poly normal_form(Ring r, bool with_quintic) {
  const int n = r.sites;
  const Poly gamma = par(r, Param::gamma);
  const Poly eps = par(r, Param::eps);
  const Poly nu = par(r, Param::nu);
  Poly z(r);
  for (int j = 0; j < n; ++j) {
    const int up = (j + 1) % n;
    const int dn = (j + n - 1) % n;
    const Poly xj = var(r, Var::x(j)), yj = var(r, Var::y(j));
    const Poly a = xj * xj + yj * yj;
    const Poly bond = var(r, Var::x(up)) * xj + var(r, Var::y(up)) * yj;
    z += Rat(1, 8) * gamma * a * a + eps * bond;
    if (with_quintic) {
      const Poly c = (var(r, Var::x(up)) + var(r, Var::x(dn))) * xj + (var(r, Var::y(up)) + var(r, Var::y(dn))) * yj;
      z += Rat(1, 24) * gamma * nu * a * a * a + Rat(1, 4) * eps * nu * a * c;
    }
  }
  return z;
}

LatticeState disc_point(std::mt19937_64& rng, double rho) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = rho * std::sqrt(u(rng));
  const double th = 2.0 * M_PI * u(rng);
  return LatticeState({r * std::cos(th)}, {r * std::sin(th)}, Boundary::fixed);
}

experiments::StudyConfig study(std::optional<int> L) {
  experiments::StudyConfig cfg;
  cfg.L = L;
  cfg.seed = 1;
  cfg.jobs = 0;
  return cfg;
}

std::string list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

int main() {
  criterion(1, "cubic-quintic normal form reproduced exactly", 60, [] {
    const Poly h = lie::transform_H(lie::Model::salerno, 1, 1, 6, 3);
    const Poly diff = low_degree_part(h, 6) - normal_form(Ring{3, 6}, true);
    return Outcome{diff.is_zero(), fmt::format("{} differing terms", diff.size())};
  });

  criterion(2, "K=0 degree-4 transform is the dNLS Hamiltonian", 10, [] {
    const Poly h = lie::transform_H(lie::Model::salerno, 0, 1, 4, 3);
    const Poly diff = h - normal_form(Ring{3, 4}, false);
    return Outcome{diff.is_zero(), fmt::format("{} differing terms", diff.size())};
  });

  criterion(3, "remainder degree 2K+4 and log-log slope within 0.15", 120, [] {
    const auto r = experiments::truncation_study(study(std::nullopt));
    bool ok = !r.cells.empty();
    std::vector<int> degrees;
    std::string slopes;
    for (const auto& c : r.cells) {
      ok = ok && c.degree_ok && c.slope_ok;
      degrees.push_back(c.min_degree);
      slopes += fmt::format("{}{:.3f}", slopes.empty() ? "" : ",", c.slope.value_or(NAN));
    }
    return Outcome{ok, "degrees " + list(degrees) + ", slopes " + slopes};
  });

  criterion(4, "capped field L=4 saturates at degree 12", 120, [] {
    experiments::StudyConfig cfg = study(4);
    cfg.budget_points = 1;
    const auto r = experiments::truncation_study(cfg);
    std::vector<int> degrees;
    for (const auto& c : r.cells) {
      if (c.capped_L) degrees.push_back(c.min_degree);
    }
    return Outcome{degrees == std::vector<int>{6, 8, 10, 12, 12, 12}, "capped degrees " + list(degrees)};
  });

  criterion(5, "Darboux pullback residual below 1e-10", 5, [] {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (double nu : {0.25, 0.5, 1.0}) {
      for (int i = 0; i < 100; ++i) {
        worst = std::max(worst, moser::verify_pullback({moser::Direction::inverse, nu}, disc_point(rng, 0.3)));
      }
    }
    return Outcome{worst < 1e-10, fmt::format("max residual {:.3e}", worst)};
  });

  criterion(6, "time-one flow equals the forward map; cubic flow coefficient -nu/4", 30, [] {
    std::mt19937_64 rng(6);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const LatticeState p = disc_point(rng, 0.2);
      const LatticeState flowed = moser::flow_V_numeric(p, 0.5, 1.0, 1e-10);
      worst = std::max(worst, distance(flowed, moser::darboux_apply({moser::Direction::forward, 0.5}, p)));
    }
    const Ring r{1, 3};
    const Poly x = var(r, Var::x(0)), y = var(r, Var::y(0));
    const Poly qx = lie::exp_trunc(x, lie::ExtendedField::moser(1), 1, lie::LieSign::plus, Rat(0));
    const bool exact = homogeneous_part(qx, 3) == Rat(-1, 4) * par(r, Param::nu) * (x * x + y * y) * x;
    return Outcome{worst < 1e-8 && exact, fmt::format("max distance {:.3e}, coefficient {}", worst,
                                                      exact ? "-nu/4" : "wrong")};
  });

  criterion(7, "AL trajectory: P equals the forward-mapped half norm, H and P conserved", 60, [] {
    const lattice::ModelParams p{lattice::ModelKind::al, 0.5, 0.0, 0.05};
    const LatticeState s0 = lattice::scaled(lattice::random_direction(8, Boundary::periodic, 7), 0.1);
    const auto tr = lattice::integrate(p, s0, 1.0 / p.eps, 1e-12, 401);
    double conj = 0.0, dh = 0.0, dp = 0.0;
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      const LatticeState fwd = moser::darboux_apply({moser::Direction::forward, p.nu}, tr.states[i]);
      conj = std::max(conj, std::abs(tr.P_values[i] - lattice::half_norm(fwd)));
      dh = std::max(dh, std::abs(tr.H_values[i] / tr.H_values[0] - 1.0));
      dp = std::max(dp, std::abs(tr.P_values[i] / tr.P_values[0] - 1.0));
    }
    return Outcome{conj < 1e-10 && dh < 1e-8 && dp < 1e-8,
                   fmt::format("conjugacy {:.2e}, H drift {:.2e}, P drift {:.2e}", conj, dh, dp)};
  });

  criterion(8, "flow-closeness exponents inside their windows", 600, [] {
    experiments::StudyConfig cfg;
    cfg.rho_grid = {0.2, 0.1, 0.05};
    cfg.jobs = 0;
    bool ok = true;
    std::string detail;
    for (const auto pair : {experiments::Pair::salerno_z0, experiments::Pair::salerno_z1, experiments::Pair::al_z0}) {
      const auto r = experiments::closeness_scaling(cfg, pair);
      ok = ok && r.pass;
      detail += fmt::format("{}{} {} in [{}, {}]", detail.empty() ? "" : "; ", experiments::to_string(pair),
                            r.fit ? fmt::format("{:.3f}", r.fit->slope) : "n/a", r.window_lo, r.window_hi);
    }
    return Outcome{ok, detail};
  });

  criterion(9, "error budget dominates every residual; Gamma < Gamma* for rho <= 0.1", 60, [] {
    const auto r = experiments::truncation_study(study(std::nullopt));
    bool ok = !r.cells.empty();
    double worst_ratio = 0.0;
    for (const auto& c : r.cells) {
      ok = ok && c.dominance_ok && c.gamma_flag_ok;
      for (std::size_t i = 0; i < c.bound.size(); ++i) {
        worst_ratio = std::max(worst_ratio, c.sup_residual[i] / c.bound[i]);
      }
    }
    return Outcome{ok, fmt::format("{} cells, max residual/bound {:.3e}", r.cells.size(), worst_ratio)};
  });

  criterion(10, "algebra properties on randomized cases", 30, [] {
    testing::Gen gen(10);
    const Ring r{1, 8};
    int cases = 0;
    int bad[4] = {0, 0, 0, 0};
    for (int i = 0; i < 300; ++i, ++cases) {
      const Poly a = gen.poly(r, 5, 5), b = gen.poly(r, 5, 5), c = gen.poly(r, 5, 5);
      const bool ok = a + b == b + a && a * b == b * a && (a * b) * c == a * (b * c) && a * (b + c) == a * b + a * c &&
                      testing::table_of(a * b) == testing::brute_product(a, b);
      bad[0] += !ok;
    }
    for (int i = 0; i < 300; ++i, ++cases) {
      const Poly a = gen.poly(r, 4, 5), b = gen.poly(r, 4, 5);
      bool ok = true;
      for (Var v : {Var::x(0), Var::y(0), Var::t()}) ok = ok && diff(a * b, v) == a * diff(b, v) + diff(a, v) * b;
      bad[1] += !ok;
    }
    for (int i = 0; i < 300; ++i, ++cases) {
      const Poly a = gen.poly(r, 6, 6), b = gen.poly(r, 6, 6);
      const int d = gen.integer(0, 8);
      bad[2] += !(with_degree(a * b, d) == with_degree(a, d) * with_degree(b, d));
    }
    for (int i = 0; i < 200; ++i, ++cases) {
      const int order = gen.integer(1, 12);
      const RadialSeries chi = radial_expand(RadialFn::chi, order);
      const RadialSeries lf = radial_expand(RadialFn::log_factor, order);
      const bool exact = chi == radial_expand(RadialFn::g_factor, order) * lf * Rat(1, 2) &&
                         testing::series_of(lf) == testing::log_factor_oracle(order);
      const double s = gen.real(0.0, 0.05), t = gen.real(0.0, 1.0);
      const bool numeric = std::abs(chi.evaluate(s, {}, t) - moser::chi(t, s)) <= std::pow(s, order + 1) + 1e-15;
      bad[3] += !(exact && numeric);
    }
    const int failed = bad[0] + bad[1] + bad[2] + bad[3];
    return Outcome{failed == 0 && cases >= 1000,
                   fmt::format("{} cases, {} failed (ring {}, Leibniz {}, truncation {}, radial {})", cases, failed,
                               bad[0], bad[1], bad[2], bad[3])};
  });

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
