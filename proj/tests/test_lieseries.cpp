#include <doctest.h>

#include <cmath>
#include <numbers>

#include "darboux/budget.hpp"
#include "darboux/error.hpp"
#include "darboux/lie.hpp"
#include "support.hpp"

using namespace darboux;
using namespace darboux::lie;
using testing::amplitude_power;
using testing::Gen;

namespace {

Poly X(Ring r, int j = 0) { return Poly::variable(r, Var::x(j)); }
Poly Y(Ring r, int j = 0) { return Poly::variable(r, Var::y(j)); }
Poly Par(Ring r, Param p) { return Poly::parameter(r, p); }

Poly amp_sum(Ring r, int k) {
  Poly out(r);
  for (int j = 0; j < r.sites; ++j) out += amplitude_power(r, j, k);
  return out;
}

Poly bond_sum(Ring r) {
  Poly out(r);
  for (int j = 0; j < r.sites; ++j) {
    const int k = (j + 1) % r.sites;
    out += X(r, k) * X(r, j) + Y(r, k) * Y(r, j);
  }
  return out;
}

// sum_j A_j ((x_{j+1}+x_{j-1}) x_j + (y_{j+1}+y_{j-1}) y_j)
Poly coupled_sum(Ring r) {
  Poly out(r);
  const int n = r.sites;
  for (int j = 0; j < n; ++j) {
    const int up = (j + 1) % n;
    const int dn = (j + n - 1) % n;
    out += amplitude_power(r, j, 1) * ((X(r, up) + X(r, dn)) * X(r, j) + (Y(r, up) + Y(r, dn)) * Y(r, j));
  }
  return out;
}

Poly z0(Ring r) { return Rat(1, 8) * Par(r, Param::gamma) * amp_sum(r, 2) + Par(r, Param::eps) * bond_sum(r); }

Poly z1(Ring r) {
  const Poly nu = Par(r, Param::nu);
  return z0(r) + Rat(1, 24) * Par(r, Param::gamma) * nu * amp_sum(r, 3) +
         Rat(1, 4) * Par(r, Param::eps) * nu * coupled_sum(r);
}

}  // namespace

TEST_SUITE("lie_derivative") {
  TEST_CASE("constants and time") {
    const Ring r{1, 4};
    const ExtendedField field = ExtendedField::moser(1);
    CHECK(lie_derivative(Poly::constant(r, Rat(3, 7)), field).is_zero());
    CHECK(lie_derivative(Poly::variable(r, Var::t()), field) == Poly::constant(r, Rat(1)));
  }

  TEST_CASE("half amplitude under the order-1 field") {
    const Ring r{1, 4};
    const Poly half = Rat(1, 2) * amplitude_power(r, 0, 1);
    const Poly expected = Rat(-1, 4) * Par(r, Param::nu) * amplitude_power(r, 0, 2);
    CHECK(lie_derivative(half, ExtendedField::moser(1)) == expected);

    // Oracle: term-by-term differentiation with the multiplier written out.
    const Poly multiplier = Rat(-1, 4) * Par(r, Param::nu) * amplitude_power(r, 0, 1);
    const Poly by_hand = multiplier * (X(r) * diff(half, Var::x(0)) + Y(r) * diff(half, Var::y(0)));
    CHECK(lie_derivative(half, ExtendedField::moser(1)) == by_hand);
  }

  TEST_CASE("insufficient field order names the requirement") {
    const Ring r{1, 8};
    try {
      (void)lie_derivative(amplitude_power(r, 0, 1), ExtendedField::moser(1));
      FAIL("expected a ContractError");
    } catch (const ContractError& e) {
      CHECK(std::string(e.what()).find("required order >= 3") != std::string::npos);
    }
    // A cap below the required order is a legitimate truncation.
    CHECK_NOTHROW((void)lie_derivative(amplitude_power(r, 0, 1), ExtendedField::moser(1, 1)));
    CHECK_THROWS_AS(ExtendedField::moser(3, -1), ContractError);
  }
}

TEST_SUITE("exp_trunc") {
  TEST_CASE("K = 0 is the identity") {
    Gen g(3);
    const Ring r{2, 5};
    for (int i = 0; i < 20; ++i) {
      const Poly f = g.poly(r, 5, 6, 0, true);
      CHECK(exp_trunc(f, ExtendedField::moser(2), 0, LieSign::minus, Rat(1)) == f);
    }
  }

  TEST_CASE("transformed P through s^3") {
    const Ring r{1, 6};
    const Poly nu = Par(r, Param::nu);
    const Poly got = exp_trunc(p_poly(r), ExtendedField::moser(3), 1, LieSign::minus, Rat(1));
    const Poly expected = Rat(1, 2) * amplitude_power(r, 0, 1) - Rat(1, 4) * nu * nu * amplitude_power(r, 0, 3);
    CHECK(got == expected);
  }

  TEST_CASE("coordinate flow cubic term") {
    const Ring r{1, 3};
    const Poly nu = Par(r, Param::nu);
    for (const Rat tau : {Rat(0), Rat(1)}) {
      const Poly qx = exp_trunc(X(r), ExtendedField::moser(1), 1, LieSign::plus, tau);
      const Poly qy = exp_trunc(Y(r), ExtendedField::moser(1), 1, LieSign::plus, tau);
      CHECK(homogeneous_part(qx, 3) == Rat(-1, 4) * nu * amplitude_power(r, 0, 1) * X(r));
      CHECK(homogeneous_part(qy, 3) == Rat(-1, 4) * nu * amplitude_power(r, 0, 1) * Y(r));
      CHECK(homogeneous_part(qx, 1) == X(r));
    }
  }

  TEST_CASE("negative K") { CHECK_THROWS_AS(lie_series(X(Ring{1, 3}), ExtendedField::moser(1), -1, LieSign::plus), ContractError); }
}

TEST_SUITE("transform_P") {
  TEST_CASE("K = 0 leaves P's own tail") {
    const PTransform p = transform_P(0, std::nullopt, 6);
    CHECK(p.series.constant_coeff(1) == Rat(0));
    CHECK(p.series.constant_coeff(2) == Rat(1, 4));
    CHECK(p.min_s_degree == 2);
    CHECK(p.min_phase_degree == 4);
  }

  TEST_CASE("K = 1") {
    const PTransform p = transform_P(1, std::nullopt, 7);
    CHECK(p.series.constant_coeff(3) == Rat(1, 4));
    CHECK(p.min_phase_degree == 6);
  }

  TEST_CASE("capped field saturates at degree 12") {
    CHECK(transform_P(6, 4, 12).min_phase_degree == 12);
    CHECK(transform_P(4, 4, 10).min_phase_degree == 12);
    CHECK(transform_P(3, 4, 9).min_phase_degree == 10);
  }

  TEST_CASE("s-order precondition") { CHECK_THROWS_AS(transform_P(3, std::nullopt, 5), ContractError); }

  TEST_CASE("residual degree law") {
    for (int K = 0; K <= 6; ++K) {
      const PTransform p = transform_P(K, std::nullopt, K + 4);
      CHECK(p.min_s_degree == K + 2);
      CHECK(p.min_phase_degree == 2 * K + 4);
    }
  }
}

TEST_SUITE("transform_H") {
  TEST_CASE("K = 0 gives the dNLS Hamiltonian") {
    const Ring r{3, 4};
    CHECK(transform_H(Model::salerno, 0, 1, 4, 3) == z0(r));
    CHECK(transform_H(Model::al, 0, 1, 4, 3) == Par(r, Param::eps) * bond_sum(r));
  }

  TEST_CASE("K = 1, L = 1 gives the cubic-quintic normal form") {
    const Ring r{3, 6};
    const Poly h = transform_H(Model::salerno, 1, 1, 6, 3);
    CHECK(h == z1(r));
    const SiteDecomposition d = per_site_decomposition(h);
    CHECK(d.remainder.is_zero());
    CHECK(format_per_site(d).find("1/24*nu*gamma*(x_j^2+y_j^2)^3") != std::string::npos);
  }

  TEST_CASE("larger lattices agree site by site") {
    const Ring r{5, 6};
    CHECK(transform_H(Model::salerno, 1, 1, 6, 5) == z1(r));
  }

  TEST_CASE("quintic self-term assembly") {
    const Ring r{3, 6};
    const Poly gamma = Par(r, Param::gamma);
    const Poly nu = Par(r, Param::nu);
    const Poly h = hamiltonian_poly(Model::salerno, r);
    CHECK(homogeneous_part(h, 6) == Rat(-1, 12) * gamma * nu * amp_sum(r, 3));
    const Poly h04 = homogeneous_part(h, 4);
    const Poly correction = -lie_derivative(h04, ExtendedField::moser(1, 1));
    CHECK(homogeneous_part(correction, 6) == Rat(1, 8) * gamma * nu * amp_sum(r, 3));
    CHECK(homogeneous_part(homogeneous_part(h, 6) + correction, 6) == Rat(1, 24) * gamma * nu * amp_sum(r, 3));
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(transform_H(Model::salerno, 1, 1, 6, 2), ContractError);
    CHECK_THROWS_AS(transform_H(Model::salerno, 1, 0, 6, 3), ContractError);
    CHECK_THROWS_AS(transform_H(Model::salerno, 1, 1, 1, 3), ContractError);
  }

  TEST_CASE("fixed-boundary Hamiltonian drops the wrap bond") {
    const Ring r{3, 2};
    const Poly open = hamiltonian_poly(Model::al, r, Boundary::fixed);
    CHECK(open == Par(r, Param::eps) * (X(r, 1) * X(r, 0) + Y(r, 1) * Y(r, 0) + X(r, 2) * X(r, 1) + Y(r, 2) * Y(r, 1)));
  }
}

TEST_SUITE("lie properties") {
  TEST_CASE("linearity") {
    Gen g(11);
    const Ring r{2, 6};
    const ExtendedField field = ExtendedField::moser(2);
    for (int i = 0; i < 100; ++i) {
      const Poly f = g.poly(r, 6, 5, 2, true);
      const Poly h = g.poly(r, 6, 5, 2, true);
      const Rat a = g.rational();
      const Rat b = g.rational();
      CHECK(lie_derivative(a * f + b * h, field) == a * lie_derivative(f, field) + b * lie_derivative(h, field));
    }
  }

  TEST_CASE("Leibniz") {
    Gen g(12);
    const Ring r{2, 6};
    const ExtendedField field = ExtendedField::moser(2);
    for (int i = 0; i < 100; ++i) {
      const Poly f = g.poly(r, 3, 4, 2, true);
      const Poly h = g.poly(r, 4, 4, 2, true);
      CHECK(lie_derivative(f * h, field) == f * lie_derivative(h, field) + h * lie_derivative(f, field));
    }
  }

  TEST_CASE("near-inversion of truncated series") {
    Gen g(13);
    for (int i = 0; i < 30; ++i) {
      const int df = 2 * g.integer(1, 3);
      const int K = g.integer(1, 3);
      const Ring r{1, df + 6};
      const Poly f = g.rational() * amplitude_power(r, 0, df / 2);
      const ExtendedField field = ExtendedField::moser((df + 5) / 2);
      const Poly back = lie_series(lie_series(f, field, K, LieSign::plus), field, K, LieSign::minus);
      const auto deg = (back - f).min_phase_degree();
      if (deg) CHECK(*deg >= df + 2);
    }
  }

  TEST_CASE("normal forms commute with the norm") {
    for (const Model m : {Model::salerno, Model::al}) {
      for (int K = 0; K <= 2; ++K) {
        const Poly h = transform_H(m, K, 1, 6, 3);
        CHECK(standard_bracket(h, Rat(1, 2) * amp_sum(h.ring(), 1)).is_zero());
      }
    }
  }
}

TEST_SUITE("error_budget") {
  using namespace darboux::budget;

  TEST_CASE("gamma star") { CHECK(gamma_star() == doctest::Approx(0.324027).epsilon(1e-6)); }

  TEST_CASE("field-free case") {
    BudgetInputs in;
    in.f_majorant = 2.0;
    in.X_majorant = 0.0;
    in.rho = 0.1;
    in.delta = in.T = 100.0;
    in.K = 2;
    const ErrorBudget b = error_budget(in);
    CHECK(b.gamma == doctest::Approx(1.0 / 25.0));
    CHECK(b.truncation_bound == doctest::Approx(std::pow(std::numbers::e / 25.0, 3) * 2.0));
    CHECK(b.below_gamma_star);
    CHECK_FALSE(b.convergence_warning);
    CHECK_FALSE(b.gamma3.has_value());
    CHECK(b.total_bound() == b.truncation_bound);
  }

  TEST_CASE("field tail and warning") {
    BudgetInputs in;
    in.f_majorant = 1.0;
    in.X_majorant = 1.0;
    in.rho = 1.0;
    in.delta = in.T = 1.0;
    in.Y_majorant = 0.5;
    const ErrorBudget b = error_budget(in);
    CHECK(b.gamma == doctest::Approx(8.0));
    CHECK(*b.gamma3 == doctest::Approx(2.0));
    CHECK(b.convergence_warning);
    CHECK_FALSE(b.below_gamma_star);
    CHECK(b.total_bound() > b.truncation_bound);
  }

  TEST_CASE("invalid inputs") {
    BudgetInputs in{1.0, 0.0, 0.1, 1.0, 1.0, 0.25, 0.25, 1, std::nullopt};
    CHECK_NOTHROW(error_budget(in));
    auto bad = in;
    bad.rho = -1;
    CHECK_THROWS_AS(error_budget(bad), ContractError);
    bad = in;
    bad.d1 = 1.0;
    CHECK_THROWS_AS(error_budget(bad), ContractError);
    bad = in;
    bad.K = -1;
    CHECK_THROWS_AS(error_budget(bad), ContractError);
    bad = in;
    bad.X_majorant = -0.1;
    CHECK_THROWS_AS(error_budget(bad), ContractError);
  }

  TEST_CASE("default domain shrinks gamma with rho") {
    CHECK(default_delta(0.5, 0.1) == doctest::Approx(100.0));
    double prev = INFINITY;
    for (double rho : {0.2, 0.1, 0.05}) {
      const ErrorBudget b = p_budget(0.5, rho, 1, std::nullopt);
      CHECK(b.gamma < prev);
      CHECK(b.gamma <= 40.0 * 0.5 * rho * rho / 0.25);
      prev = b.gamma;
    }
    CHECK(p_budget(0.5, 0.1, 2, 1).gamma3.has_value());
  }

  TEST_CASE("json record") {
    const auto j = to_json(p_budget(0.5, 0.1, 1, std::nullopt));
    CHECK(j.contains("gamma"));
    CHECK(j.contains("truncation_bound"));
    CHECK(j.at("below_gamma_star").get<bool>());
  }
}
