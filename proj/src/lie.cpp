#include "darboux/lie.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "darboux/error.hpp"

namespace darboux::lie {

namespace {

/// Lie derivative along a fixed field, with the per-site multipliers
/// sum_k c_k nu^k A_j^k built once for the ring of the operand.
class LieOperator {
 public:
  LieOperator(const ExtendedField& field, Ring ring) : ring_(ring) {
    const int required = std::max(0, (ring.max_degree - 1) / 2);
    const int available = field.chi.order();
    const int needed = field.cap_L ? std::min(*field.cap_L, required) : required;
    if (available < needed) {
      throw ContractError("lie_derivative: field series order " + std::to_string(available) +
                          " cannot populate degree " + std::to_string(ring.max_degree) +
                          "; required order >= " + std::to_string(needed));
    }
    const int used = std::min(field.effective_order(), required);
    RadialSeries chi = field.chi.truncated(std::max(used, 0));
    chi.set(0, Poly(kCoefficientRing));  // chi(t, 0) = 0
    multipliers_.reserve(static_cast<std::size_t>(ring.sites));
    for (int j = 0; j < ring.sites; ++j) multipliers_.push_back(radial_to_poly(chi, ring, j));
  }

  Poly apply(const Poly& f) const {
    if (!(f.ring() == ring_)) throw ContractError("lie_derivative: operand ring changed");
    Poly result = diff(f, Var::t());
    for (int j = 0; j < ring_.sites; ++j) {
      // Site Euler operator x_j d_xj + y_j d_yj scales a monomial by its site degree.
      Poly euler(ring_);
      for (const auto& [m, c] : f.terms()) {
        const int d = m.site_degree(j);
        if (d != 0) euler.add_term(m, c * Rat(d));
      }
      if (euler.is_zero()) continue;
      result += multipliers_[static_cast<std::size_t>(j)] * euler;
    }
    return result;
  }

 private:
  Ring ring_;
  std::vector<Poly> multipliers_;
};

Poly lift(const Poly& coefficient, Ring ring) {
  Poly out(ring);
  for (const auto& [m, c] : coefficient.terms()) {
    MIndex lifted(ring.sites);
    lifted.set_t(m.t());
    for (int p = 0; p < kParamCount; ++p) lifted.set_param(static_cast<Param>(p), m.param(static_cast<Param>(p)));
    out.add_term(lifted, c);
  }
  return out;
}

bool same_phase(const MIndex& a, const MIndex& b) {
  for (int i = 0; i < 2 * a.sites(); ++i) {
    if (a.phase(i) != b.phase(i)) return false;
  }
  return true;
}

}  // namespace

ExtendedField ExtendedField::moser(int order, std::optional<int> cap_L) {
  if (cap_L && *cap_L < 0) throw ContractError("ExtendedField: negative field cap");
  return ExtendedField{moser::build_moser_field(std::max(order, 1)).chi, cap_L};
}

int ExtendedField::effective_order() const { return cap_L ? std::min(*cap_L, chi.order()) : chi.order(); }

Poly lie_derivative(const Poly& f, const ExtendedField& field) { return LieOperator(field, f.ring()).apply(f); }

Poly lie_series(const Poly& f, const ExtendedField& field, int K, LieSign sign) {
  if (K < 0) throw ContractError("lie_series: K must be >= 0");
  const LieOperator lie(field, f.ring());
  Poly sum = f;
  Poly term = f;
  Rat weight(1);
  for (int k = 1; k <= K; ++k) {
    term = lie.apply(term);
    weight /= Rat(k);
    if (sign == LieSign::minus) weight = -weight;
    sum += term * weight;
  }
  return sum;
}

Poly exp_trunc(const Poly& f, const ExtendedField& field, int K, LieSign sign, const Rat& tau) {
  // t -> tau only after summation: every L^k f still carries its t dependence.
  return substitute_time(lie_series(f, field, K, sign), tau);
}

Poly p_poly(Ring ring) {
  const RadialSeries profile = radial_expand(RadialFn::p_radial, std::max(ring.max_degree / 2, 1));
  Poly p(ring);
  for (int j = 0; j < ring.sites; ++j) p += radial_to_poly(profile, ring, j, -1);
  return p;
}

PTransform transform_P(int K, std::optional<int> cap_L, int s_order) {
  if (K < 0) throw ContractError("transform_P: K must be >= 0");
  if (s_order < K + 3) throw ContractError("transform_P: s-order must be >= K + 3");
  const Ring ring{1, 2 * s_order};
  const Poly transformed = exp_trunc(p_poly(ring), ExtendedField::moser(s_order, cap_L), K, LieSign::minus, Rat(1));

  const Poly x = Poly::variable(ring, Var::x(0));
  const Poly y = Poly::variable(ring, Var::y(0));
  Poly residual = (x * x + y * y) * Rat(1, 2) - transformed;

  RadialSeries series(s_order);
  for (int k = 1; k <= s_order; ++k) {
    MIndex m(1);
    m.set_x(0, 2 * k).set_param(Param::nu, k - 1);
    series.set(k, Poly::constant(kCoefficientRing, residual.coeff(m)));
  }
  if (!(radial_to_poly(series, ring, 0, -1) == residual)) {
    throw std::logic_error("transform_P: residual is not a radial polynomial");
  }
  PTransform out{series, std::move(residual), series.min_degree(), std::nullopt};
  if (out.min_s_degree) out.min_phase_degree = 2 * *out.min_s_degree;
  return out;
}

Poly hamiltonian_poly(Model model, Ring ring, Boundary bc) {
  Poly h(ring);
  const int n = ring.sites;
  const Poly eps = Poly::parameter(ring, Param::eps);
  const int bonds = bc == Boundary::periodic ? n : n - 1;
  for (int j = 0; j < bonds; ++j) {
    const int k = (j + 1) % n;
    h += eps * (Poly::variable(ring, Var::x(k)) * Poly::variable(ring, Var::x(j)) +
                Poly::variable(ring, Var::y(k)) * Poly::variable(ring, Var::y(j)));
  }
  if (model == Model::al) return h;

  // gamma/(4 nu^2) (s - ln(1+s)) = gamma sum_{k>=2} (-1)^k nu^{k-2} A^k / (4k)
  RadialSeries onsite(std::max(ring.max_degree / 2, 2));
  for (int k = 2; k <= onsite.order(); ++k) {
    onsite.set(k, Poly::constant(kCoefficientRing, Rat(k % 2 ? -1 : 1, 4 * k)));
  }
  const Poly gamma = Poly::parameter(ring, Param::gamma);
  for (int j = 0; j < n; ++j) h += gamma * radial_to_poly(onsite, ring, j, -2);
  return h;
}

Poly transform_H(Model model, int K, int L, int degree, int sites) {
  if (sites < 3) throw ContractError("transform_H: need at least 3 periodic sites");
  if (degree < 2) throw ContractError("transform_H: degree must be >= 2");
  if (L < 1) throw ContractError("transform_H: field cap L must be >= 1");
  const Ring ring{sites, degree};
  const ExtendedField field = ExtendedField::moser(std::max(1, (degree - 1) / 2), L);
  return exp_trunc(hamiltonian_poly(model, ring), field, K, LieSign::minus, Rat(1));
}

SiteDecomposition per_site_decomposition(const Poly& h) {
  const Ring ring = h.ring();
  if (ring.sites < 3) throw ContractError("per_site_decomposition: need at least 3 sites");
  const int n = ring.sites;

  auto x = [&](int j) { return Poly::variable(ring, Var::x((j % n + n) % n)); };
  auto y = [&](int j) { return Poly::variable(ring, Var::y((j % n + n) % n)); };
  auto amp = [&](int j) { return x(j) * x(j) + y(j) * y(j); };
  auto power = [](Poly base, int k) {
    Poly r = Poly::constant(base.ring(), Rat(1));
    for (int i = 0; i < k; ++i) r *= base;
    return r;
  };

  struct Basis {
    std::string label;
    Poly sum;
    MIndex anchor;
  };
  std::vector<Basis> basis;
  for (int k = 1; 2 * k <= ring.max_degree; ++k) {
    Poly sum(ring);
    for (int j = 0; j < n; ++j) sum += power(amp(j), k);
    MIndex anchor(n);
    anchor.set_x(0, 2 * k);
    basis.push_back({k == 1 ? "(x_j^2+y_j^2)" : "(x_j^2+y_j^2)^" + std::to_string(k), sum, anchor});
    if (k == 1) {
      Poly bonds(ring);
      for (int j = 0; j < n; ++j) bonds += x(j + 1) * x(j) + y(j + 1) * y(j);
      MIndex bond_anchor(n);
      bond_anchor.set_x(0, 1).set_x(1, 1);
      basis.push_back({"(x_{j+1}x_j+y_{j+1}y_j)", bonds, bond_anchor});
    } else {
      Poly coupled(ring);
      for (int j = 0; j < n; ++j) {
        coupled += power(amp(j), k - 1) * ((x(j + 1) + x(j - 1)) * x(j) + (y(j + 1) + y(j - 1)) * y(j));
      }
      MIndex c_anchor(n);
      c_anchor.set_x(0, 2 * k - 1).set_x(1, 1);
      const std::string a = k == 2 ? "(x_j^2+y_j^2)" : "(x_j^2+y_j^2)^" + std::to_string(k - 1);
      basis.push_back({a + "((x_{j+1}+x_{j-1})x_j+(y_{j+1}+y_{j-1})y_j)", coupled, c_anchor});
    }
  }

  SiteDecomposition out{{}, h};
  for (const auto& b : basis) {
    Poly coefficient(kCoefficientRing);
    for (const auto& [m, c] : out.remainder.terms()) {
      if (!same_phase(m, b.anchor)) continue;
      MIndex cm(0);
      cm.set_t(m.t());
      for (int p = 0; p < kParamCount; ++p) cm.set_param(static_cast<Param>(p), m.param(static_cast<Param>(p)));
      coefficient.add_term(cm, c);
    }
    if (coefficient.is_zero()) continue;
    out.remainder -= lift(coefficient, ring) * b.sum;
    out.terms.push_back({b.label, std::move(coefficient)});
  }
  return out;
}

std::string format_per_site(const SiteDecomposition& d) {
  std::ostringstream os;
  os << "sum_j [ ";
  if (d.terms.empty()) os << "0";
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    const auto& term = d.terms[i];
    std::string c = to_string(term.coefficient);
    const bool compound = term.coefficient.size() > 1;
    if (i > 0) {
      if (!compound && c.front() == '-') {
        os << " - ";
        c.erase(0, 1);
      } else {
        os << " + ";
      }
    }
    if (compound) os << "(" << c << ")*"; else if (c != "1") os << c << "*";
    os << term.label;
  }
  os << " ]";
  if (!d.remainder.is_zero()) os << " + R  (" << d.remainder.size() << " unrecognised terms)";
  return os.str();
}

}  // namespace darboux::lie
