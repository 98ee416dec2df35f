#include "darboux/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "darboux/error.hpp"

namespace darboux {

namespace {

std::uint16_t checked_exponent(int e) {
  if (e < 0 || e > std::numeric_limits<std::uint16_t>::max()) {
    throw ContractError("MIndex: exponent out of range");
  }
  return static_cast<std::uint16_t>(e);
}

}  // namespace

// ---------------------------------------------------------------------------
// MIndex

MIndex::MIndex(int sites)
    : sites_(sites), e_(static_cast<std::size_t>(2 * sites + 1 + kParamCount), 0) {
  if (sites < 0) throw ContractError("MIndex: negative site count");
}

bool MIndex::has_params() const {
  for (int p = 0; p < kParamCount; ++p) {
    if (param(static_cast<Param>(p)) != 0) return true;
  }
  return false;
}

MIndex& MIndex::set_phase(int i, int exponent) {
  if (i < 0 || i >= 2 * sites_) throw ContractError("MIndex: phase index out of range");
  auto& slot = e_[static_cast<std::size_t>(i)];
  degree_ += exponent - slot;
  slot = checked_exponent(exponent);
  return *this;
}

MIndex& MIndex::set_t(int exponent) {
  e_[static_cast<std::size_t>(2 * sites_)] = checked_exponent(exponent);
  return *this;
}

MIndex& MIndex::set_param(Param p, int exponent) {
  e_[param_slot(p)] = checked_exponent(exponent);
  return *this;
}

MIndex operator*(const MIndex& a, const MIndex& b) {
  if (a.sites_ != b.sites_) throw ContractError("MIndex: mismatched variable sets");
  MIndex r = a;
  for (std::size_t i = 0; i < r.e_.size(); ++i) {
    r.e_[i] = checked_exponent(int{a.e_[i]} + int{b.e_[i]});
  }
  r.degree_ = a.degree_ + b.degree_;
  return r;
}

bool operator<(const MIndex& a, const MIndex& b) {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  // Larger leading exponent sorts first (x0^2 before x0*x1).
  return std::lexicographical_compare(a.e_.begin(), a.e_.end(), b.e_.begin(), b.e_.end(),
                                      [](std::uint16_t u, std::uint16_t v) { return u > v; });
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(Ring ring) : ring_(ring) {
  if (ring.sites < 0 || ring.max_degree < 0) throw ContractError("Poly: invalid ring");
}

Poly Poly::constant(Ring ring, const Rat& c) {
  Poly p(ring);
  p.add_term(MIndex(ring.sites), c);
  return p;
}

Poly Poly::variable(Ring ring, Var v) {
  MIndex m(ring.sites);
  switch (v.kind) {
    case Var::Kind::x:
    case Var::Kind::y:
      if (v.site < 0 || v.site >= ring.sites) throw ContractError("Poly: unknown site");
      if (v.kind == Var::Kind::x) m.set_x(v.site, 1); else m.set_y(v.site, 1);
      break;
    case Var::Kind::t:
      m.set_t(1);
      break;
  }
  return monomial(ring, m, Rat(1));
}

Poly Poly::parameter(Ring ring, Param p) {
  MIndex m(ring.sites);
  m.set_param(p, 1);
  return monomial(ring, m, Rat(1));
}

Poly Poly::monomial(Ring ring, const MIndex& m, const Rat& c) {
  Poly p(ring);
  p.add_term(m, c);
  return p;
}

void Poly::add_term(const MIndex& m, const Rat& c) {
  if (m.sites() != ring_.sites) throw ContractError("Poly: monomial has wrong variable set");
  if (c.is_zero() || m.phase_degree() > ring_.max_degree) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Rat Poly::coeff(const MIndex& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rat(0) : it->second;
}

std::optional<int> Poly::min_phase_degree() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first.phase_degree();
}

int Poly::max_phase_degree() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first.phase_degree();
}

int Poly::max_t_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.t());
  return d;
}

bool Poly::depends_on_time() const { return max_t_degree() > 0; }

void Poly::require_same_ring(const Poly& o, const char* op) const {
  if (!(ring_ == o.ring_)) {
    throw ContractError(std::string("Poly ") + op + ": mismatched variable sets or truncation degree");
  }
}

Poly& Poly::operator+=(const Poly& o) {
  require_same_ring(o, "add");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  require_same_ring(o, "sub");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  a.require_same_ring(b, "mul");
  Poly r(a.ring_);
  const int max_degree = a.ring_.max_degree;
  for (const auto& [ma, ca] : a.terms_) {
    const int budget = max_degree - ma.phase_degree();
    if (budget < 0) break;
    for (const auto& [mb, cb] : b.terms_) {
      // Terms are ordered by phase degree, so nothing further fits.
      if (mb.phase_degree() > budget) break;
      r.add_term(ma * mb, ca * cb);
    }
  }
  return r;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly& Poly::operator*=(const Rat& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

// ---------------------------------------------------------------------------
// Free functions

Poly ring_arith(const Poly& a, const Poly& b, ArithOp op) {
  return op == ArithOp::add ? a + b : a * b;
}

Poly diff(const Poly& a, Var v) {
  const Ring& ring = a.ring();
  int index = -1;
  if (v.kind != Var::Kind::t) {
    if (v.site < 0 || v.site >= ring.sites) throw ContractError("diff: unknown variable");
    index = v.kind == Var::Kind::x ? v.site : ring.sites + v.site;
  }
  Poly r(ring);
  for (const auto& [m, c] : a.terms()) {
    const int e = index < 0 ? m.t() : m.phase(index);
    if (e == 0) continue;
    MIndex dm = m;
    if (index < 0) dm.set_t(e - 1); else dm.set_phase(index, e - 1);
    r.add_term(dm, c * Rat(e));
  }
  return r;
}

Poly with_degree(const Poly& a, int max_degree) {
  Poly r(Ring{a.ring().sites, max_degree});
  for (const auto& [m, c] : a.terms()) r.add_term(m, c);
  return r;
}

Poly homogeneous_part(const Poly& a, int degree) {
  Poly r(a.ring());
  for (const auto& [m, c] : a.terms()) {
    if (m.phase_degree() == degree) r.add_term(m, c);
  }
  return r;
}

Poly low_degree_part(const Poly& a, int degree) {
  Poly r(a.ring());
  for (const auto& [m, c] : a.terms()) {
    if (m.phase_degree() <= degree) r.add_term(m, c);
  }
  return r;
}

Poly substitute_time(const Poly& a, const Rat& tau) {
  Poly r(a.ring());
  for (const auto& [m, c] : a.terms()) {
    MIndex base = m;
    base.set_t(0);
    r.add_term(base, c * tau.pow(static_cast<unsigned>(m.t())));
  }
  return r;
}

Poly substitute_params(const Poly& a, const ExactParams& values) {
  const std::optional<Rat>* slots[kParamCount] = {&values.nu, &values.gamma, &values.eps};
  Poly r(a.ring());
  for (const auto& [m, c] : a.terms()) {
    MIndex base = m;
    Rat coeff = c;
    for (int p = 0; p < kParamCount; ++p) {
      const auto param = static_cast<Param>(p);
      if (!slots[p]->has_value() || m.param(param) == 0) continue;
      coeff *= (*slots[p])->pow(static_cast<unsigned>(m.param(param)));
      base.set_param(param, 0);
    }
    r.add_term(base, coeff);
  }
  return r;
}

double eval_point(const Poly& a, std::span<const double> x, std::span<const double> y,
                  const ParamValues& params, double t) {
  const int sites = a.ring().sites;
  if (x.size() != static_cast<std::size_t>(sites) || y.size() != static_cast<std::size_t>(sites)) {
    throw ContractError("eval_point: assignment does not cover every phase variable");
  }
  std::vector<double> point(static_cast<std::size_t>(2 * sites));
  std::copy(x.begin(), x.end(), point.begin());
  std::copy(y.begin(), y.end(), point.begin() + sites);
  const double pvals[kParamCount] = {params.nu, params.gamma, params.eps};

  double sum = 0.0;
  for (const auto& [m, c] : a.terms()) {
    double term = c.to_double();
    for (int i = 0; i < 2 * sites; ++i) {
      if (m.phase(i) != 0) term *= std::pow(point[static_cast<std::size_t>(i)], m.phase(i));
    }
    if (m.t() != 0) term *= std::pow(t, m.t());
    for (int p = 0; p < kParamCount; ++p) {
      const int e = m.param(static_cast<Param>(p));
      if (e != 0) term *= std::pow(pvals[p], e);
    }
    sum += term;
  }
  return sum;
}

double majorant_norm(const Poly& a, double rho, std::optional<double> t_radius) {
  if (!(rho > 0.0)) throw ContractError("majorant_norm: rho must be positive");
  if (t_radius && !(*t_radius >= 0.0)) throw ContractError("majorant_norm: negative time radius");
  double sum = 0.0;
  for (const auto& [m, c] : a.terms()) {
    if (m.has_params()) throw ContractError("majorant_norm: unevaluated parameters present");
    double term = c.abs().to_double() * std::pow(rho, m.phase_degree());
    if (m.t() != 0) {
      if (!t_radius) throw ContractError("majorant_norm: polynomial depends on t");
      term *= std::pow(*t_radius, m.t());
    }
    sum += term;
  }
  return sum;
}

Poly standard_bracket(const Poly& f, const Poly& g) {
  if (!(f.ring() == g.ring())) throw ContractError("standard_bracket: mismatched rings");
  Poly r(f.ring());
  for (int j = 0; j < f.ring().sites; ++j) {
    r += diff(f, Var::x(j)) * diff(g, Var::y(j));
    r -= diff(f, Var::y(j)) * diff(g, Var::x(j));
  }
  return r;
}

std::string variable_name(int sites, int phase_index) {
  return phase_index < sites ? "x" + std::to_string(phase_index)
                             : "y" + std::to_string(phase_index - sites);
}

std::string to_string(const Poly& a) {
  if (a.is_zero()) return "0";
  static const char* kParamNames[kParamCount] = {"nu", "gamma", "eps"};
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : a.terms()) {
    std::vector<std::string> factors;
    for (int p = 0; p < kParamCount; ++p) {
      const int e = m.param(static_cast<Param>(p));
      if (e == 0) continue;
      factors.push_back(kParamNames[p] + (e > 1 ? "^" + std::to_string(e) : std::string()));
    }
    if (m.t() != 0) factors.push_back("t" + (m.t() > 1 ? "^" + std::to_string(m.t()) : std::string()));
    for (int i = 0; i < a.ring().phase_vars(); ++i) {
      const int e = m.phase(i);
      if (e == 0) continue;
      factors.push_back(variable_name(a.ring().sites, i) +
                        (e > 1 ? "^" + std::to_string(e) : std::string()));
    }
    const Rat mag = c.abs();
    os << (first ? (c.sign() < 0 ? "-" : "") : (c.sign() < 0 ? " - " : " + "));
    first = false;
    const bool unit = mag == Rat(1);
    if (!unit || factors.empty()) {
      os << mag;
      if (!factors.empty()) os << '*';
    }
    for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? "*" : "") << factors[i];
  }
  return os.str();
}

nlohmann::json to_json(const Poly& a) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [m, c] : a.terms()) {
    std::vector<int> exps(static_cast<std::size_t>(a.ring().phase_vars()));
    for (int i = 0; i < a.ring().phase_vars(); ++i) exps[static_cast<std::size_t>(i)] = m.phase(i);
    out.push_back({{"exps", exps},
                   {"t", m.t()},
                   {"params", {m.param(Param::nu), m.param(Param::gamma), m.param(Param::eps)}},
                   {"num", c.num_str()},
                   {"den", c.den_str()}});
  }
  return out;
}

Poly poly_from_json(const nlohmann::json& j, Ring ring) {
  if (!j.is_array()) throw ContractError("poly_from_json: expected an array of terms");
  Poly r(ring);
  for (const auto& term : j) {
    const auto exps = term.at("exps").get<std::vector<int>>();
    const auto params = term.at("params").get<std::vector<int>>();
    if (exps.size() != static_cast<std::size_t>(ring.phase_vars()) ||
        params.size() != static_cast<std::size_t>(kParamCount)) {
      throw ContractError("poly_from_json: exponent vector does not match the ring");
    }
    MIndex m(ring.sites);
    for (std::size_t i = 0; i < exps.size(); ++i) m.set_phase(static_cast<int>(i), exps[i]);
    m.set_t(term.at("t").get<int>());
    for (int p = 0; p < kParamCount; ++p) m.set_param(static_cast<Param>(p), params[static_cast<std::size_t>(p)]);
    if (m.phase_degree() > ring.max_degree) {
      throw ContractError("poly_from_json: term exceeds the truncation degree");
    }
    r.add_term(m, Rat::from_strings(term.at("num").get<std::string>(), term.at("den").get<std::string>()));
  }
  return r;
}

}  // namespace darboux
