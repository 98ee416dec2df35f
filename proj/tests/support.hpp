#pragma once

// Hand-rolled generators and independent oracles shared by the test suites.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "darboux/poly.hpp"
#include "darboux/radial.hpp"

namespace testing {

using darboux::MIndex;
using darboux::Poly;
using darboux::Rat;
using darboux::Ring;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Rat rational() { return Rat(integer(-6, 6), integer(1, 5)); }

  /// Random polynomial with up to `max_terms` terms of phase degree <= max_deg,
  /// t degree <= max_t and (optionally) small parameter powers.
  Poly poly(Ring ring, int max_deg, int max_terms, int max_t = 2, bool params = false) {
    Poly p(ring);
    const int terms = integer(0, max_terms);
    for (int i = 0; i < terms; ++i) {
      MIndex m(ring.sites);
      int budget = integer(0, max_deg);
      for (int v = 0; v < ring.phase_vars() && budget > 0; ++v) {
        const int e = v + 1 == ring.phase_vars() ? budget : integer(0, budget);
        m.set_phase(v, e);
        budget -= e;
      }
      m.set_t(integer(0, max_t));
      if (params) {
        m.set_param(darboux::Param::nu, integer(0, 2));
        m.set_param(darboux::Param::gamma, integer(0, 1));
        m.set_param(darboux::Param::eps, integer(0, 1));
      }
      p.add_term(m, rational());
    }
    return p;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Exponent vector of a monomial (phase, t, params) as a plain key.
inline std::vector<int> key_of(const MIndex& m) {
  std::vector<int> k;
  for (int i = 0; i < 2 * m.sites(); ++i) k.push_back(m.phase(i));
  k.push_back(m.t());
  for (int p = 0; p < darboux::kParamCount; ++p) k.push_back(m.param(static_cast<darboux::Param>(p)));
  return k;
}

using TermTable = std::map<std::vector<int>, Rat>;

inline TermTable table_of(const Poly& p) {
  TermTable t;
  for (const auto& [m, c] : p.terms()) t[key_of(m)] = c;
  return t;
}

/// Schoolbook product over exponent vectors, dropping phase degree > D.
inline TermTable brute_product(const Poly& a, const Poly& b) {
  const int n = 2 * a.ring().sites;
  TermTable out;
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      std::vector<int> ka = key_of(ma);
      const std::vector<int> kb = key_of(mb);
      int deg = 0;
      for (std::size_t i = 0; i < ka.size(); ++i) {
        ka[i] += kb[i];
        if (static_cast<int>(i) < n) deg += ka[i];
      }
      if (deg > a.ring().max_degree) continue;
      out[ka] += ca * cb;
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

/// A polynomial in t alone: exponent -> coefficient.
using TPoly = std::map<int, Rat>;

inline TPoly tpoly_of(const Poly& c) {
  TPoly out;
  for (const auto& [m, v] : c.terms()) out[m.t()] += v;
  return out;
}

inline TPoly tmul(const TPoly& a, const TPoly& b) {
  TPoly out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) out[ea + eb] += ca * cb;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

/// Cauchy product of two coefficient lists truncated at `order`.
inline std::vector<TPoly> series_product(const std::vector<TPoly>& a, const std::vector<TPoly>& b, int order) {
  std::vector<TPoly> out(static_cast<std::size_t>(order + 1));
  for (int i = 0; i <= order; ++i) {
    for (int j = 0; i + j <= order; ++j) {
      for (const auto& [e, c] : tmul(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)])) {
        out[static_cast<std::size_t>(i + j)][e] += c;
      }
    }
  }
  for (auto& t : out) {
    for (auto it = t.begin(); it != t.end();) it = it->second.is_zero() ? t.erase(it) : std::next(it);
  }
  return out;
}

inline std::vector<TPoly> series_of(const darboux::RadialSeries& s) {
  std::vector<TPoly> out;
  for (const auto& c : s.coeffs()) out.push_back(tpoly_of(c));
  return out;
}

/// ln(1+s)/s - 1 term by term.
inline std::vector<TPoly> log_factor_oracle(int order) {
  std::vector<TPoly> out(static_cast<std::size_t>(order + 1));
  for (int k = 1; k <= order; ++k) out[static_cast<std::size_t>(k)][0] = Rat(k % 2 ? -1 : 1, k + 1);
  return out;
}

/// (1+s)/(1+ts) = (1+s) sum_k (-t s)^k
inline std::vector<TPoly> g_factor_oracle(int order) {
  std::vector<TPoly> out(static_cast<std::size_t>(order + 1));
  for (int k = 0; k <= order; ++k) {
    out[static_cast<std::size_t>(k)][k] += Rat(k % 2 ? -1 : 1);
    if (k >= 1) out[static_cast<std::size_t>(k)][k - 1] += Rat((k - 1) % 2 ? -1 : 1);
  }
  return out;
}

/// Square root of a numeric series with leading 1: b_k = (a_k - sum b_i b_{k-i}) / 2.
inline std::vector<Rat> sqrt_oracle(const std::vector<Rat>& a) {
  std::vector<Rat> b(a.size());
  b[0] = Rat(1);
  for (std::size_t k = 1; k < a.size(); ++k) {
    Rat acc = a[k];
    for (std::size_t i = 1; i < k; ++i) acc -= b[i] * b[k - i];
    b[k] = acc / Rat(2);
  }
  return b;
}

/// (x_j^2 + y_j^2)^k built by repeated multiplication.
inline Poly amplitude_power(Ring ring, int j, int k) {
  const Poly x = Poly::variable(ring, darboux::Var::x(j));
  const Poly y = Poly::variable(ring, darboux::Var::y(j));
  Poly r = Poly::constant(ring, Rat(1));
  for (int i = 0; i < k; ++i) r *= x * x + y * y;
  return r;
}

}  // namespace testing
