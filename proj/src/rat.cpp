#include "darboux/rat.hpp"

#include <cmath>

#include "darboux/error.hpp"

namespace darboux {

Rat::Rat(long num, long den) {
  if (den == 0) throw ContractError("Rat: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rat Rat::from_double(double value) {
  if (!std::isfinite(value)) throw ContractError("Rat::from_double: non-finite value");
  return Rat(mpq_class(value));
}

Rat Rat::from_strings(const std::string& num, const std::string& den) {
  mpz_class n, d;
  if (n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0) {
    throw ContractError("Rat: malformed integer '" + num + "/" + den + "'");
  }
  if (d == 0) throw ContractError("Rat: zero denominator");
  return Rat(mpq_class(n, d));
}

std::string Rat::str() const { return v_.get_str(); }

Rat Rat::abs() const { return Rat(mpq_class(::abs(v_))); }

Rat Rat::pow(unsigned exponent) const {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), v_.get_num_mpz_t(), exponent);
  mpz_pow_ui(d.get_mpz_t(), v_.get_den_mpz_t(), exponent);
  return Rat(mpq_class(n, d));
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw ContractError("Rat: division by zero");
  v_ /= o.v_;
  return *this;
}

Rat Rat::operator-() const { return Rat(mpq_class(-v_)); }

Rat factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rat(mpq_class(f));
}

}  // namespace darboux
