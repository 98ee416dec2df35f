#pragma once

// Exact sparse polynomials in the lattice phase variables (x_j, y_j), the
// Moser time t and the formal parameters (nu, gamma, eps). Truncation is by
// total phase degree only; t and parameter exponents are unbounded.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "darboux/rat.hpp"

namespace darboux {

enum class Param : std::uint8_t { nu = 0, gamma = 1, eps = 2 };
inline constexpr int kParamCount = 3;

/// A differentiable variable: a phase coordinate of one site, or time.
struct Var {
  enum class Kind : std::uint8_t { x, y, t };
  Kind kind = Kind::t;
  int site = 0;

  static Var x(int j) { return {Kind::x, j}; }
  static Var y(int j) { return {Kind::y, j}; }
  static Var t() { return {Kind::t, 0}; }

  friend bool operator==(const Var&, const Var&) = default;
};

/// Variable set and truncation degree shared by all operands of an operation.
struct Ring {
  int sites = 0;
  int max_degree = 0;

  int phase_vars() const { return 2 * sites; }
  friend bool operator==(const Ring&, const Ring&) = default;
};

/// Exponent vector. Phase exponents are laid out as x_0..x_{N-1}, y_0..y_{N-1}.
class MIndex {
 public:
  explicit MIndex(int sites = 0);

  int sites() const { return sites_; }
  int phase_degree() const { return degree_; }
  int phase(int i) const { return e_[static_cast<std::size_t>(i)]; }
  int x(int j) const { return phase(j); }
  int y(int j) const { return phase(sites_ + j); }
  int t() const { return e_[static_cast<std::size_t>(2 * sites_)]; }
  int param(Param p) const { return e_[param_slot(p)]; }
  /// Exponent of x_j plus exponent of y_j.
  int site_degree(int j) const { return x(j) + y(j); }
  bool has_params() const;

  MIndex& set_phase(int i, int exponent);
  MIndex& set_x(int j, int exponent) { return set_phase(j, exponent); }
  MIndex& set_y(int j, int exponent) { return set_phase(sites_ + j, exponent); }
  MIndex& set_t(int exponent);
  MIndex& set_param(Param p, int exponent);

  /// Monomial product (exponent addition).
  friend MIndex operator*(const MIndex& a, const MIndex& b);

  friend bool operator==(const MIndex& a, const MIndex& b) { return a.e_ == b.e_; }
  /// Graded lexicographic order: phase degree first, then exponents compared
  /// left to right with the larger exponent first, then t, then parameters.
  friend bool operator<(const MIndex& a, const MIndex& b);

 private:
  std::size_t param_slot(Param p) const {
    return static_cast<std::size_t>(2 * sites_ + 1 + static_cast<int>(p));
  }

  int sites_;
  int degree_ = 0;
  std::vector<std::uint16_t> e_;
};

class Poly {
 public:
  using TermMap = std::map<MIndex, Rat>;

  explicit Poly(Ring ring);

  static Poly constant(Ring ring, const Rat& c);
  static Poly variable(Ring ring, Var v);
  static Poly parameter(Ring ring, Param p);
  static Poly monomial(Ring ring, const MIndex& m, const Rat& c);

  const Ring& ring() const { return ring_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Adds c·m; drops the term if it exceeds the truncation degree or cancels.
  void add_term(const MIndex& m, const Rat& c);
  /// Coefficient of m, zero if absent.
  Rat coeff(const MIndex& m) const;

  std::optional<int> min_phase_degree() const;
  int max_phase_degree() const;
  int max_t_degree() const;
  bool depends_on_time() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(const Rat& c);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rat& c) { return a *= c; }
  friend Poly operator*(const Rat& c, Poly a) { return a *= c; }
  Poly operator-() const;

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.ring_ == b.ring_ && a.terms_ == b.terms_;
  }

 private:
  void require_same_ring(const Poly& o, const char* op) const;

  Ring ring_;
  TermMap terms_;
};

enum class ArithOp { add, mul };

Poly ring_arith(const Poly& a, const Poly& b, ArithOp op);

/// Exact partial derivative with respect to a phase variable or t.
Poly diff(const Poly& a, Var v);

/// Same polynomial in a ring with a different truncation degree. Lowering the
/// degree discards terms; raising it keeps every term.
Poly with_degree(const Poly& a, int max_degree);
/// Terms of exactly the given phase degree.
Poly homogeneous_part(const Poly& a, int degree);
/// Terms with phase degree at most `degree` (ring unchanged).
Poly low_degree_part(const Poly& a, int degree);

/// Replaces t by an exact value.
Poly substitute_time(const Poly& a, const Rat& tau);

struct ExactParams {
  std::optional<Rat> nu;
  std::optional<Rat> gamma;
  std::optional<Rat> eps;
};
/// Replaces the provided parameters by exact values; others stay formal.
Poly substitute_params(const Poly& a, const ExactParams& values);

struct ParamValues {
  double nu = 0.0;
  double gamma = 0.0;
  double eps = 0.0;
};

/// Floating evaluation at a phase point. `x` and `y` must both have one entry
/// per site.
double eval_point(const Poly& a, std::span<const double> x, std::span<const double> y,
                  const ParamValues& params, double t = 0.0);

/// Sum of |coefficient| · rho^(phase degree), an upper bound of the sup norm
/// on the complex polydisk of radius rho. Time dependence is allowed only when
/// `t_radius` is given, in which case t ranges over the disk of that radius.
double majorant_norm(const Poly& a, double rho, std::optional<double> t_radius = std::nullopt);

/// Canonical bracket sum_j (d_xj f d_yj g - d_yj f d_xj g).
Poly standard_bracket(const Poly& f, const Poly& g);

std::string variable_name(int sites, int phase_index);
/// Human readable form, terms in graded-lex order, e.g. "1/8*gamma*x0^4 + ...".
std::string to_string(const Poly& a);

nlohmann::json to_json(const Poly& a);
/// Inverse of to_json. Terms above the ring's degree are a contract error.
Poly poly_from_json(const nlohmann::json& j, Ring ring);

}  // namespace darboux
