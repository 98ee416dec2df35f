#pragma once

#include <string_view>
#include <optional>
#include <vector>

namespace darboux {

enum class Boundary { periodic, fixed };

std::string_view to_string(Boundary bc);
std::optional<Boundary> boundary_from_string(std::string_view name);

/// Real phase-space point (x_j, y_j), j = 0..N-1, of a lattice.
struct LatticeState {
  std::vector<double> x;
  std::vector<double> y;
  Boundary bc = Boundary::periodic;

  LatticeState() = default;
  LatticeState(std::vector<double> xs, std::vector<double> ys, Boundary boundary = Boundary::periodic);
  static LatticeState zero(int sites, Boundary boundary = Boundary::periodic);

  int sites() const { return static_cast<int>(x.size()); }
  /// x_j^2 + y_j^2
  double amplitude(int j) const;
  double norm() const;
  /// Throws ContractError unless sizes agree, N >= 1 and all entries are finite.
  void validate() const;

  /// Packed layout (x_0..x_{N-1}, y_0..y_{N-1}) used by the integrators.
  std::vector<double> packed() const;
  static LatticeState unpack(const std::vector<double>& z, Boundary boundary);

  friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

double distance(const LatticeState& a, const LatticeState& b);

/// Nearest neighbours of site j with multiplicity: j+1 and j-1, wrapped for
/// periodic boundaries, dropped when outside a fixed chain.
struct Neighbours {
  int index[2] = {0, 0};
  int count = 0;
};
Neighbours neighbours(int j, int sites, Boundary bc);

}  // namespace darboux
