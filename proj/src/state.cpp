#include "darboux/state.hpp"

#include <cmath>

#include "darboux/error.hpp"

namespace darboux {

std::string_view to_string(Boundary bc) { return bc == Boundary::periodic ? "periodic" : "fixed"; }

std::optional<Boundary> boundary_from_string(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "fixed") return Boundary::fixed;
  return std::nullopt;
}

LatticeState::LatticeState(std::vector<double> xs, std::vector<double> ys, Boundary boundary)
    : x(std::move(xs)), y(std::move(ys)), bc(boundary) {
  validate();
}

LatticeState LatticeState::zero(int sites, Boundary boundary) {
  if (sites < 1) throw ContractError("LatticeState: need at least one site");
  return LatticeState(std::vector<double>(static_cast<std::size_t>(sites), 0.0),
                      std::vector<double>(static_cast<std::size_t>(sites), 0.0), boundary);
}

double LatticeState::amplitude(int j) const {
  const auto i = static_cast<std::size_t>(j);
  return x[i] * x[i] + y[i] * y[i];
}

double LatticeState::norm() const {
  double sum = 0.0;
  for (int j = 0; j < sites(); ++j) sum += amplitude(j);
  return std::sqrt(sum);
}

void LatticeState::validate() const {
  if (x.size() != y.size()) throw ContractError("LatticeState: x and y differ in length");
  if (x.empty()) throw ContractError("LatticeState: need at least one site");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ContractError("LatticeState: non-finite entry");
  }
}

std::vector<double> LatticeState::packed() const {
  std::vector<double> z(x);
  z.insert(z.end(), y.begin(), y.end());
  return z;
}

LatticeState LatticeState::unpack(const std::vector<double>& z, Boundary boundary) {
  const auto n = z.size() / 2;
  return LatticeState(std::vector<double>(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)),
                      std::vector<double>(z.begin() + static_cast<std::ptrdiff_t>(n), z.end()), boundary);
}

double distance(const LatticeState& a, const LatticeState& b) {
  if (a.sites() != b.sites()) throw ContractError("distance: site counts differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    const double dx = a.x[i] - b.x[i];
    const double dy = a.y[i] - b.y[i];
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum);
}

Neighbours neighbours(int j, int sites, Boundary bc) {
  Neighbours nb;
  if (bc == Boundary::periodic) {
    nb.index[0] = (j + 1) % sites;
    nb.index[1] = (j - 1 + sites) % sites;
    nb.count = 2;
    return nb;
  }
  if (j + 1 < sites) nb.index[nb.count++] = j + 1;
  if (j - 1 >= 0) nb.index[nb.count++] = j - 1;
  return nb;
}

}  // namespace darboux
