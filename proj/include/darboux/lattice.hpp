#pragma once

// Finite lattices: dNLS, Ablowitz-Ladik, Salerno and the two normal forms,
// with their Hamiltonians, vector fields, trajectories and flow comparison.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "darboux/state.hpp"

namespace darboux::lattice {

enum class ModelKind { dnls, al, salerno, z0, z1 };

std::string_view to_string(ModelKind m);
std::optional<ModelKind> model_from_string(std::string_view name);

struct ModelParams {
  ModelKind model = ModelKind::salerno;
  double nu = 0.5;  ///< half the Salerno coupling mu
  double gamma = 1.0;
  double eps = 0.1;

  /// nu, eps >= 0 and finite; AL requires gamma = 0.
  void validate() const;
  /// AL and Salerno carry the weighted bracket {x_j, y_j} = 1 + nu A_j.
  bool nonstandard_bracket() const { return model == ModelKind::al || model == ModelKind::salerno; }
};

double hamiltonian(const ModelParams& params, const LatticeState& state);

/// sum_j ln(1 + nu A_j) / (2 nu); reduces to the half squared norm at nu = 0.
double conserved_P(const ModelParams& params, const LatticeState& state);

/// (1/2) sum_j (x_j^2 + y_j^2)
double half_norm(const LatticeState& state);

struct Velocity {
  std::vector<double> x;
  std::vector<double> y;
};

/// Hamilton's equations under the model's bracket.
Velocity vector_field(const ModelParams& params, const LatticeState& state);

struct Trajectory {
  std::vector<double> times;
  std::vector<LatticeState> states;
  std::vector<double> H_values;
  std::vector<double> P_values;  ///< AL/Salerno only
  std::vector<double> norm_values;
};

/// Dormand-Prince integration on [0, t_end], sampled at `samples` equispaced
/// times. Requires t_end > 0 and tol in [1e-13, 1e-6].
Trajectory integrate(const ModelParams& params, const LatticeState& state0, double t_end, double tol,
                     int samples = 201);

/// State at time t (either sign).
LatticeState flow_to(const ModelParams& params, const LatticeState& state0, double t, double tol);

enum class Transport { none, darboux };

std::string_view to_string(Transport t);
std::optional<Transport> transport_from_string(std::string_view name);

struct DeviationCurve {
  std::vector<double> times;
  std::vector<double> deviation;
  double max = 0.0;
};

/// Runs both models from the same point of the compared coordinates and
/// returns the Euclidean distance at each sample. With darboux transport a
/// weighted-bracket model starts from the inverse map of `state0` and its
/// states are mapped forward before comparison.
DeviationCurve compare_flows(const ModelParams& a, const ModelParams& b, const LatticeState& state0,
                             double horizon, Transport transport, double tol = 1e-11, int samples = 201);

/// Seeded uniform direction on the unit sphere of R^{2N}.
LatticeState random_direction(int sites, Boundary bc, std::uint64_t seed);

LatticeState scaled(const LatticeState& s, double factor);

}  // namespace darboux::lattice
