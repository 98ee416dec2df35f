#include "darboux/lattice.hpp"

#include <array>
#include <cmath>
#include <random>

#include "darboux/error.hpp"
#include "darboux/moser.hpp"
#include "darboux/ode.hpp"

namespace darboux::lattice {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 5> kModelNames{{
    {ModelKind::dnls, "dnls"},
    {ModelKind::al, "al"},
    {ModelKind::salerno, "salerno"},
    {ModelKind::z0, "z0"},
    {ModelKind::z1, "z1"},
}};

// (s - ln(1+s)) / s^2, with its Taylor polynomial near 0.
double onsite_profile(double s) {
  if (std::abs(s) < moser::kSeriesThreshold) {
    double v = 0.0;
    for (int k = 6; k >= 0; --k) v = v * (-s) + 1.0 / (k + 2);
    return v;
  }
  return (s - std::log1p(s)) / (s * s);
}

// sum over neighbours (with multiplicity) of v_k
double neighbour_sum(const std::vector<double>& v, int j, int n, Boundary bc) {
  const Neighbours nb = neighbours(j, n, bc);
  double acc = 0.0;
  for (int i = 0; i < nb.count; ++i) acc += v[static_cast<std::size_t>(nb.index[i])];
  return acc;
}

// Velocity written into the packed derivative buffer.
void field_packed(const ModelParams& p, const LatticeState& s, std::vector<double>& dz) {
  const int n = s.sites();
  const auto& x = s.x;
  const auto& y = s.y;
  std::vector<double> amp(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) amp[static_cast<std::size_t>(j)] = s.amplitude(j);

  for (int j = 0; j < n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double a = amp[u];
    // gradient of the quartic/log part and of the bonds
    double gx = p.eps * neighbour_sum(x, j, n, s.bc);
    double gy = p.eps * neighbour_sum(y, j, n, s.bc);
    double weight = 1.0;
    if (p.nonstandard_bracket()) {
      const double sj = p.nu * a;
      if (1.0 + sj <= 0.0) throw ContractError("vector_field: 1 + nu A_j must be positive");
      // d/dx of gamma/(4nu^2)(s - ln(1+s)) = gamma x A / (2(1+s))
      gx += p.gamma * x[u] * a / (2.0 * (1.0 + sj));
      gy += p.gamma * y[u] * a / (2.0 * (1.0 + sj));
      weight = 1.0 + sj;
    } else {
      gx += 0.5 * p.gamma * a * x[u];
      gy += 0.5 * p.gamma * a * y[u];
      if (p.model == ModelKind::z1) {
        const Neighbours nb = neighbours(j, n, s.bc);
        double c = 0.0;
        double wx = 0.0;
        double wy = 0.0;
        for (int i = 0; i < nb.count; ++i) {
          const auto k = static_cast<std::size_t>(nb.index[i]);
          c += x[k] * x[u] + y[k] * y[u];
          wx += (a + amp[k]) * x[k];
          wy += (a + amp[k]) * y[k];
        }
        gx += p.gamma * p.nu / 4.0 * a * a * x[u] + p.eps * p.nu / 4.0 * (2.0 * x[u] * c + wx);
        gy += p.gamma * p.nu / 4.0 * a * a * y[u] + p.eps * p.nu / 4.0 * (2.0 * y[u] * c + wy);
      }
    }
    dz[u] = weight * gy;
    dz[static_cast<std::size_t>(n) + u] = -weight * gx;
  }
}

std::vector<double> sample_times(double t_end, int samples) {
  std::vector<double> times(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) times[static_cast<std::size_t>(i)] = t_end * i / (samples - 1);
  times.back() = t_end;
  return times;
}

ode::Rhs make_rhs(const ModelParams& params, Boundary bc) {
  return [params, bc](const ode::State& z, ode::State& dz, double) {
    field_packed(params, LatticeState::unpack(z, bc), dz);
  };
}

}  // namespace

std::string_view to_string(ModelKind m) {
  for (const auto& [k, name] : kModelNames) {
    if (k == m) return name;
  }
  return "?";
}

std::optional<ModelKind> model_from_string(std::string_view name) {
  for (const auto& [k, n] : kModelNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void ModelParams::validate() const {
  if (!std::isfinite(nu) || nu < 0.0) throw ContractError("ModelParams: nu must be finite and >= 0");
  if (!std::isfinite(eps) || eps < 0.0) throw ContractError("ModelParams: eps must be finite and >= 0");
  if (!std::isfinite(gamma)) throw ContractError("ModelParams: gamma must be finite");
  if (model == ModelKind::al && gamma != 0.0) throw ContractError("ModelParams: the AL model requires gamma = 0");
}

double hamiltonian(const ModelParams& p, const LatticeState& s) {
  p.validate();
  s.validate();
  const int n = s.sites();
  double h = 0.0;
  const int bonds = s.bc == Boundary::periodic ? n : n - 1;
  for (int j = 0; j < bonds; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const auto v = static_cast<std::size_t>((j + 1) % n);
    h += p.eps * (s.x[v] * s.x[u] + s.y[v] * s.y[u]);
  }
  for (int j = 0; j < n; ++j) {
    const double a = s.amplitude(j);
    if (p.nonstandard_bracket()) {
      const double sj = p.nu * a;
      if (1.0 + sj <= 0.0) throw ContractError("hamiltonian: 1 + nu A_j must be positive");
      h += p.gamma / 4.0 * a * a * onsite_profile(sj);
    } else {
      h += p.gamma / 8.0 * a * a;
    }
  }
  if (p.model == ModelKind::z1) {
    for (int j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      const double a = s.amplitude(j);
      const double c = neighbour_sum(s.x, j, n, s.bc) * s.x[u] + neighbour_sum(s.y, j, n, s.bc) * s.y[u];
      h += p.gamma * p.nu / 24.0 * a * a * a + p.eps * p.nu / 4.0 * a * c;
    }
  }
  return h;
}

double conserved_P(const ModelParams& p, const LatticeState& s) {
  p.validate();
  s.validate();
  double total = 0.0;
  for (int j = 0; j < s.sites(); ++j) {
    const double a = s.amplitude(j);
    const double sj = p.nu * a;
    if (1.0 + sj <= 0.0) throw ContractError("conserved_P: 1 + nu A_j must be positive");
    total += 0.5 * a * (1.0 + moser::log_factor(sj));
  }
  return total;
}

double half_norm(const LatticeState& s) {
  double total = 0.0;
  for (int j = 0; j < s.sites(); ++j) total += 0.5 * s.amplitude(j);
  return total;
}

Velocity vector_field(const ModelParams& p, const LatticeState& s) {
  p.validate();
  s.validate();
  std::vector<double> dz(2 * s.x.size());
  field_packed(p, s, dz);
  const auto n = static_cast<std::ptrdiff_t>(s.x.size());
  return Velocity{{dz.begin(), dz.begin() + n}, {dz.begin() + n, dz.end()}};
}

Trajectory integrate(const ModelParams& p, const LatticeState& state0, double t_end, double tol, int samples) {
  p.validate();
  state0.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ContractError("integrate: t_end must be positive");
  if (!(tol >= 1e-13 && tol <= 1e-6)) throw ContractError("integrate: tol must lie in [1e-13, 1e-6]");
  if (samples < 2) throw ContractError("integrate: need at least 2 samples");

  Trajectory tr;
  const std::vector<double> times = sample_times(t_end, samples);
  ode::integrate(make_rhs(p, state0.bc), state0.packed(), times, tol, [&](double t, const ode::State& z) {
    LatticeState s = LatticeState::unpack(z, state0.bc);
    tr.times.push_back(t);
    tr.H_values.push_back(hamiltonian(p, s));
    if (p.nonstandard_bracket()) tr.P_values.push_back(conserved_P(p, s));
    tr.norm_values.push_back(half_norm(s));
    tr.states.push_back(std::move(s));
  });
  return tr;
}

LatticeState flow_to(const ModelParams& p, const LatticeState& state0, double t, double tol) {
  p.validate();
  state0.validate();
  if (!std::isfinite(t)) throw ContractError("flow_to: time must be finite");
  if (!(tol > 0.0)) throw ContractError("flow_to: tol must be positive");
  return LatticeState::unpack(ode::flow(make_rhs(p, state0.bc), state0.packed(), 0.0, t, tol), state0.bc);
}

std::string_view to_string(Transport t) { return t == Transport::none ? "none" : "darboux"; }

std::optional<Transport> transport_from_string(std::string_view name) {
  if (name == "none") return Transport::none;
  if (name == "darboux") return Transport::darboux;
  return std::nullopt;
}

DeviationCurve compare_flows(const ModelParams& a, const ModelParams& b, const LatticeState& state0, double horizon,
                             Transport transport, double tol, int samples) {
  a.validate();
  b.validate();
  state0.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ContractError("compare_flows: horizon must be positive");
  if (transport == Transport::none && a.nonstandard_bracket() != b.nonstandard_bracket()) {
    throw ContractError("compare_flows: models with different brackets need darboux transport");
  }

  auto run = [&](const ModelParams& m) {
    const bool mapped = transport == Transport::darboux && m.nonstandard_bracket();
    const moser::DarbouxMap inverse{moser::Direction::inverse, m.nu};
    const moser::DarbouxMap forward{moser::Direction::forward, m.nu};
    const LatticeState start = mapped ? moser::darboux_apply(inverse, state0) : state0;
    Trajectory tr = integrate(m, start, horizon, tol, samples);
    if (mapped) {
      for (auto& s : tr.states) s = moser::darboux_apply(forward, s);
    }
    return tr;
  };
  const Trajectory ta = run(a);
  const Trajectory tb = run(b);

  DeviationCurve curve;
  curve.times = ta.times;
  for (std::size_t i = 0; i < ta.states.size(); ++i) {
    const double d = distance(ta.states[i], tb.states[i]);
    curve.deviation.push_back(d);
    curve.max = std::max(curve.max, d);
  }
  return curve;
}

LatticeState random_direction(int sites, Boundary bc, std::uint64_t seed) {
  if (sites < 1) throw ContractError("random_direction: need at least one site");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> z(2 * static_cast<std::size_t>(sites));
  double n2 = 0.0;
  while (n2 == 0.0) {
    n2 = 0.0;
    for (double& v : z) {
      v = normal(rng);
      n2 += v * v;
    }
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (double& v : z) v *= inv;
  return LatticeState::unpack(z, bc);
}

LatticeState scaled(const LatticeState& s, double factor) {
  LatticeState out = s;
  for (double& v : out.x) v *= factor;
  for (double& v : out.y) v *= factor;
  return out;
}

}  // namespace darboux::lattice
