#include "sghydro/observables.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <string>

#include "sghydro/trajectory.hpp"

namespace sghydro {

double density_pairing(const WeightedGraph& g, const Configuration& eta, const VertexFunction& test) {
  check_size(g, test, "density_pairing");
  if (eta.size() != g.num_vertices()) fail(ErrorKind::InvalidArgument, "density_pairing: configuration size mismatch");
  double s = 0.0;
  for (std::size_t v = 0; v < eta.size(); ++v)
    if (eta[v]) s += test[v];
  return s / static_cast<double>(g.num_vertices());
}

double density_pairing(const WeightedGraph& g, const VertexFunction& rho, const VertexFunction& test) {
  return vertex_inner_product(g, rho, test);
}

double current_pairing(const WeightedGraph& g, std::span<const std::int64_t> ledger, const VertexFunction& test) {
  check_size(g, test, "current_pairing");
  if (ledger.size() != g.num_edges()) fail(ErrorKind::InvalidArgument, "current_pairing: ledger size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    const auto& e = g.edge(static_cast<EdgeId>(i));
    s += static_cast<double>(ledger[i]) * (test[e.head] - test[e.tail]);
  }
  return s * g.energy_scale() / g.acceleration();
}

double current_pairing(const WeightedGraph& g, const EdgeFunction& ledger, const VertexFunction& test) {
  check_size(g, ledger, "current_pairing");
  const auto grad = discrete_gradient(g, test);
  return ledger.vec().dot(grad.vec()) / g.acceleration();
}

HydroScaling hydro_scaling(const WeightedGraph& g) {
  const double kappa = g.acceleration() / (static_cast<double>(g.num_vertices()) * g.energy_scale());
  return {kappa, 2.0, 1.0 / kappa};
}

EnsembleStats ensemble_stats(std::span<const double> values, double reference, double delta) {
  if (values.size() < 2) fail(ErrorKind::InvalidArgument, "ensemble_stats needs at least two replicas");
  EnsembleStats st;
  st.n = values.size();
  st.reference = reference;
  st.delta = delta;
  const double n = static_cast<double>(st.n);
  st.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  std::size_t dev = 0;
  for (double v : values) {
    ss += (v - st.mean) * (v - st.mean);
    if (std::abs(v - reference) > delta) ++dev;
  }
  st.std_error = std::sqrt(ss / (n - 1.0) / n);
  st.deviation_fraction = static_cast<double>(dev) / n;

  constexpr double z = 1.959963984540054;
  const double p = st.deviation_fraction;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  st.wilson_low = std::max(0.0, centre - half);
  st.wilson_high = std::min(1.0, centre + half);
  return st;
}

double batch_means_std_error(std::span<const double> batch_averages) {
  if (batch_averages.size() < 2) fail(ErrorKind::InvalidArgument, "batch means need at least two batches");
  const double n = static_cast<double>(batch_averages.size());
  const double mean = std::accumulate(batch_averages.begin(), batch_averages.end(), 0.0) / n;
  double ss = 0.0;
  for (double b : batch_averages) ss += (b - mean) * (b - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

// -- trajectories -------------------------------------------------------------

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Simulation: return "simulation";
    case Provenance::Pde: return "pde";
    case Provenance::Synthetic: return "synthetic";
  }
  return "?";
}

void Trajectory::validate(const WeightedGraph& g) const {
  if (times.empty()) fail(ErrorKind::InvalidArgument, "trajectory is empty");
  if (rho.size() != times.size() || flux.size() != times.size())
    fail(ErrorKind::InvalidArgument, "trajectory: density and current grids differ");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) fail(ErrorKind::InvalidArgument, "trajectory: times must be strictly increasing");
    check_size(g, rho[k], "trajectory");
    check_size(g, flux[k], "trajectory");
    for (std::size_t v = 0; v < rho[k].size(); ++v)
      if (!(rho[k][v] >= -1e-9 && rho[k][v] <= 1.0 + 1e-9))
        fail(ErrorKind::InvalidArgument, "trajectory: density outside [0,1] at t=" + std::to_string(times[k]));
  }
  if (flux.front().vec().lpNorm<Eigen::Infinity>() != 0.0)
    fail(ErrorKind::InvalidArgument, "trajectory: integrated current must vanish at the first time");
}

namespace {

template <class F>
F interpolate(const std::vector<double>& times, const std::vector<F>& vals, double t) {
  if (times.empty()) fail(ErrorKind::InvalidArgument, "interpolation on an empty trajectory");
  if (t <= times.front()) return vals.front();
  if (t >= times.back()) return vals.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return F((1.0 - w) * vals[k - 1].vec() + w * vals[k].vec());
}

}  // namespace

VertexFunction Trajectory::rho_at(double t) const { return interpolate(times, rho, t); }
EdgeFunction Trajectory::flux_at(double t) const { return interpolate(times, flux, t); }

EdgeFunction normalized_current(const WeightedGraph& g, std::span<const std::int64_t> ledger) {
  if (ledger.size() != g.num_edges()) fail(ErrorKind::InvalidArgument, "normalized_current: ledger size mismatch");
  EdgeFunction w(g.num_edges());
  const double nv = static_cast<double>(g.num_vertices());
  for (std::size_t i = 0; i < ledger.size(); ++i)
    w[i] = static_cast<double>(ledger[i]) / (nv * g.edge(static_cast<EdgeId>(i)).conductance);
  return w;
}

Trajectory trajectory_from_snapshots(const WeightedGraph& g, const std::vector<Snapshot>& snaps) {
  Trajectory tr;
  tr.provenance = Provenance::Simulation;
  for (const auto& s : snaps) {
    tr.times.push_back(s.time);
    tr.rho.push_back(s.config.as_function());
    tr.flux.push_back(normalized_current(g, s.current));
  }
  return tr;
}

}  // namespace sghydro
