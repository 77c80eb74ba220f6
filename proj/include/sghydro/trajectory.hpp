#pragma once

#include <string>
#include <vector>

#include "sghydro/graph.hpp"
#include "sghydro/wasep.hpp"

namespace sghydro {

enum class Provenance { Simulation, Pde, Synthetic };

/// Density/current path on a time grid. `flux` is the integrated current in
/// the calibrated normalisation W_hat, for which the conservation law reads
///   <phi, rho_t - rho_0>_V = <d_N phi, W_hat_t>_E   for interior phi,
/// i.e. rho_t - rho_0 = d*_N W_hat_t at interior vertices. A particle ledger
/// W maps to W_hat(e) = W(e) / (|V| c_e).
struct Trajectory {
  std::vector<double> times;
  std::vector<VertexFunction> rho;
  std::vector<EdgeFunction> flux;
  Provenance provenance = Provenance::Synthetic;

  std::size_t size() const { return times.size(); }

  /// Throws InvalidArgument on unsorted times, size mismatches, a nonzero
  /// initial current or densities outside [0, 1] (slack 1e-9).
  void validate(const WeightedGraph& g) const;

  /// Linear interpolation in time (clamped to the grid).
  VertexFunction rho_at(double t) const;
  EdgeFunction flux_at(double t) const;
};

const char* provenance_name(Provenance p);

/// W_hat(e) = W(e) / (|V| c_e).
EdgeFunction normalized_current(const WeightedGraph& g, std::span<const std::int64_t> ledger);

/// Trajectory of one replica's snapshots (rho = eta).
Trajectory trajectory_from_snapshots(const WeightedGraph& g, const std::vector<Snapshot>& snaps);

}  // namespace sghydro
