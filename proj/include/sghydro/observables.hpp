#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sghydro/graph.hpp"
#include "sghydro/wasep.hpp"

namespace sghydro {

/// (1/|V|) sum_x eta(x) G(x)
double density_pairing(const WeightedGraph& g, const Configuration& eta, const VertexFunction& test);
double density_pairing(const WeightedGraph& g, const VertexFunction& rho, const VertexFunction& test);

/// accel^-1 sum_e W(e) (d_N F)(e); on Gamma_N this is 3^-N sum W(e) [F(head) - F(tail)].
double current_pairing(const WeightedGraph& g, std::span<const std::int64_t> ledger, const VertexFunction& test);
double current_pairing(const WeightedGraph& g, const EdgeFunction& ledger, const VertexFunction& test);

/// Constants relating the accelerated particle system to the hydrodynamic
/// solver. The mean particle density follows
///   d/dt rho = time * d*_N(-d_N rho + field * chi d_N H)
/// so the PDE is run at s = time * t with tilt field * H, and a particle
/// current_pairing corresponds to current * <d_N F, W_pde(s)>_E.
struct HydroScaling {
  double time;     // kappa_N = accel / (|V| (5/3)^N) = 3^N / |V_N| on Gamma_N
  double field;    // 2, first-order expansion of the exponential tilt
  double current;  // 1 / kappa_N
};
HydroScaling hydro_scaling(const WeightedGraph& g);

struct EnsembleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double reference = 0.0;
  double delta = 0.0;
  double deviation_fraction = 0.0;
  /// 95% Wilson interval for the deviation probability.
  double wilson_low = 0.0;
  double wilson_high = 0.0;
};

/// Mean, standard error and the fraction of replicas with
/// |value - reference| > delta. Needs at least two values.
EnsembleStats ensemble_stats(std::span<const double> values, double reference, double delta);

/// Batch-means estimate of the standard error of a time average from
/// equal-length batch averages.
double batch_means_std_error(std::span<const double> batch_averages);

}  // namespace sghydro
