#pragma once

// Dynamical rate function on density/current paths.
//
// For a trajectory on the grid t_0 < ... < t_K the flux anomaly on slice k is
//   a_k = (W_{k+1} - W_k) / dt_k + d_N rho_{k+1/2},
// rho_{k+1/2} the average of the endpoint densities. The symmetric form is
//   I = 1/2 sum_k dt_k <chi_e^-1 a_k, a_k>_E.
// The tilted functional J_H and its supremum over H are computed separately.
// Completing the square gives sup_H J_H = 1/4 sum_k dt_k <chi^-1 a, a> when
// chi^-1 a is a gradient, i.e. half of the symmetric form; both numbers are
// reported and the ratio is not reconciled.

#include <optional>
#include <string>
#include <vector>

#include "sghydro/field.hpp"
#include "sghydro/graph.hpp"
#include "sghydro/trajectory.hpp"

namespace sghydro {

struct RateOptions {
  double eps_chi = 1e-10;
  double eps_flux = 1e-8;
  /// Tolerance for membership in the conservation-law set.
  double tol_conservation = 1e-8;
};

struct RateValue {
  bool infinite = false;
  double value = 0.0;
  /// Empty when finite; otherwise names the failed constraint.
  std::string diagnostics;

  static RateValue finite(double v) { return {false, v, {}}; }
  static RateValue infinity(std::string why) { return {true, 0.0, std::move(why)}; }
};

/// Per grid time: max over interior x of
///   |<1_x, rho_t - rho_0>_V - <d_N 1_x, W_t>_E| = |rho_t(x) - rho_0(x) - (d*_N W_t)(x)| / |V|.
std::vector<double> conservation_check(const WeightedGraph& g, const Trajectory& traj);

struct SymmetricRate {
  RateValue rate;
  /// Left endpoint and contribution of each slice (empty when infinite).
  std::vector<double> slice_times;
  std::vector<double> slice_values;
  double conservation_residual_max = 0.0;
};

/// Flux anomaly a_k on slice k.
EdgeFunction flux_anomaly(const WeightedGraph& g, const Trajectory& traj, std::size_t k);

/// Throws InvalidArgument for fewer than two grid times or an invalid
/// trajectory.
SymmetricRate rate_symmetric(const WeightedGraph& g, const Trajectory& traj, const RateOptions& opt = {});

/// The five terms of J_H, each already signed:
///   T1 = <d H_T, W_T>
///   T2 = -sum dt <d (H_{k+1} - H_k)/dt, W_{k+1/2}>
///   T3 = -sum dt <L_N H, rho>_V over interior vertices
///   T4 = -sum dt <chi_e d H, d H>
///   T5 = sum_i rho_bar_i sum dt (dn H)(a_i)
/// with H, rho and W at slice midpoints (averages of grid samples). On
/// Gamma_N the interior product <L_N H, rho>_V equals (2/3) 3^-N sum Lap_N H rho.
struct VariationalTerms {
  double boundary_pairing = 0.0;
  double time_derivative = 0.0;
  double laplacian = 0.0;
  double mobility = 0.0;
  double reservoir = 0.0;

  double total() const { return boundary_pairing + time_derivative + laplacian + mobility + reservoir; }
};

VariationalTerms rate_variational_terms(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field,
                                        std::span<const double> rho_bar);
double rate_variational(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field,
                        std::span<const double> rho_bar);

/// sum_k dt [<d H, a_k> - <chi_e d H, d H>] at slice midpoints. Equal to
/// rate_variational whenever rho(a_i) = rho_bar_i on the whole grid.
double rate_variational_compact(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field);

struct SliceOptimum {
  VertexFunction h;
  double value = 0.0;
};

/// Maximises H -> <d H, a> - <chi d H, d H> by solving
/// d*(chi d H) = d*(a / 2) on the edges with chi > eps_chi. The value is
/// 1/2 <d H*, a>. H* has zero mean on each connected component of the
/// non-degenerate subgraph. Throws Numerical when every edge is degenerate.
SliceOptimum optimize_slice(const WeightedGraph& g, const EdgeFunction& chi, const EdgeFunction& a,
                            double eps_chi = 1e-10);

struct TiltOptimum {
  double value = 0.0;
  std::vector<double> slice_values;
  std::vector<VertexFunction> fields;
};

TiltOptimum optimize_tilt(const WeightedGraph& g, const Trajectory& traj, const RateOptions& opt = {});

/// JSON report {value | "infinite", diagnostics, per_slice:[{t, slice_value}],
/// conservation_residual_max, variational_vs_symmetric_ratio}. The ratio is
/// null when either value is missing, infinite or zero.
std::string rate_report_json(const SymmetricRate& sym, const std::optional<TiltOptimum>& tilt);

}  // namespace sghydro
