#pragma once

// Hydrodynamic equation on Gamma_N with Dirichlet reservoirs:
//   d_t rho = d*_N J,   J = -d_N rho + chi_e(rho) d_N H,   rho(a_i) = rho_bar_i.
// d*_N is the adjoint of d_N (see graph.hpp), so -d*_N d_N is the Laplacian
// of the vertex measure 1/|V|: it equals (1 + 3^-N) Lap_N at interior
// vertices. The weak form of this system is
//   <d_t rho, phi>_V = -E_N(rho, phi) + <chi_e d_N H, d_N phi>_E
// for phi vanishing on the boundary.
//
// Time stepping is an IMEX theta-scheme: the stiff diffusion is implicit,
// the drift explicit with rho at t and H at t + theta dt. The integrated
// current is accumulated with the same quadrature, so the discrete
// conservation law rho_t - rho_0 = d*_N W_t holds exactly at interior
// vertices.

#include <memory>
#include <span>
#include <vector>

#include "sghydro/field.hpp"
#include "sghydro/graph.hpp"
#include "sghydro/trajectory.hpp"

namespace sghydro {

namespace detail {
class SpdSolver;
}

/// (s (1 - s))_+
double mobility(double s);

/// chi((rho(x) + rho(y)) / 2) per edge.
EdgeFunction edge_mobility(const WeightedGraph& g, const VertexFunction& rho);

/// d*_N(chi_e d_N H_t)
VertexFunction drift_divergence(const WeightedGraph& g, const VertexFunction& rho, const VertexFunction& h_t);

/// J = -d_N rho + chi_e d_N H_t
EdgeFunction instantaneous_current(const WeightedGraph& g, const VertexFunction& rho, const VertexFunction& h_t);

struct PdeConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  double theta = 1.0;
  /// Keep every k-th step in the returned trajectory (the last step is always kept).
  std::size_t record_every = 1;

  void validate() const;
};

struct PdeState {
  VertexFunction rho;
  double t = 0.0;
  EdgeFunction accumulated_flux;
};

/// Stepper with the implicit matrix factorised once for a fixed dt.
class HydroStepper {
 public:
  HydroStepper(const WeightedGraph& g, double dt, double theta, FieldSpec field, std::vector<double> rho_bar);
  ~HydroStepper();
  HydroStepper(HydroStepper&&) noexcept;

  PdeState step(const PdeState& s) const;
  double dt() const { return dt_; }

 private:
  const WeightedGraph* g_;
  double dt_;
  double theta_;
  FieldSpec field_;
  std::vector<double> rho_bar_;
  std::vector<Eigen::Index> interior_;
  std::vector<int> interior_pos_;
  std::unique_ptr<detail::SpdSolver> solver_;
};

/// One theta-step (builds a stepper; prefer HydroStepper in loops).
PdeState imex_step(const WeightedGraph& g, const PdeState& state, const PdeConfig& config, const FieldSpec& field,
                   std::span<const double> rho_bar);

struct PdeSolution {
  Trajectory trajectory;
  /// max over the test battery and grid times of the weak-form residual.
  double weak_residual = 0.0;
  /// dt actually used (horizon / number of steps).
  double dt = 0.0;
};

/// Solves on [0, horizon]. rho0 must already satisfy rho0(a_i) = rho_bar_i
/// (Error(Config) otherwise). dt is shrunk if needed so that an integer
/// number of steps lands on the horizon.
PdeSolution solve_hydro(const WeightedGraph& g, const PdeConfig& config, const FieldSpec& field,
                        const VertexFunction& rho0, std::span<const double> rho_bar);

/// Interior test functions used for the weak-form residual: products of the
/// corner harmonic functions on three-corner graphs, interior vertex
/// indicators otherwise.
std::vector<VertexFunction> default_test_battery(const WeightedGraph& g);

/// Per grid time t_k: max over the battery of
///   | <rho_k - rho_0, phi>_V + int_0^t_k E_N(rho, phi) - int_0^t_k <chi_e d_N H, d_N phi>_E |
/// with trapezoidal time integrals on the trajectory grid.
std::vector<double> weak_form_residual(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field,
                                       const std::vector<VertexFunction>& battery);

struct L1Report {
  std::vector<double> distances;
  double max_increase = 0.0;
  bool contractive = true;
};

/// (1/|V|) sum_x |rho1_t(x) - rho2_t(x)| per grid time; flags any increase
/// beyond `tolerance`.
L1Report l1_contraction_check(const Trajectory& a, const Trajectory& b, double tolerance = 1e-12);

}  // namespace sghydro
