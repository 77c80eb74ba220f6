#include "sghydro/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linsolve.hpp"

namespace sghydro {

double mobility(double s) { return std::max(s * (1.0 - s), 0.0); }

EdgeFunction edge_mobility(const WeightedGraph& g, const VertexFunction& rho) {
  check_size(g, rho, "edge_mobility");
  EdgeFunction chi(g.num_edges());
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const auto& e = g.edge(static_cast<EdgeId>(i));
    chi[i] = mobility(0.5 * (rho[e.tail] + rho[e.head]));
  }
  return chi;
}

VertexFunction drift_divergence(const WeightedGraph& g, const VertexFunction& rho, const VertexFunction& h_t) {
  EdgeFunction flux = discrete_gradient(g, h_t);
  flux.vec().array() *= edge_mobility(g, rho).vec().array();
  return discrete_divergence(g, flux);
}

EdgeFunction instantaneous_current(const WeightedGraph& g, const VertexFunction& rho, const VertexFunction& h_t) {
  EdgeFunction drift = discrete_gradient(g, h_t);
  drift.vec().array() *= edge_mobility(g, rho).vec().array();
  return drift - discrete_gradient(g, rho);
}

void PdeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Config, "dt must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) fail(ErrorKind::Config, "T must be finite and >= 0");
  if (!(theta >= 0.5 && theta <= 1.0)) fail(ErrorKind::Config, "theta must lie in [1/2, 1]");
  if (record_every == 0) fail(ErrorKind::Config, "record_every must be >= 1");
}

HydroStepper::HydroStepper(const WeightedGraph& g, double dt, double theta, FieldSpec field, std::vector<double> rho_bar)
    : g_(&g), dt_(dt), theta_(theta), field_(std::move(field)), rho_bar_(std::move(rho_bar)) {
  if (rho_bar_.size() != g.boundary().size())
    fail(ErrorKind::InvalidArgument, "expected " + std::to_string(g.boundary().size()) + " boundary densities");
  interior_pos_.assign(g.num_vertices(), -1);
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (!g.is_boundary(v)) {
      interior_pos_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
  // I - theta dt L on interior rows, L f(x) = s sum_y c (f(y) - f(x))
  const double s = static_cast<double>(g.num_vertices()) * g.energy_scale();
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < interior_.size(); ++r) {
    const auto x = static_cast<VertexId>(interior_[r]);
    double diag = 1.0;
    for (const auto& inc : g.incident(x)) {
      const double w = theta_ * dt_ * s * g.edge(inc.edge).conductance;
      diag += w;
      const int col = interior_pos_[inc.other];
      if (col >= 0) trips.emplace_back(static_cast<Eigen::Index>(r), col, -w);
    }
    trips.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r), diag);
  }
  const auto n = static_cast<Eigen::Index>(interior_.size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  solver_ = std::make_unique<detail::SpdSolver>(std::move(a));
}

HydroStepper::~HydroStepper() = default;
HydroStepper::HydroStepper(HydroStepper&&) noexcept = default;

PdeState HydroStepper::step(const PdeState& st) const {
  const auto& g = *g_;
  const double s = static_cast<double>(g.num_vertices()) * g.energy_scale();
  const VertexFunction h = field_.at(st.t + theta_ * dt_, g.num_vertices());
  const VertexFunction lap = measure_laplacian(g, st.rho);
  const VertexFunction drift = drift_divergence(g, st.rho, h);

  Eigen::VectorXd rhs(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t r = 0; r < interior_.size(); ++r) {
    const auto x = static_cast<VertexId>(interior_[r]);
    double b = st.rho[x] + dt_ * ((1.0 - theta_) * lap[x] + drift[x]);
    for (const auto& inc : g.incident(x)) {
      const int bi = g.boundary_index(inc.other);
      if (bi >= 0) b += theta_ * dt_ * s * g.edge(inc.edge).conductance * rho_bar_[static_cast<std::size_t>(bi)];
    }
    rhs[static_cast<Eigen::Index>(r)] = b;
  }
  const Eigen::VectorXd sol = solver_->solve(rhs);

  PdeState next;
  next.t = st.t + dt_;
  next.rho = VertexFunction(g.num_vertices());
  for (std::size_t r = 0; r < interior_.size(); ++r) next.rho[static_cast<std::size_t>(interior_[r])] = sol[static_cast<Eigen::Index>(r)];
  for (std::size_t i = 0; i < g.boundary().size(); ++i) next.rho[g.boundary()[i]] = rho_bar_[i];

  // same quadrature as the density update: theta-weighted diffusion flux,
  // explicit drift flux
  EdgeFunction flux = discrete_gradient(g, h);
  flux.vec().array() *= edge_mobility(g, st.rho).vec().array();
  flux.vec() -= theta_ * discrete_gradient(g, next.rho).vec() + (1.0 - theta_) * discrete_gradient(g, st.rho).vec();
  next.accumulated_flux = st.accumulated_flux;
  next.accumulated_flux.vec() += dt_ * flux.vec();
  return next;
}

PdeState imex_step(const WeightedGraph& g, const PdeState& state, const PdeConfig& config, const FieldSpec& field,
                   std::span<const double> rho_bar) {
  config.validate();
  check_size(g, state.rho, "imex_step");
  check_size(g, state.accumulated_flux, "imex_step");
  HydroStepper stepper(g, config.dt, config.theta, field, {rho_bar.begin(), rho_bar.end()});
  return stepper.step(state);
}

std::vector<VertexFunction> default_test_battery(const WeightedGraph& g) {
  std::vector<VertexFunction> out;
  if (g.boundary().size() == 3) {
    const auto h0 = solve_harmonic(g, std::array{1.0, 0.0, 0.0});
    const auto h1 = solve_harmonic(g, std::array{0.0, 1.0, 0.0});
    const auto h2 = solve_harmonic(g, std::array{0.0, 0.0, 1.0});
    auto prod = [](const VertexFunction& a, const VertexFunction& b) {
      return VertexFunction(Eigen::VectorXd(a.vec().array() * b.vec().array()));
    };
    out.push_back(prod(h0, h1));
    out.push_back(prod(h1, h2));
    out.push_back(prod(h0, h2));
    out.push_back(27.0 * prod(prod(h0, h1), h2));
    for (VertexId b : g.boundary())
      for (auto& f : out) f[b] = 0.0;
    return out;
  }
  for (VertexId v = 0; v < g.num_vertices() && out.size() < 5; ++v)
    if (!g.is_boundary(v)) {
      VertexFunction f(g.num_vertices());
      f[v] = 1.0;
      out.push_back(std::move(f));
    }
  return out;
}

PdeSolution solve_hydro(const WeightedGraph& g, const PdeConfig& config, const FieldSpec& field,
                        const VertexFunction& rho0, std::span<const double> rho_bar) {
  config.validate();
  check_size(g, rho0, "solve_hydro");
  if (rho_bar.size() != g.boundary().size())
    fail(ErrorKind::Config, "expected " + std::to_string(g.boundary().size()) + " boundary densities");
  for (std::size_t i = 0; i < rho_bar.size(); ++i)
    if (std::abs(rho0[g.boundary()[i]] - rho_bar[i]) > 1e-12)
      fail(ErrorKind::Config, "initial density violates the boundary condition rho0(a_i) = rho_bar_i at corner " +
                                  std::to_string(i) + " (" + std::to_string(rho0[g.boundary()[i]]) + " vs " +
                                  std::to_string(rho_bar[i]) + ")");

  auto steps = static_cast<std::size_t>(std::ceil(config.horizon / config.dt - 1e-9));
  const double dt = steps ? config.horizon / static_cast<double>(steps) : config.dt;
  HydroStepper stepper(g, dt, config.theta, field, {rho_bar.begin(), rho_bar.end()});

  PdeSolution out;
  out.dt = dt;
  auto& tr = out.trajectory;
  tr.provenance = Provenance::Pde;
  PdeState st{rho0, 0.0, EdgeFunction(g.num_edges())};
  tr.times.push_back(0.0);
  tr.rho.push_back(st.rho);
  tr.flux.push_back(st.accumulated_flux);
  for (std::size_t k = 1; k <= steps; ++k) {
    st = stepper.step(st);
    st.t = static_cast<double>(k) * dt;  // no drift from repeated addition
    if (k % config.record_every == 0 || k == steps) {
      tr.times.push_back(st.t);
      tr.rho.push_back(st.rho);
      tr.flux.push_back(st.accumulated_flux);
    }
  }
  const auto res = weak_form_residual(g, tr, field, default_test_battery(g));
  out.weak_residual = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  return out;
}

std::vector<double> weak_form_residual(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field,
                                       const std::vector<VertexFunction>& battery) {
  const std::size_t K = traj.size();
  std::vector<double> worst(K, 0.0);
  if (K == 0) return worst;
  std::vector<EdgeFunction> drift(K);
  for (std::size_t k = 0; k < K; ++k) {
    drift[k] = discrete_gradient(g, field.at(traj.times[k], g.num_vertices()));
    drift[k].vec().array() *= edge_mobility(g, traj.rho[k]).vec().array();
  }
  for (const auto& phi : battery) {
    const auto grad_phi = discrete_gradient(g, phi);
    double integral = 0.0;
    double prev = graph_energy(g, traj.rho[0], phi) - edge_inner_product(g, drift[0], grad_phi);
    for (std::size_t k = 1; k < K; ++k) {
      const double cur = graph_energy(g, traj.rho[k], phi) - edge_inner_product(g, drift[k], grad_phi);
      integral += 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
      prev = cur;
      const double r = std::abs(vertex_inner_product(g, traj.rho[k] - traj.rho[0], phi) + integral);
      worst[k] = std::max(worst[k], r);
    }
  }
  return worst;
}

L1Report l1_contraction_check(const Trajectory& a, const Trajectory& b, double tolerance) {
  if (a.times.size() != b.times.size()) fail(ErrorKind::InvalidArgument, "l1_contraction_check: grids differ in length");
  L1Report rep;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12) fail(ErrorKind::InvalidArgument, "l1_contraction_check: grids differ");
    if (a.rho[k].size() != b.rho[k].size()) fail(ErrorKind::InvalidArgument, "l1_contraction_check: sizes differ");
    const double d = (a.rho[k].vec() - b.rho[k].vec()).lpNorm<1>() / static_cast<double>(a.rho[k].size());
    if (k > 0) {
      const double inc = d - rep.distances.back();
      rep.max_increase = std::max(rep.max_increase, inc);
      if (inc > tolerance) rep.contractive = false;
    }
    rep.distances.push_back(d);
  }
  return rep;
}

}  // namespace sghydro
