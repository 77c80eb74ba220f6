#include "sghydro/rate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "linsolve.hpp"
#include "sghydro/hydro.hpp"

namespace sghydro {

namespace {

void require_slices(const WeightedGraph& g, const Trajectory& traj, const char* what) {
  traj.validate(g);
  if (traj.size() < 2) fail(ErrorKind::InvalidArgument, std::string(what) + ": need at least two grid times");
}

VertexFunction midpoint(const VertexFunction& a, const VertexFunction& b) { return 0.5 * (a + b); }

}  // namespace

std::vector<double> conservation_check(const WeightedGraph& g, const Trajectory& traj) {
  traj.validate(g);
  const double nv = static_cast<double>(g.num_vertices());
  std::vector<double> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto div = discrete_divergence(g, traj.flux[k]);
    double worst = 0.0;
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
      if (g.is_boundary(x)) continue;
      worst = std::max(worst, std::abs(traj.rho[k][x] - traj.rho[0][x] - div[x]) / nv);
    }
    out.push_back(worst);
  }
  return out;
}

EdgeFunction flux_anomaly(const WeightedGraph& g, const Trajectory& traj, std::size_t k) {
  if (k + 1 >= traj.size()) fail(ErrorKind::InvalidArgument, "flux_anomaly: slice index out of range");
  const double dt = traj.times[k + 1] - traj.times[k];
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "flux_anomaly: repeated grid time");
  EdgeFunction a = (1.0 / dt) * (traj.flux[k + 1] - traj.flux[k]);
  a += discrete_gradient(g, midpoint(traj.rho[k], traj.rho[k + 1]));
  return a;
}

SymmetricRate rate_symmetric(const WeightedGraph& g, const Trajectory& traj, const RateOptions& opt) {
  require_slices(g, traj, "rate_symmetric");
  SymmetricRate out;
  const auto residuals = conservation_check(g, traj);
  out.conservation_residual_max = *std::max_element(residuals.begin(), residuals.end());
  if (out.conservation_residual_max > opt.tol_conservation) {
    out.rate = RateValue::infinity("conservation: residual " + std::to_string(out.conservation_residual_max) +
                                   " exceeds " + std::to_string(opt.tol_conservation));
    return out;
  }
  const double inv_scale = 1.0 / g.energy_scale();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    const auto a = flux_anomaly(g, traj, k);
    const auto chi = edge_mobility(g, midpoint(traj.rho[k], traj.rho[k + 1]));
    double q = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (chi[e] <= opt.eps_chi) {
        if (std::abs(a[e]) > opt.eps_flux) {
          out.slice_times.clear();
          out.slice_values.clear();
          out.rate = RateValue::infinity("mobility degeneracy: edge " + std::to_string(e) + " carries flux " +
                                         std::to_string(a[e]) + " at t = " + std::to_string(traj.times[k]));
          return out;
        }
        continue;
      }
      q += g.edge(static_cast<EdgeId>(e)).conductance * a[e] * a[e] / chi[e];
    }
    const double v = 0.5 * dt * inv_scale * q;
    out.slice_times.push_back(traj.times[k]);
    out.slice_values.push_back(v);
    total += v;
  }
  out.rate = RateValue::finite(total);
  return out;
}

VariationalTerms rate_variational_terms(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field,
                                        std::span<const double> rho_bar) {
  require_slices(g, traj, "rate_variational");
  if (rho_bar.size() != g.boundary().size())
    fail(ErrorKind::InvalidArgument, "rate_variational: expected " + std::to_string(g.boundary().size()) +
                                         " boundary densities");
  const std::size_t nv = g.num_vertices();
  const double inv_nv = 1.0 / static_cast<double>(nv);
  std::vector<VertexFunction> h(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) h[k] = field.at(traj.times[k], nv);

  VariationalTerms t;
  t.boundary_pairing = edge_inner_product(g, discrete_gradient(g, h.back()), traj.flux.back());
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    const auto h_mid = midpoint(h[k], h[k + 1]);
    const auto rho_mid = midpoint(traj.rho[k], traj.rho[k + 1]);
    const auto w_mid = 0.5 * (traj.flux[k] + traj.flux[k + 1]);
    const auto grad_h = discrete_gradient(g, h_mid);

    t.time_derivative -= edge_inner_product(g, discrete_gradient(g, h[k + 1] - h[k]), w_mid);

    const auto lap = measure_laplacian(g, h_mid);
    double s = 0.0;
    for (VertexId x = 0; x < nv; ++x)
      if (!g.is_boundary(x)) s += lap[x] * rho_mid[x];
    t.laplacian -= dt * s * inv_nv;

    EdgeFunction chi_grad = grad_h;
    chi_grad.vec().array() *= edge_mobility(g, rho_mid).vec().array();
    t.mobility -= dt * edge_inner_product(g, chi_grad, grad_h);

    for (std::size_t i = 0; i < g.boundary().size(); ++i)
      t.reservoir += dt * rho_bar[i] * normal_derivative(g, h_mid, g.boundary()[i]);
  }
  return t;
}

double rate_variational(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field,
                        std::span<const double> rho_bar) {
  return rate_variational_terms(g, traj, field, rho_bar).total();
}

double rate_variational_compact(const WeightedGraph& g, const Trajectory& traj, const FieldSpec& field) {
  require_slices(g, traj, "rate_variational_compact");
  const std::size_t nv = g.num_vertices();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    const auto grad_h = discrete_gradient(g, midpoint(field.at(traj.times[k], nv), field.at(traj.times[k + 1], nv)));
    EdgeFunction chi_grad = grad_h;
    chi_grad.vec().array() *= edge_mobility(g, midpoint(traj.rho[k], traj.rho[k + 1])).vec().array();
    total += dt * (edge_inner_product(g, grad_h, flux_anomaly(g, traj, k)) - edge_inner_product(g, chi_grad, grad_h));
  }
  return total;
}

SliceOptimum optimize_slice(const WeightedGraph& g, const EdgeFunction& chi, const EdgeFunction& a, double eps_chi) {
  check_size(g, chi, "optimize_slice");
  check_size(g, a, "optimize_slice");
  const std::size_t nv = g.num_vertices();
  const double s = g.energy_scale();

  // components of the non-degenerate subgraph
  std::vector<VertexId> parent(nv);
  std::iota(parent.begin(), parent.end(), VertexId{0});
  auto find = [&](VertexId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  bool any = false;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (chi[e] <= eps_chi) continue;
    any = true;
    const auto& ed = g.edge(static_cast<EdgeId>(e));
    parent[find(ed.tail)] = find(ed.head);
  }
  if (!any) fail(ErrorKind::Numerical, "optimize_slice: mobility vanishes on every edge");

  // pin the smallest vertex of each component
  std::vector<Eigen::Index> pos(nv, -1);
  std::vector<bool> root_seen(nv, false);
  std::vector<VertexId> free_vertices;
  for (VertexId v = 0; v < nv; ++v) {
    const auto r = find(v);
    if (!root_seen[r]) {
      root_seen[r] = true;
      continue;
    }
    pos[v] = static_cast<Eigen::Index>(free_vertices.size());
    free_vertices.push_back(v);
  }

  // s sum_e c chi (dH)(dphi) = sum_e c (a/2) (dphi) for all phi
  const auto n = static_cast<Eigen::Index>(free_vertices.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (chi[e] <= eps_chi) continue;
    const auto& ed = g.edge(static_cast<EdgeId>(e));
    const double w = s * ed.conductance * chi[e];
    const double b = 0.5 * ed.conductance * a[e];
    const auto pt = pos[ed.tail], ph = pos[ed.head];
    if (pt >= 0) {
      trips.emplace_back(pt, pt, w);
      rhs[pt] -= b;
    }
    if (ph >= 0) {
      trips.emplace_back(ph, ph, w);
      rhs[ph] += b;
    }
    if (pt >= 0 && ph >= 0) {
      trips.emplace_back(pt, ph, -w);
      trips.emplace_back(ph, pt, -w);
    }
  }
  SliceOptimum out;
  out.h = VertexFunction(nv);
  if (n > 0) {
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    const Eigen::VectorXd sol = detail::SpdSolver(std::move(m)).solve(rhs);
    for (Eigen::Index i = 0; i < n; ++i) out.h[free_vertices[static_cast<std::size_t>(i)]] = sol[i];
  }
  std::vector<double> sum(nv, 0.0);
  std::vector<double> count(nv, 0.0);
  for (VertexId v = 0; v < nv; ++v) {
    sum[find(v)] += out.h[v];
    count[find(v)] += 1.0;
  }
  for (VertexId v = 0; v < nv; ++v) out.h[v] -= sum[find(v)] / count[find(v)];

  // 1/2 <dH*, a> restricted to the edges that enter the optimisation
  const auto grad = discrete_gradient(g, out.h);
  double v = 0.0;
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    if (chi[e] > eps_chi) v += g.edge(static_cast<EdgeId>(e)).conductance * grad[e] * a[e];
  out.value = 0.5 * v / s;
  return out;
}

TiltOptimum optimize_tilt(const WeightedGraph& g, const Trajectory& traj, const RateOptions& opt) {
  require_slices(g, traj, "optimize_tilt");
  TiltOptimum out;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    const auto chi = edge_mobility(g, midpoint(traj.rho[k], traj.rho[k + 1]));
    auto slice = optimize_slice(g, chi, flux_anomaly(g, traj, k), opt.eps_chi);
    out.slice_values.push_back(dt * slice.value);
    out.value += dt * slice.value;
    out.fields.push_back(std::move(slice.h));
  }
  return out;
}

std::string rate_report_json(const SymmetricRate& sym, const std::optional<TiltOptimum>& tilt) {
  nlohmann::ordered_json j;
  if (sym.rate.infinite)
    j["value"] = "infinite";
  else
    j["value"] = sym.rate.value;
  j["diagnostics"] = sym.rate.diagnostics.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(sym.rate.diagnostics);
  auto slices = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < sym.slice_values.size(); ++k)
    slices.push_back({{"t", sym.slice_times[k]}, {"slice_value", sym.slice_values[k]}});
  j["per_slice"] = std::move(slices);
  j["conservation_residual_max"] = sym.conservation_residual_max;
  if (tilt && !sym.rate.infinite && sym.rate.value > 0.0) {
    j["variational_value"] = tilt->value;
    j["variational_vs_symmetric_ratio"] = tilt->value / sym.rate.value;
  } else {
    if (tilt) j["variational_value"] = tilt->value;
    j["variational_vs_symmetric_ratio"] = nullptr;
  }
  return j.dump(1) + "\n";
}

}  // namespace sghydro
