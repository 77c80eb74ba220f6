#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sghydro/hydro.hpp"
#include "sghydro/rate.hpp"

using namespace sghydro;

namespace {

const std::vector<double> kRhoBar{0.8, 0.2, 0.5};

VertexFunction flat_start(const WeightedGraph& g, double value) {
  VertexFunction r(g.num_vertices(), value);
  for (std::size_t i = 0; i < 3; ++i) r[g.boundary()[i]] = kRhoBar[i];
  return r;
}

double max_residual(const PdeSolution& s) { return s.weak_residual; }

}  // namespace

TEST_CASE("mobility") {
  CHECK(mobility(0.5) == 0.25);
  CHECK(mobility(0.0) == 0.0);
  CHECK(mobility(1.2) == 0.0);
  CHECK(mobility(-0.1) == 0.0);
  const auto g = build_sg(0);
  const auto chi = edge_mobility(g, VertexFunction{0.0, 1.0, 0.5});
  for (EdgeId e = 0; e < 3; ++e) {
    const auto& ed = g.edge(e);
    const double m = 0.5 * (std::vector<double>{0.0, 1.0, 0.5}[ed.tail] + std::vector<double>{0.0, 1.0, 0.5}[ed.head]);
    CHECK(chi[e] == doctest::Approx(m * (1 - m)));
  }
  const auto g2 = build_sg(2);
  const auto d = drift_divergence(g2, VertexFunction(g2.num_vertices(), 0.3), VertexFunction(g2.num_vertices(), 4.0));
  CHECK(d.vec().lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("flow without field reaches the harmonic profile") {
  const auto g = build_sg(3);
  PdeConfig c;
  c.dt = 1e-3;
  c.horizon = 10.0;
  c.record_every = 1000;
  const auto sol = solve_hydro(g, c, FieldSpec::zero(), flat_start(g, 0.5), kRhoBar);
  const auto h = oracle::harmonic_gs(g, kRhoBar);
  double dist = 0.0;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) dist = std::max(dist, std::abs(sol.trajectory.rho.back()[v] - h[v]));
  CHECK(dist <= 1e-8);
  CHECK(sol.trajectory.times.back() == 10.0);
  CHECK(sol.trajectory.size() == 11);
}

TEST_CASE("accumulated flux satisfies the conservation law exactly") {
  const auto g = build_sg(2);
  PdeConfig c;
  c.dt = 2e-3;
  c.horizon = 0.2;
  const auto field = FieldSpec::harmonic(g, {1.0, -1.0, 0.0}, TimeProfile::Sine, 1.5, 2.0, c.horizon);
  for (double theta : {0.5, 1.0}) {
    c.theta = theta;
    const auto sol = solve_hydro(g, c, field, flat_start(g, 0.4), kRhoBar);
    const auto res = conservation_check(g, sol.trajectory);
    CHECK(*std::max_element(res.begin(), res.end()) < 1e-13);
    CHECK(sol.trajectory.provenance == Provenance::Pde);
  }
}

TEST_CASE("weak-form residual is first order for the implicit scheme") {
  const auto g = build_sg(2);
  const auto field = FieldSpec::harmonic(g, {1.0, 0.0, -0.5}, TimeProfile::Sine, 1.0, 1.0, 0.5);
  PdeConfig c;
  c.horizon = 0.5;
  double prev = 0.0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    c.dt = dt;
    const double r = max_residual(solve_hydro(g, c, field, flat_start(g, 0.3), kRhoBar));
    if (prev > 0.0) CHECK(prev / r >= 1.8);
    prev = r;
  }
}

TEST_CASE("Crank-Nicolson without field reproduces the trapezoid weak form") {
  const auto g = build_sg(2);
  PdeConfig c;
  c.horizon = 0.3;
  c.dt = 1e-2;
  c.theta = 0.5;
  CHECK(max_residual(solve_hydro(g, c, FieldSpec::zero(), flat_start(g, 0.9), kRhoBar)) < 1e-12);
}

TEST_CASE("continuity defect against the mid-step current is second order") {
  const auto g = build_sg(2);
  const auto field = FieldSpec::harmonic(g, {0.5, 1.0, -1.0}, TimeProfile::Const, 2.0, 1.0, 1.0);
  auto defect = [&](double dt) {
    PdeConfig c;
    c.dt = dt;
    c.horizon = 0.05;
    const auto tr = solve_hydro(g, c, field, flat_start(g, 0.5), kRhoBar).trajectory;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
      const double t1 = tr.times[k + 1];
      const auto j = instantaneous_current(g, tr.rho[k + 1], field.at(t1, g.num_vertices()));
      const auto div = discrete_divergence(g, j);
      for (VertexId x = 0; x < g.num_vertices(); ++x) {
        if (g.is_boundary(x)) continue;
        worst = std::max(worst, std::abs(tr.rho[k + 1][x] - tr.rho[k][x] - (t1 - tr.times[k]) * div[x]));
      }
    }
    return worst;
  };
  const double a = defect(1e-3), b = defect(5e-4);
  CHECK(a / b > 3.5);
}

TEST_CASE("L1 distance between solutions does not grow") {
  const auto g = build_sg(2);
  std::mt19937_64 rng(21);
  PdeConfig c;
  c.dt = 1e-3;
  c.horizon = 0.2;
  const auto field = FieldSpec::harmonic(g, {1.0, 0.0, 0.0}, TimeProfile::Const, 0.5, 1.0, c.horizon);
  for (int pair = 0; pair < 10; ++pair) {
    auto a = oracle::vf(oracle::random_vector(g.num_vertices(), rng, 0.0, 1.0));
    auto b = oracle::vf(oracle::random_vector(g.num_vertices(), rng, 0.0, 1.0));
    for (std::size_t i = 0; i < 3; ++i) a[g.boundary()[i]] = b[g.boundary()[i]] = kRhoBar[i];
    const auto fa = solve_hydro(g, c, pair % 2 ? field : FieldSpec::zero(), a, kRhoBar);
    const auto fb = solve_hydro(g, c, pair % 2 ? field : FieldSpec::zero(), b, kRhoBar);
    const auto rep = l1_contraction_check(fa.trajectory, fb.trajectory, 1e-10);
    CHECK(rep.contractive);
    CHECK(rep.max_increase <= 1e-10);
    CHECK(rep.distances.back() < rep.distances.front());
  }
}

TEST_CASE("input checks") {
  const auto g = build_sg(1);
  PdeConfig c;
  c.horizon = 0.1;
  VertexFunction bad(g.num_vertices(), 0.5);
  bool config_error = false;
  try {
    solve_hydro(g, c, FieldSpec::zero(), bad, kRhoBar);
  } catch (const Error& e) {
    config_error = e.kind() == ErrorKind::Config;
  }
  CHECK(config_error);
  c.theta = 0.3;
  CHECK_THROWS_AS(c.validate(), Error);
  c.theta = 1.0;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("dt is shrunk to land on the horizon") {
  const auto g = build_sg(1);
  PdeConfig c;
  c.horizon = 0.1;
  c.dt = 0.03;
  const auto sol = solve_hydro(g, c, FieldSpec::zero(), flat_start(g, 0.5), kRhoBar);
  CHECK(sol.dt == doctest::Approx(0.025));
  CHECK(sol.trajectory.size() == 5);
}

TEST_CASE("single step matches the stepper used by the solver") {
  const auto g = build_sg(2);
  PdeConfig c;
  c.horizon = 0.01;
  c.dt = 0.01;
  const auto field = FieldSpec::harmonic(g, {1.0, 0.0, 0.0}, TimeProfile::Ramp, 1.0, 1.0, 1.0);
  const auto rho0 = flat_start(g, 0.6);
  const auto sol = solve_hydro(g, c, field, rho0, kRhoBar);
  const auto st = imex_step(g, PdeState{rho0, 0.0, EdgeFunction(g.num_edges())}, c, field, kRhoBar);
  CHECK((st.rho.vec() - sol.trajectory.rho.back().vec()).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK((st.accumulated_flux.vec() - sol.trajectory.flux.back().vec()).lpNorm<Eigen::Infinity>() < 1e-15);
}
