// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failed criteria (0 when everything passes).
//
// usage: acceptance [work_dir]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "experiment.hpp"
#include "oracles.hpp"
#include "sghydro/generator.hpp"
#include "sghydro/hydro.hpp"
#include "sghydro/observables.hpp"
#include "sghydro/rate.hpp"
#include "sghydro/wasep.hpp"

using namespace sghydro;
namespace fs = std::filesystem;

namespace {

const std::vector<double> kRhoBar{0.8, 0.2, 0.5};

// Collects failed sub-checks of one criterion.
struct Checker {
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  void note(std::string s) { notes.push_back(std::move(s)); }
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------

void criterion1(Checker& c) {
  for (unsigned n = 0; n <= 6; ++n) {
    const auto g = build_sg(n);
    const auto o = oracle::sg(n);
    const double p = std::pow(3.0, n + 1);
    c.expect(g.num_vertices() == (p + 3) / 2 && g.num_vertices() == o.vertices.size(),
             "vertex count at N=" + std::to_string(n));
    c.expect(g.num_edges() == p && g.num_edges() == o.edges.size(), "edge count at N=" + std::to_string(n));
  }

  std::mt19937_64 rng(1);
  for (unsigned n = 0; n < 5; ++n) {
    const auto coarse = build_sg(n), fine = build_sg(n + 1);
    const auto f = oracle::vf(oracle::random_vector(coarse.num_vertices(), rng));
    const auto ext = sg_harmonic_refine(coarse, fine, f);
    const auto emb = sg_embedding(coarse, fine);
    bool restricts = true;
    for (std::size_t v = 0; v < emb.size(); ++v) restricts = restricts && ext[emb[v]] == f[v];
    const double e0 = std::pow(5.0 / 3.0, n) * oracle::dirichlet_sum(coarse, {f.values().begin(), f.values().end()});
    const double e1 =
        std::pow(5.0 / 3.0, n + 1) * oracle::dirichlet_sum(fine, {ext.values().begin(), ext.values().end()});
    c.expect(restricts && std::abs(e1 - e0) <= 1e-12 * std::max(1.0, e0),
             "energy under harmonic extension at N=" + std::to_string(n) + ": " + fmt(std::abs(e1 - e0)));
  }

  // 1/5-2/5 rule on Gamma_1: corner values (1, 0, 0)
  {
    const auto g = build_sg(1);
    const auto h = solve_harmonic(g, std::array{1.0, 0.0, 0.0});
    const auto& xy = g.coords();
    const auto a0 = g.boundary()[0];
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      if (g.is_boundary(v)) continue;
      const bool adjacent = std::hypot(xy[v].x - xy[a0].x, xy[v].y - xy[a0].y) < 0.75;
      c.expect(std::abs(h[v] - (adjacent ? 0.4 : 0.2)) <= 1e-15, "1/5-2/5 value at vertex " + std::to_string(v));
    }
  }

  for (unsigned n = 0; n <= 2; ++n) {
    const auto g = build_sg(n);
    const double r = effective_resistance(g, g.boundary()[0], g.boundary()[1]);
    c.expect(std::abs(r - (2.0 / 3.0) * std::pow(5.0 / 3.0, n)) <= 1e-12, "R_eff at N=" + std::to_string(n));
  }

  std::array<double, 3> first{};
  for (unsigned n = 0; n <= 6; ++n) {
    const auto g = build_sg(n);
    const auto h = solve_harmonic(g, std::array{1.0, 0.0, 0.0});
    for (int i = 0; i < 3; ++i) {
      const double d = normal_derivative(g, h, g.boundary()[i]);
      if (n == 0) first[i] = d;
      c.expect(std::abs(d - first[i]) <= 1e-12, "normal derivative at N=" + std::to_string(n));
    }
  }
}

// ---------------------------------------------------------------------------

Eigen::VectorXd dense_stationary(const oracle::DenseChain& ch) {
  const auto ns = static_cast<Eigen::Index>(ch.q.size());
  Eigen::MatrixXd a(ns + 1, ns);
  for (Eigen::Index s = 0; s < ns; ++s)
    for (Eigen::Index t = 0; t < ns; ++t) a(t, s) = ch.q[std::size_t(s)][std::size_t(t)];
  a.row(ns).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ns + 1);
  b[ns] = 1.0;
  return a.colPivHouseholderQr().solve(b);
}

std::vector<double> dense_occupation(const Eigen::VectorXd& pi, std::size_t n) {
  std::vector<double> m(n, 0.0);
  for (Eigen::Index s = 0; s < pi.size(); ++s)
    for (std::size_t v = 0; v < n; ++v)
      if ((std::size_t(s) >> v) & 1u) m[v] += pi[s];
  return m;
}

void criterion2(Checker& c) {
  for (unsigned n : {0u, 1u}) {
    const auto g = build_sg(n);
    const std::vector<double> lp{0.6, 0.6, 0.6}, lm{0.4, 0.4, 0.4};
    const auto pi = stationary_distribution(generator_matrix(g, VertexFunction(g.num_vertices()), {lp, lm}, g.acceleration()));
    double worst = 0.0;
    for (Eigen::Index s = 0; s < pi.size(); ++s) {
      double p = 1.0;
      for (std::size_t v = 0; v < g.num_vertices(); ++v) p *= ((std::size_t(s) >> v) & 1u) ? 0.6 : 0.4;
      worst = std::max(worst, std::abs(pi[s] - p));
    }
    c.expect(worst <= 1e-12, "product Bernoulli on Gamma_" + std::to_string(n) + ": " + fmt(worst));
  }

  const auto g = build_sg(1);
  const auto rates = BoundaryRates::from_density(kRhoBar, 1.0);
  const VertexFunction zero(g.num_vertices());
  const auto pi = stationary_distribution(generator_matrix(g, zero, rates, g.acceleration()));
  const auto pi_dense = dense_stationary(oracle::dense_generator(g, std::vector<double>(g.num_vertices(), 0.0),
                                                                 rates.lambda_plus, rates.lambda_minus, g.acceleration()));
  c.expect((pi - pi_dense).cwiseAbs().maxCoeff() <= 1e-12, "stationary vector against the dense oracle");

  const auto m = oracle::vf(dense_occupation(pi_dense, g.num_vertices()));
  double lap = 0.0;
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (g.is_boundary(x)) continue;
    double s = 0.0;
    for (const auto& inc : g.incident(x)) s += m[inc.other] - m[x];
    lap = std::max(lap, std::abs(s));
  }
  c.expect(lap <= 1e-10, "interior harmonicity of the stationary profile: " + fmt(lap));

  // stationary current rate: each edge carries E[c (eta(x) - eta(y))] net
  // jumps x -> y per unit unaccelerated time; paired with F it is -E_1(m, F).
  const auto j = expected_current_rate(g, zero, g.acceleration(), pi);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = oracle::random_vector(g.num_vertices(), rng);
    double energy = 0.0;
    for (const auto& e : g.edges()) energy += e.conductance * (m[e.head] - m[e.tail]) * (f[e.head] - f[e.tail]);
    energy *= 5.0 / 3.0;
    const double rate = current_pairing(g, j, oracle::vf(f));
    c.expect(std::abs(rate + energy) <= 1e-10, "current-pairing rate against E_1(m, F): " + fmt(std::abs(rate + energy)));
  }
}

// ---------------------------------------------------------------------------

void criterion3(Checker& c) {
  const auto g = build_sg(1);
  const auto rates = BoundaryRates::from_density(kRhoBar, 1.0);
  const auto pi = dense_stationary(oracle::dense_generator(g, std::vector<double>(g.num_vertices(), 0.0),
                                                           rates.lambda_plus, rates.lambda_minus, g.acceleration()));
  const auto expected = dense_occupation(pi, g.num_vertices());

  const std::uint64_t seed = 20240611;
  Configuration eta0;
  eta0.eta.assign(g.num_vertices(), 0);
  WasepSimulator sim(g, FieldSpec::zero(), rates, g.acceleration(), eta0,
                     RandomStream(seed, 0, StreamPurpose::Dynamics));
  const double horizon = 1e5;
  const int batches = 100;
  const double batch_len = horizon / batches;
  std::vector<std::vector<double>> averages(g.num_vertices());
  std::vector<double> prev(g.num_vertices(), 0.0);
  std::int64_t worst_defect = 0;
  std::uint64_t checked = 0;
  for (int b = 1; b <= batches; ++b) {
    const double end = batch_len * b;
    while (sim.step(end)) {
      const auto& st = sim.state();
      worst_defect = std::max(worst_defect, conservation_defect(g, eta0, st.config, st.current, st.boundary_flips));
      ++checked;
    }
    const auto occ = sim.occupation_integral();
    for (std::size_t v = 0; v < occ.size(); ++v) {
      averages[v].push_back((occ[v] - prev[v]) / batch_len);
      prev[v] = occ[v];
    }
  }
  c.note(std::to_string(checked) + " accepted events, " + std::to_string(sim.null_events()) +
         " rejected candidates, conservation checked after each");
  c.expect(worst_defect == 0 && checked > 0, "conservation defect " + std::to_string(worst_defect) + " after " +
                                                 std::to_string(checked) + " events");
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    double mean = 0.0;
    for (double a : averages[v]) mean += a;
    mean /= batches;
    const double se = batch_means_std_error(averages[v]);
    c.note("vertex " + std::to_string(v) + ": " + fmt(mean) + " vs " + fmt(expected[v]) + " (se " + fmt(se) + ")");
    c.expect(std::abs(mean - expected[v]) <= 3.0 * se,
             "vertex " + std::to_string(v) + ": " + fmt(mean) + " vs " + fmt(expected[v]) + " (se " + fmt(se) + ")");
  }
}

// ---------------------------------------------------------------------------

struct ResultRow {
  std::string observable;
  double t, mean, stderr_, reference, tolerance;
  bool within;
};

std::vector<ResultRow> read_results(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 9) continue;
    rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), f[6] == "1"});
  }
  return rows;
}

std::vector<double> test_function(const WeightedGraph& g, const std::string& name) {
  const auto n = g.num_vertices();
  if (name == "1") return std::vector<double>(n, 1.0);
  std::vector<double> f(n);
  if (name == "x" || name == "y") {
    for (std::size_t v = 0; v < n; ++v) f[v] = name == "x" ? g.coords()[v].x : g.coords()[v].y;
    return f;
  }
  std::vector<double> corners(3, 0.0);
  corners[std::size_t(name[1] - '0')] = 1.0;
  return oracle::harmonic_gs(g, corners);
}

void lln_case(Checker& c, const fs::path& dir, const std::string& field, bool closed_form) {
  const std::string cfg = "{\"kind\": \"lln-experiment\", \"N\": 4, \"rho_bar\": [0.8, 0.2, 0.5], \"rho0\": \"harmonic\", "
                          "\"field\": " + field + ", \"replicas\": 100, \"T\": 0.5, \"sample_times\": [0.1, 0.5], "
                          "\"seed\": 4242}";
  experiment::run(cfg, dir.string(), 0);
  const auto rows = read_results(dir / "results.csv");
  c.expect(rows.size() == 20, "results.csv has " + std::to_string(rows.size()) + " rows");
  const auto g = build_sg(4);
  const auto h = oracle::harmonic_gs(g, kRhoBar);
  for (const auto& r : rows) {
    const bool current = r.observable.rfind("current:", 0) == 0;
    const double tol = current ? std::max(3 * r.stderr_, 0.05 * std::abs(r.reference)) : std::max(3 * r.stderr_, 0.02);
    c.expect(r.within && std::abs(r.mean - r.reference) <= tol,
             field + " " + r.observable + " t=" + fmt(r.t) + ": " + fmt(r.mean) + " vs " + fmt(r.reference));
    if (!closed_form) continue;
    const auto f = test_function(g, r.observable.substr(r.observable.find(':') + 1));
    double exact = 0.0;
    if (current) {
      for (const auto& e : g.edges()) exact += (h[e.head] - h[e.tail]) * (f[e.head] - f[e.tail]);
      exact *= -r.t * std::pow(5.0 / 3.0, 4);
    } else {
      for (std::size_t v = 0; v < f.size(); ++v) exact += h[v] * f[v];
      exact /= double(f.size());
    }
    c.expect(std::abs(exact - r.reference) <= 1e-8 * std::max(1.0, std::abs(exact)),
             "closed-form reference for " + r.observable + " t=" + fmt(r.t));
  }
}

void criterion4(Checker& c, const fs::path& work) {
  lln_case(c, work / "lln_zero", "\"zero\"", true);
  lln_case(c, work / "lln_wasep", "{\"type\": \"harmonic\", \"boundary\": [1, 0, 0], \"time\": \"const\"}", false);
}

// ---------------------------------------------------------------------------

VertexFunction pinned(const WeightedGraph& g, VertexFunction r) {
  for (std::size_t i = 0; i < 3; ++i) r[g.boundary()[i]] = kRhoBar[i];
  return r;
}

void criterion5(Checker& c) {
  {
    const auto g = build_sg(3);
    PdeConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 10.0;
    cfg.record_every = 10000;
    const auto sol = solve_hydro(g, cfg, FieldSpec::zero(), pinned(g, VertexFunction(g.num_vertices(), 0.5)), kRhoBar);
    const auto h = oracle::harmonic_gs(g, kRhoBar);
    double dist = 0.0;
    for (std::size_t v = 0; v < h.size(); ++v) dist = std::max(dist, std::abs(sol.trajectory.rho.back()[v] - h[v]));
    c.expect(dist <= 1e-8, "steady state distance " + fmt(dist));
  }
  {
    const auto g = build_sg(2);
    const auto field = FieldSpec::harmonic(g, {1.0, 0.0, -0.5}, TimeProfile::Sine, 1.0, 1.0, 0.5);
    PdeConfig cfg;
    cfg.horizon = 0.5;
    double prev = 0.0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      cfg.dt = dt;
      const double r = solve_hydro(g, cfg, field, pinned(g, VertexFunction(g.num_vertices(), 0.3)), kRhoBar).weak_residual;
      if (prev > 0.0) c.expect(prev / r >= 1.8, "weak residual ratio " + fmt(prev / r) + " at dt=" + fmt(dt));
      prev = r;
    }
  }
  {
    const auto g = build_sg(2);
    std::mt19937_64 rng(77);
    PdeConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 0.2;
    const auto field = FieldSpec::harmonic(g, {1.0, 0.0, 0.0}, TimeProfile::Const, 0.5, 1.0, cfg.horizon);
    for (int pair = 0; pair < 10; ++pair) {
      const auto a = pinned(g, oracle::vf(oracle::random_vector(g.num_vertices(), rng, 0.0, 1.0)));
      const auto b = pinned(g, oracle::vf(oracle::random_vector(g.num_vertices(), rng, 0.0, 1.0)));
      const auto& f = pair % 2 ? field : FieldSpec::zero();
      const auto rep = l1_contraction_check(solve_hydro(g, cfg, f, a, kRhoBar).trajectory,
                                            solve_hydro(g, cfg, f, b, kRhoBar).trajectory, 1e-10);
      c.expect(rep.contractive, "L1 increase " + fmt(rep.max_increase) + " for pair " + std::to_string(pair));
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<double> torsion(const WeightedGraph& g) {
  const double s = double(g.num_vertices()) * std::pow(5.0 / 3.0, g.scale_level());
  std::vector<double> psi(g.num_vertices(), 0.0);
  for (int it = 0; it < 20000; ++it) {
    double change = 0.0;
    for (VertexId x = 0; x < g.num_vertices(); ++x) {
      if (g.is_boundary(x)) continue;
      double sum = 0.0, deg = 0.0;
      for (const auto& inc : g.incident(x)) {
        sum += g.edge(inc.edge).conductance * psi[inc.other];
        deg += g.edge(inc.edge).conductance;
      }
      const double next = (sum + 1.0 / s) / deg;
      change = std::max(change, std::abs(next - psi[x]));
      psi[x] = next;
    }
    if (change < 1e-16) break;
  }
  return psi;
}

Trajectory pde_path(const WeightedGraph& g, const FieldSpec& f, const VertexFunction& rho0, double dt, double horizon) {
  PdeConfig cfg;
  cfg.dt = dt;
  cfg.horizon = horizon;
  return solve_hydro(g, cfg, f, rho0, kRhoBar).trajectory;
}

double tilt_cost(const WeightedGraph& g, const Trajectory& tr, const FieldSpec& f) {
  double total = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto h = f.at(tr.times[k], g.num_vertices());
    double q = 0.0;
    for (const auto& e : g.edges()) {
      const double m = 0.5 * (tr.rho[k][e.tail] + tr.rho[k][e.head]);
      const double d = h[e.head] - h[e.tail];
      q += e.conductance * m * (1 - m) * d * d;
    }
    q *= std::pow(5.0 / 3.0, g.scale_level());
    if (k) total += 0.5 * (tr.times[k] - tr.times[k - 1]) * (prev + q);
    prev = q;
  }
  return 0.5 * total;
}

void criterion6(Checker& c) {
  const auto g = build_sg(2);
  const auto h = oracle::harmonic_gs(g, kRhoBar);
  const auto psi = torsion(g);
  const double pmax = *std::max_element(psi.begin(), psi.end());
  VertexFunction bumped(g.num_vertices());
  for (std::size_t v = 0; v < h.size(); ++v) bumped[v] = h[v] + 0.1 * psi[v] / pmax;

  const auto a = rate_symmetric(g, pde_path(g, FieldSpec::zero(), bumped, 1e-3, 1.0));
  const auto b = rate_symmetric(g, pde_path(g, FieldSpec::zero(), bumped, 5e-4, 1.0));
  c.expect(!a.rate.infinite && a.rate.value <= 1e-4, "SEP path rate " + fmt(a.rate.value));
  c.expect(b.rate.value < a.rate.value, "SEP path rate under dt-halving " + fmt(b.rate.value));

  const auto f = FieldSpec::harmonic(g, {1.0, 0.0, 0.0}, TimeProfile::Const, 1.0, 1.0, 1.0);
  const auto tilted = pde_path(g, f, oracle::vf(h), 1e-3, 1.0);
  const double sym = rate_symmetric(g, tilted).rate.value, cost = tilt_cost(g, tilted, f);
  c.expect(std::abs(sym - cost) <= 0.05 * cost, "tilted path " + fmt(sym) + " vs " + fmt(cost));

  Trajectory moving;
  moving.times = {0.0, 0.5, 1.0};
  for (double s : {0.0, 0.05, 0.1}) {
    auto r = oracle::vf(h);
    for (VertexId v = 0; v < g.num_vertices(); ++v)
      if (!g.is_boundary(v)) r[v] += s;
    moving.rho.push_back(r);
    moving.flux.push_back(EdgeFunction(g.num_edges()));
  }
  const auto rej = rate_symmetric(g, moving);
  c.expect(rej.rate.infinite && rej.rate.diagnostics.find("conservation") != std::string::npos,
           "W = 0 path with moving density is not rejected");

  const WeightedGraph edge({{0, 0}, {1, 0}}, {{0, 1, 1.0}}, {});
  for (double chi : {0.25, 0.1, 0.2}) {
    for (double an : {1.0, 0.7, -0.3}) {
      const auto o = optimize_slice(edge, EdgeFunction{chi}, EdgeFunction{an});
      c.expect(std::abs(o.value - an * an / (4 * chi)) <= 1e-12, "single edge chi=" + fmt(chi) + " a=" + fmt(an));
    }
  }

  const auto sine = FieldSpec::harmonic(g, {1.0, -0.5, 0.0}, TimeProfile::Sine, 1.0, 1.0, 0.5);
  const auto tr = pde_path(g, sine, bumped, 1e-3, 0.5);
  const auto s = rate_symmetric(g, tr);
  const auto opt = optimize_tilt(g, tr);
  const double ratio = opt.value / s.rate.value;
  c.note("SEP path rate " + fmt(a.rate.value) + " (dt=1e-3), " + fmt(b.rate.value) + " (dt=5e-4)");
  c.note("tilted path " + fmt(sym) + ", tilt cost " + fmt(cost));
  c.note("variational/symmetric ratio " + fmt(ratio));
  c.expect(std::abs(ratio - 0.5) <= 0.005, "variational/symmetric ratio " + fmt(ratio));
}

// ---------------------------------------------------------------------------

bool same_tree(const fs::path& a, const fs::path& b, std::string& diff) {
  std::vector<std::string> fa, fb;
  for (const auto& e : fs::directory_iterator(a)) fa.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) fb.push_back(e.path().filename().string());
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) {
    diff = "file lists differ";
    return false;
  }
  for (const auto& name : fa)
    if (slurp(a / name) != slurp(b / name)) {
      diff = name;
      return false;
    }
  return true;
}

void criterion7(Checker& c, const fs::path& work) {
  const fs::path base = work / "repro";
  const std::vector<std::pair<std::string, std::string>> configs{
      {"build-graph", "{\"kind\": \"build-graph\", \"N\": 3}"},
      {"simulate", "{\"kind\": \"simulate\", \"N\": 2, \"replicas\": 4, \"T\": 0.5, \"seed\": 99, \"sample_times\": "
                   "[0.25, 0.5], \"field\": {\"type\": \"harmonic\", \"boundary\": [0, 1, 0], \"time\": \"sine\"}}"},
      {"pde", "{\"kind\": \"pde\", \"N\": 3, \"T\": 0.2, \"dt\": 0.002, \"rho0\": 0.5, \"field\": {\"type\": "
              "\"harmonic\", \"boundary\": [1, 0, 0], \"time\": \"ramp\"}}"},
      {"lln-experiment", "{\"kind\": \"lln-experiment\", \"N\": 2, \"replicas\": 10, \"T\": 0.2, \"seed\": 5, "
                         "\"sample_times\": [0.1, 0.2]}"},
  };
  auto check_kind = [&](const std::string& name, const std::string& cfg) {
    const auto first = base / (name + "_a"), second = base / (name + "_b");
    experiment::run(cfg, first.string(), 0);
    experiment::run(slurp(first / "manifest.json"), second.string(), 1, "manifest.json");
    std::string diff;
    c.expect(same_tree(first, second, diff), name + " re-run differs: " + diff);
  };
  for (const auto& [name, cfg] : configs) check_kind(name, cfg);
  const auto pde_dir = (base / "pde_a").string();
  check_kind("rate", "{\"kind\": \"rate\", \"N\": 3, \"trajectory\": {\"density_csv\": \"" + pde_dir +
                         "/pde_density.csv\", \"flux_csv\": \"" + pde_dir + "/pde_flux.csv\"}}");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sghydro_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria{
      {"graph identities", criterion1},
      {"generator oracle", criterion2},
      {"simulation against the stationary oracle", criterion3},
      {"law of large numbers on Gamma_4", [&](Checker& c) { criterion4(c, work); }},
      {"hydrodynamic solver", criterion5},
      {"rate functional", criterion6},
      {"reproducibility from manifests", [&](Checker& c) { criterion7(c, work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = c.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("%s criterion %zu: %s (%.1fs)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
    for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
  }
  return failed;
}
