#include "sghydro/wasep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sghydro {

BoundaryRates BoundaryRates::from_density(std::span<const double> rho_bar, double total_rate) {
  if (!(total_rate > 0.0) || !std::isfinite(total_rate))
    fail(ErrorKind::InvalidArgument, "reservoir rate must be strictly positive");
  BoundaryRates r;
  for (double rho : rho_bar) {
    if (!(rho > 0.0 && rho < 1.0))
      fail(ErrorKind::InvalidArgument, "reservoir density must lie strictly inside (0, 1), got " + std::to_string(rho));
    r.lambda_plus.push_back(total_rate * rho);
    r.lambda_minus.push_back(total_rate * (1.0 - rho));
  }
  return r;
}

std::vector<double> BoundaryRates::rho_bar() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = rho_bar(i);
  return out;
}

double BoundaryRates::gamma() const {
  double g = 1.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double r = lambda_plus[i] / lambda_minus[i];
    g = std::max({g, r, 1.0 / r});
  }
  return g;
}

void BoundaryRates::validate(std::size_t num_boundary) const {
  if (lambda_plus.size() != num_boundary || lambda_minus.size() != num_boundary)
    fail(ErrorKind::InvalidArgument, "expected " + std::to_string(num_boundary) + " reservoir rate pairs");
  for (std::size_t i = 0; i < num_boundary; ++i)
    if (!(lambda_plus[i] > 0.0) || !(lambda_minus[i] > 0.0) || !std::isfinite(lambda_plus[i]) ||
        !std::isfinite(lambda_minus[i]))
      fail(ErrorKind::InvalidArgument, "reservoir rates must be strictly positive (corner " + std::to_string(i) + ")");
}

VertexFunction Configuration::as_function() const {
  VertexFunction f(eta.size());
  for (std::size_t v = 0; v < eta.size(); ++v) f[v] = eta[v];
  return f;
}

Configuration sample_product_bernoulli(const VertexFunction& rho, RandomStream& rng) {
  Configuration c;
  c.eta.resize(rho.size());
  for (std::size_t v = 0; v < rho.size(); ++v) c.eta[v] = rng.bernoulli(rho[v]) ? 1 : 0;
  return c;
}

double edge_rate(const WeightedGraph& g, const Configuration& eta, double h_tail, double h_head, EdgeId e) {
  const auto& ed = g.edge(e);
  const int dn = int(eta[ed.head]) - int(eta[ed.tail]);
  if (dn == 0) return ed.conductance;
  return ed.conductance * std::exp(dn * (h_tail - h_head));
}

double edge_rate(const WeightedGraph& g, const Configuration& eta, const VertexFunction& h_t, EdgeId e) {
  check_size(g, h_t, "edge_rate");
  const auto& ed = g.edge(e);
  return edge_rate(g, eta, h_t[ed.tail], h_t[ed.head], e);
}

double boundary_rate(const WeightedGraph& g, const Configuration& eta, VertexId a, const BoundaryRates& rates) {
  const int i = a < g.num_vertices() ? g.boundary_index(a) : -1;
  if (i < 0) fail(ErrorKind::InvalidArgument, "boundary_rate: vertex " + std::to_string(a) + " is not a boundary vertex");
  return eta[a] ? rates.lambda_minus[static_cast<std::size_t>(i)] : rates.lambda_plus[static_cast<std::size_t>(i)];
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  if (n == 0) return;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorKind::InvalidArgument, "alias table needs a positive total weight");
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) prob_[i] = 1.0;
  for (auto i : small) prob_[i] = 1.0;  // round-off leftovers
}

std::size_t AliasTable::sample(double u) const {
  const double x = u * static_cast<double>(prob_.size());
  auto i = static_cast<std::size_t>(x);
  if (i >= prob_.size()) i = prob_.size() - 1;
  return (x - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
}

double envelope_rate(const WeightedGraph& g, double field_bound, const BoundaryRates& rates, double accel) {
  const double tilt = std::exp(field_bound);
  double s = 0.0;
  for (const auto& e : g.edges()) s += e.conductance * tilt;
  for (std::size_t i = 0; i < rates.size(); ++i) s += std::max(rates.lambda_plus[i], rates.lambda_minus[i]);
  return accel * s;
}

namespace {

std::vector<double> envelope_weights(const WeightedGraph& g, double tilt, const BoundaryRates& rates) {
  rates.validate(g.boundary().size());
  std::vector<double> w;
  w.reserve(g.num_edges() + rates.size());
  for (const auto& e : g.edges()) w.push_back(e.conductance * tilt);
  for (std::size_t i = 0; i < rates.size(); ++i) w.push_back(std::max(rates.lambda_plus[i], rates.lambda_minus[i]));
  return w;
}

}  // namespace

WasepSimulator::WasepSimulator(const WeightedGraph& g, FieldSpec field, BoundaryRates rates, double accel,
                               Configuration eta0, RandomStream rng)
    : g_(&g),
      field_(std::move(field)),
      rates_(std::move(rates)),
      accel_(accel),
      initial_(eta0),
      rng_(rng),
      tilt_(std::exp(field_.bound())),
      alias_(envelope_weights(g, std::exp(field_.bound()), rates_)) {
  if (!(accel_ > 0.0)) fail(ErrorKind::InvalidArgument, "acceleration must be positive");
  if (eta0.size() != g.num_vertices()) fail(ErrorKind::InvalidArgument, "initial configuration has the wrong size");
  for (auto b : eta0.eta)
    if (b > 1) fail(ErrorKind::InvalidArgument, "occupation variables must be 0 or 1");
  state_.config = std::move(eta0);
  state_.current.assign(g.num_edges(), 0);
  state_.boundary_flips.assign(g.boundary().size(), 0);
  envelope_total_ = sghydro::envelope_rate(g, field_.bound(), rates_, accel_);
  occ_integral_.assign(g.num_vertices(), 0.0);
  occ_since_.assign(g.num_vertices(), 0.0);
}

void WasepSimulator::flip(VertexId v) {
  const double now = state_.clock;
  occ_integral_[v] += static_cast<double>(state_.config.eta[v]) * (now - occ_since_[v]);
  occ_since_[v] = now;
  state_.config.eta[v] ^= 1;
}

bool WasepSimulator::step(double horizon) {
  if (envelope_total_ <= 0.0) {
    state_.clock = std::max(state_.clock, horizon);
    return false;
  }
  const std::size_t num_edges = g_->num_edges();
  auto& eta = state_.config.eta;
  for (;;) {
    const double t = state_.clock + rng_.exponential(envelope_total_);
    if (t >= horizon) {
      state_.clock = horizon;
      return false;
    }
    state_.clock = t;
    const std::size_t ev = alias_.sample(rng_.uniform());
    const double u = rng_.uniform();

    if (ev < num_edges) {
      const auto& e = g_->edge(static_cast<EdgeId>(ev));
      const int dn = int(eta[e.head]) - int(eta[e.tail]);
      double psi = 1.0;
      if (dn != 0) {
        psi = std::exp(dn * (field_(t, e.tail) - field_(t, e.head)));
        if (psi > tilt_ * (1.0 + 1e-12))
          fail(ErrorKind::Numerical, "thinning envelope violated on edge " + std::to_string(ev) + " at t=" +
                                         std::to_string(t) + ": psi=" + std::to_string(psi) +
                                         " exceeds exp(M_H)=" + std::to_string(tilt_) + "; the field bound is misdeclared");
      }
      if (u * tilt_ >= psi) {
        ++rejected_;
        continue;
      }
      ++accepted_;
      if (dn != 0) {
        state_.current[ev] += eta[e.tail] ? 1 : -1;
        flip(e.tail);
        flip(e.head);
      }
      return true;
    }

    const std::size_t i = ev - num_edges;
    const VertexId a = g_->boundary()[i];
    const double lp = rates_.lambda_plus[i], lm = rates_.lambda_minus[i];
    const double rate = eta[a] ? lm : lp;
    if (u * std::max(lp, lm) >= rate) {
      ++rejected_;
      continue;
    }
    ++accepted_;
    state_.boundary_flips[i] += eta[a] ? -1 : 1;
    flip(a);
    return true;
  }
}

void WasepSimulator::advance_to(double t) {
  while (step(t)) {
  }
}

std::vector<double> WasepSimulator::occupation_integral() const {
  std::vector<double> out(occ_integral_);
  for (std::size_t v = 0; v < out.size(); ++v)
    out[v] += static_cast<double>(state_.config.eta[v]) * (state_.clock - occ_since_[v]);
  return out;
}

std::vector<Snapshot> run(const WeightedGraph& g, const FieldSpec& field, const BoundaryRates& rates,
                          const Configuration& eta0, double horizon, std::uint64_t seed, std::uint32_t replica,
                          std::span<const double> sample_times, double accel) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) fail(ErrorKind::InvalidArgument, "horizon must be finite and >= 0");
  std::vector<double> times(sample_times.begin(), sample_times.end());
  if (times.empty()) times.push_back(horizon);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || times[i] > horizon) fail(ErrorKind::InvalidArgument, "sample times must lie in [0, T]");
    if (i > 0 && times[i] < times[i - 1]) fail(ErrorKind::InvalidArgument, "sample times must be sorted");
  }
  WasepSimulator sim(g, field, rates, accel, eta0, RandomStream(seed, replica, StreamPurpose::Dynamics));
  std::vector<Snapshot> out;
  out.reserve(times.size());
  for (double s : times) {
    sim.advance_to(s);
    const auto& st = sim.state();
    out.push_back({s, st.config, st.current, st.boundary_flips});
  }
  return out;
}

std::int64_t conservation_defect(const WeightedGraph& g, const Configuration& eta0, const Configuration& eta_t,
                                 std::span<const std::int64_t> current, std::span<const std::int64_t> boundary_flips) {
  if (current.size() != g.num_edges() || boundary_flips.size() != g.boundary().size() || eta0.size() != g.num_vertices() ||
      eta_t.size() != g.num_vertices())
    fail(ErrorKind::InvalidArgument, "conservation_defect: size mismatch");
  std::int64_t worst = 0;
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    std::int64_t out_flow = 0;
    for (const auto& inc : g.incident(x)) out_flow += inc.sign * current[inc.edge];
    std::int64_t balance = out_flow + (std::int64_t(eta_t[x]) - std::int64_t(eta0[x]));
    const int b = g.boundary_index(x);
    if (b >= 0) balance -= boundary_flips[static_cast<std::size_t>(b)];
    worst = std::max(worst, balance < 0 ? -balance : balance);
  }
  return worst;
}

}  // namespace sghydro
