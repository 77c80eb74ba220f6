#pragma once

// Exact continuous-time simulation of the boundary-driven weakly asymmetric
// exclusion process.
//
// Events are sampled by thinning against a constant envelope
//   Lambda = accel * (sum_e c_e exp(M_H) + sum_a max(lambda_+(a), lambda_-(a)))
// where M_H is the field's declared bound on edge differences of H. A
// candidate is drawn from the static alias table over envelope rates and
// accepted with probability (true rate) / (envelope rate). Exchanges across
// equal-occupation edges are accepted events with no effect, exactly as in
// the generator. H is evaluated at the macroscopic clock.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sghydro/field.hpp"
#include "sghydro/graph.hpp"
#include "sghydro/rng.hpp"

namespace sghydro {

/// Birth (lambda_plus) and death (lambda_minus) rates per boundary vertex, in
/// graph.boundary() order.
struct BoundaryRates {
  std::vector<double> lambda_plus;
  std::vector<double> lambda_minus;

  /// lambda_+ = total * rho_bar, lambda_- = total * (1 - rho_bar).
  static BoundaryRates from_density(std::span<const double> rho_bar, double total_rate);

  std::size_t size() const { return lambda_plus.size(); }
  double rho_bar(std::size_t i) const { return lambda_plus[i] / (lambda_plus[i] + lambda_minus[i]); }
  std::vector<double> rho_bar() const;
  /// Smallest gamma >= 1 with 1/gamma <= lambda_+/lambda_- <= gamma; 1 when empty.
  double gamma() const;
  /// Throws InvalidArgument unless there is one strictly positive pair per
  /// boundary vertex.
  void validate(std::size_t num_boundary) const;
};

struct Configuration {
  std::vector<std::uint8_t> eta;

  std::size_t size() const { return eta.size(); }
  std::uint8_t operator[](std::size_t v) const { return eta[v]; }
  VertexFunction as_function() const;
  bool operator==(const Configuration&) const = default;
};

Configuration sample_product_bernoulli(const VertexFunction& rho, RandomStream& rng);

struct SimState {
  Configuration config;
  double clock = 0.0;
  /// Net jumps tail -> head per edge.
  std::vector<std::int64_t> current;
  /// Births minus deaths per boundary vertex.
  std::vector<std::int64_t> boundary_flips;
};

/// c_xy * psi_xy(H_t, eta) for the oriented edge, unaccelerated.
double edge_rate(const WeightedGraph& g, const Configuration& eta, const VertexFunction& h_t, EdgeId e);
double edge_rate(const WeightedGraph& g, const Configuration& eta, double h_tail, double h_head, EdgeId e);

/// lambda_-(a) eta(a) + lambda_+(a) (1 - eta(a)). Throws when a is not a
/// boundary vertex.
double boundary_rate(const WeightedGraph& g, const Configuration& eta, VertexId a, const BoundaryRates& rates);

/// Walker/Vose alias table.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);
  std::size_t sample(double u) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

class WasepSimulator {
 public:
  /// The graph must outlive the simulator.
  WasepSimulator(const WeightedGraph& g, FieldSpec field, BoundaryRates rates, double accel, Configuration eta0,
                 RandomStream rng);

  /// Advances the chain by one accepted event. If the next candidate event
  /// falls at or after `horizon`, nothing is applied, the clock is set to
  /// `horizon` and false is returned (restarting the envelope clock there is
  /// exact by memorylessness). Throws Error(Numerical) when a true rate
  /// exceeds its envelope, i.e. when M_H was misdeclared.
  bool step(double horizon = std::numeric_limits<double>::infinity());

  /// Runs until the clock reaches t.
  void advance_to(double t);

  const SimState& state() const { return state_; }
  const Configuration& initial() const { return initial_; }
  double envelope_rate() const { return envelope_total_; }
  std::uint64_t accepted_events() const { return accepted_; }
  std::uint64_t null_events() const { return rejected_; }

  /// Integral of eta(x) over [0, clock] per vertex.
  std::vector<double> occupation_integral() const;

 private:
  const WeightedGraph* g_;
  FieldSpec field_;
  BoundaryRates rates_;
  double accel_;
  Configuration initial_;
  SimState state_;
  RandomStream rng_;
  double tilt_ = 1.0;  // exp(M_H)
  double envelope_total_ = 0.0;
  AliasTable alias_;
  std::vector<double> occ_integral_;
  std::vector<double> occ_since_;
  std::uint64_t accepted_ = 0;
  std::uint64_t rejected_ = 0;

  void flip(VertexId v);
};

/// Envelope rate Lambda for the given graph, field bound and reservoirs.
double envelope_rate(const WeightedGraph& g, double field_bound, const BoundaryRates& rates, double accel);

struct Snapshot {
  double time = 0.0;
  Configuration config;
  std::vector<std::int64_t> current;
  std::vector<std::int64_t> boundary_flips;
};

/// Simulates one replica and records the state at each sample time (the
/// state just before the first event at or after it). sample_times must be
/// sorted and lie in [0, horizon]; an empty list samples at the horizon.
std::vector<Snapshot> run(const WeightedGraph& g, const FieldSpec& field, const BoundaryRates& rates,
                          const Configuration& eta0, double horizon, std::uint64_t seed, std::uint32_t replica,
                          std::span<const double> sample_times, double accel);

/// Largest |sum_{y~x} W(x->y) + eta_t(x) - eta_0(x)| over interior vertices,
/// and the analogous boundary balance including births and deaths. Both are
/// zero for every exact ledger.
std::int64_t conservation_defect(const WeightedGraph& g, const Configuration& eta0, const Configuration& eta_t,
                                 std::span<const std::int64_t> current, std::span<const std::int64_t> boundary_flips);

}  // namespace sghydro
