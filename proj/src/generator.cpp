#include "sghydro/generator.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseLU>

namespace sghydro {

namespace {

std::size_t state_count(const WeightedGraph& g) {
  if (g.num_vertices() > kMaxGeneratorVertices)
    fail(ErrorKind::InvalidArgument, "generator_matrix: state space 2^" + std::to_string(g.num_vertices()) +
                                         " too large (at most " + std::to_string(kMaxGeneratorVertices) + " vertices)");
  return std::size_t{1} << g.num_vertices();
}

inline std::uint8_t bit(std::size_t s, VertexId v) { return static_cast<std::uint8_t>((s >> v) & 1u); }

}  // namespace

Eigen::SparseMatrix<double> generator_matrix(const WeightedGraph& g, const VertexFunction& h_t,
                                             const BoundaryRates& rates, double accel) {
  check_size(g, h_t, "generator_matrix");
  rates.validate(g.boundary().size());
  const std::size_t n = state_count(g);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n * (g.num_edges() + g.boundary().size() + 1));
  for (std::size_t s = 0; s < n; ++s) {
    double out = 0.0;
    for (const auto& e : g.edges()) {
      const int dn = int(bit(s, e.head)) - int(bit(s, e.tail));
      if (dn == 0) continue;  // eta^{xy} = eta
      const double r = accel * e.conductance * std::exp(dn * (h_t[e.tail] - h_t[e.head]));
      const std::size_t t = s ^ ((std::size_t{1} << e.tail) | (std::size_t{1} << e.head));
      trips.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t), r);
      out += r;
    }
    for (std::size_t i = 0; i < g.boundary().size(); ++i) {
      const VertexId a = g.boundary()[i];
      const double r = accel * (bit(s, a) ? rates.lambda_minus[i] : rates.lambda_plus[i]);
      trips.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s ^ (std::size_t{1} << a)), r);
      out += r;
    }
    trips.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s), -out);
  }
  Eigen::SparseMatrix<double> q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  q.setFromTriplets(trips.begin(), trips.end());
  return q;
}

Eigen::VectorXd stationary_distribution(const Eigen::SparseMatrix<double>& q) {
  const Eigen::Index n = q.rows();
  // pi Q = 0  <=>  Q^T pi = 0; the last equation is replaced by sum(pi) = 1
  Eigen::SparseMatrix<double> a = q.transpose();
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      if (it.row() != n - 1) trips.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index j = 0; j < n; ++j) trips.emplace_back(n - 1, j, 1.0);
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) fail(ErrorKind::Numerical, "stationary_distribution: generator is not irreducible");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::VectorXd pi = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !pi.allFinite())
    fail(ErrorKind::Numerical, "stationary_distribution: solve failed");
  return pi;
}

Eigen::VectorXd product_bernoulli(std::span<const double> rho) {
  const std::size_t nv = rho.size();
  if (nv > kMaxGeneratorVertices) fail(ErrorKind::InvalidArgument, "product_bernoulli: too many vertices");
  const std::size_t n = std::size_t{1} << nv;
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    double w = 1.0;
    for (std::size_t v = 0; v < nv; ++v) w *= ((s >> v) & 1u) ? rho[v] : 1.0 - rho[v];
    p[static_cast<Eigen::Index>(s)] = w;
  }
  return p;
}

VertexFunction expected_occupation(std::size_t num_vertices, const Eigen::VectorXd& pi) {
  if (pi.size() != (Eigen::Index{1} << num_vertices)) fail(ErrorKind::InvalidArgument, "expected_occupation: size mismatch");
  VertexFunction m(num_vertices);
  for (Eigen::Index s = 0; s < pi.size(); ++s)
    for (std::size_t v = 0; v < num_vertices; ++v)
      if ((static_cast<std::size_t>(s) >> v) & 1u) m[v] += pi[s];
  return m;
}

EdgeFunction expected_current_rate(const WeightedGraph& g, const VertexFunction& h_t, double accel,
                                   const Eigen::VectorXd& pi) {
  check_size(g, h_t, "expected_current_rate");
  if (pi.size() != static_cast<Eigen::Index>(state_count(g)))
    fail(ErrorKind::InvalidArgument, "expected_current_rate: size mismatch");
  EdgeFunction j(g.num_edges());
  for (Eigen::Index s = 0; s < pi.size(); ++s) {
    const auto su = static_cast<std::size_t>(s);
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
      const auto& e = g.edge(static_cast<EdgeId>(i));
      const int dn = int(bit(su, e.head)) - int(bit(su, e.tail));
      if (dn == 0) continue;
      const double r = accel * e.conductance * std::exp(dn * (h_t[e.tail] - h_t[e.head]));
      // dn = -1: particle at the tail jumps to the head (+1 on the ledger)
      j[i] += pi[s] * r * static_cast<double>(-dn);
    }
  }
  return j;
}

}  // namespace sghydro
