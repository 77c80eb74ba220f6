#pragma once

// Brute-force generator of the boundary-driven exclusion process on
// {0,1}^V for small graphs. State s encodes eta(v) as bit v of s. Used as an
// exact oracle for stationarity and current rates.

#include <cstdint>
#include <span>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "sghydro/graph.hpp"
#include "sghydro/wasep.hpp"

namespace sghydro {

inline constexpr std::size_t kMaxGeneratorVertices = 14;

/// Q with Q(s, s') the rate of s -> s' (s != s') and zero row sums, for the
/// accelerated generator accel * (L_EX(H_t) + L_b). Throws InvalidArgument
/// for more than kMaxGeneratorVertices vertices.
Eigen::SparseMatrix<double> generator_matrix(const WeightedGraph& g, const VertexFunction& h_t,
                                             const BoundaryRates& rates, double accel);

/// Unique probability vector pi with pi Q = 0. Throws Error(Numerical) when Q
/// is not irreducible.
Eigen::VectorXd stationary_distribution(const Eigen::SparseMatrix<double>& q);

/// Product Bernoulli measure as a vector over states.
Eigen::VectorXd product_bernoulli(std::span<const double> rho);

/// x -> E_pi[eta(x)].
VertexFunction expected_occupation(std::size_t num_vertices, const Eigen::VectorXd& pi);

/// e -> E_pi[d W(e) / dt], the mean rate of net tail -> head jumps.
EdgeFunction expected_current_rate(const WeightedGraph& g, const VertexFunction& h_t, double accel,
                                   const Eigen::VectorXd& pi);

}  // namespace sghydro
