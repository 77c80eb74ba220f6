#pragma once

// Weighted graphs, the pre-Sierpinski-gasket hierarchy and the discrete
// calculus on them.
//
// Scaling conventions for a graph at level N (generic graphs use N = 0):
//   energy            E_N(f,g)   = (5/3)^N sum_e c_e df dg
//   gradient          (d_N f)(e) = (5/3)^N [f(head) - f(tail)]
//   edge product      <a,b>_E    = (3/5)^N sum_e c_e a(e) b(e)
//   vertex product    <u,v>_V    = (1/|V|) sum_x u(x) v(x)
//   divergence        d*_N, the adjoint of d_N between the two products
//   Laplacian         (Lap_N f)(x) = (3/2) 5^N sum_{y~x} c_xy (f(y) - f(x))
// With these, |d_N f|_E^2 = E_N(f) and <d_N f, th>_E = <f, d*_N th>_V hold
// identically, and the discrete Gauss-Green formula reads
//   E_N(u,v) = -(2/3) 3^-N sum_{x not in V0} v(x) (Lap_N u)(x)
//              + sum_{a in V0} v(a) (dn_N u)(a).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "sghydro/error.hpp"

namespace sghydro {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Largest SG level whose edge count 3^(N+1) fits in EdgeId.
inline constexpr unsigned kMaxSgLevel = 19;

/// Real-valued function on vertices or on oriented edges. The tag keeps the
/// two spaces from being mixed up; both wrap an Eigen vector.
template <class Tag>
class GraphFunction {
 public:
  GraphFunction() = default;
  explicit GraphFunction(std::size_t n, double fill = 0.0) : v_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), fill)) {}
  explicit GraphFunction(Eigen::VectorXd v) : v_(std::move(v)) {}
  GraphFunction(std::initializer_list<double> init) : v_(static_cast<Eigen::Index>(init.size())) {
    Eigen::Index i = 0;
    for (double x : init) v_[i++] = x;
  }

  std::size_t size() const { return static_cast<std::size_t>(v_.size()); }
  double& operator[](std::size_t i) { return v_[static_cast<Eigen::Index>(i)]; }
  double operator[](std::size_t i) const { return v_[static_cast<Eigen::Index>(i)]; }

  const Eigen::VectorXd& vec() const { return v_; }
  Eigen::VectorXd& vec() { return v_; }
  std::span<const double> values() const { return {v_.data(), size()}; }

  GraphFunction& operator+=(const GraphFunction& o) { v_ += o.v_; return *this; }
  GraphFunction& operator-=(const GraphFunction& o) { v_ -= o.v_; return *this; }
  GraphFunction& operator*=(double s) { v_ *= s; return *this; }
  friend GraphFunction operator+(GraphFunction a, const GraphFunction& b) { return a += b; }
  friend GraphFunction operator-(GraphFunction a, const GraphFunction& b) { return a -= b; }
  friend GraphFunction operator*(double s, GraphFunction a) { return a *= s; }

 private:
  Eigen::VectorXd v_;
};

using VertexFunction = GraphFunction<struct VertexTag>;
using EdgeFunction = GraphFunction<struct EdgeTag>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Edge stored once with its fixed orientation tail -> head (tail < head).
struct Edge {
  VertexId tail = 0;
  VertexId head = 0;
  double conductance = 1.0;
};

/// Connected simple graph with positive conductances and a marked boundary.
/// Immutable after construction.
class WeightedGraph {
 public:
  /// Builds a generic graph. Edges may be given in either orientation; they
  /// are re-oriented so that tail < head and sorted by (tail, head).
  /// Throws InvalidArgument on loops, multi-edges, non-positive conductances,
  /// out-of-range endpoints, a disconnected graph or a bad boundary list.
  WeightedGraph(std::vector<Point> coords, std::vector<Edge> edges,
                std::vector<VertexId> boundary,
                std::optional<unsigned> level = std::nullopt);

  std::size_t num_vertices() const { return coords_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Point>& coords() const { return coords_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  /// Boundary vertices in marked order (a0, a1, a2 for SG graphs).
  const std::vector<VertexId>& boundary() const { return boundary_; }
  bool is_boundary(VertexId v) const { return boundary_pos_[v] >= 0; }
  /// Position of v in boundary(), or -1.
  int boundary_index(VertexId v) const { return boundary_pos_[v]; }

  /// SG level, empty for generic graphs.
  std::optional<unsigned> level() const { return level_; }
  /// Level used by the scaling factors: the SG level, or 0.
  unsigned scale_level() const { return level_.value_or(0); }

  /// (5/3)^N
  double energy_scale() const { return energy_scale_; }
  /// 5^N, the time acceleration of the particle system.
  double acceleration() const { return acceleration_; }

  struct Incidence {
    EdgeId edge;
    VertexId other;
    int sign;  // +1 when this vertex is the tail
  };
  std::span<const Incidence> incident(VertexId v) const {
    return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
  }

  /// Combinatorial graph Laplacian K = D - A with conductances (positive
  /// semidefinite, unscaled).
  Eigen::SparseMatrix<double> conductance_laplacian() const;

  /// JSON document {level, vertices:[{id,x,y,boundary}],
  /// edges:[{id,tail,head,conductance}]}.
  std::string to_json() const;

 private:
  std::vector<Point> coords_;
  std::vector<Edge> edges_;
  std::vector<VertexId> boundary_;
  std::vector<int> boundary_pos_;
  std::optional<unsigned> level_;
  double energy_scale_ = 1.0;
  double acceleration_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidence_;
};

/// |V_N| = (3^(N+1) + 3) / 2
std::uint64_t sg_vertex_count(unsigned level);
/// |E_N| = 3^(N+1)
std::uint64_t sg_edge_count(unsigned level);

/// Level-N pre-Sierpinski-gasket graph with unit conductances. Corners
/// a0 = (0,0), a1 = (1,0), a2 = (1/2, sqrt(3)/2); vertices are numbered
/// lexicographically by (x, y).
WeightedGraph build_sg(unsigned level);

// -- discrete calculus -------------------------------------------------------

double graph_energy(const WeightedGraph& g, const VertexFunction& f);
double graph_energy(const WeightedGraph& g, const VertexFunction& f,
                    const VertexFunction& f2);

EdgeFunction discrete_gradient(const WeightedGraph& g, const VertexFunction& f);

double edge_inner_product(const WeightedGraph& g, const EdgeFunction& a,
                          const EdgeFunction& b);
double vertex_inner_product(const WeightedGraph& g, const VertexFunction& u,
                            const VertexFunction& v);

/// Adjoint of discrete_gradient:
/// (d* th)(x) = -|V| sum_{e ~ x} sigma(e,x) c_e th(e), sigma = +1 at the tail.
VertexFunction discrete_divergence(const WeightedGraph& g, const EdgeFunction& theta);

/// (3/2) 5^N sum_{y~x} c_xy (f(y) - f(x)) on interior rows, identity rows on
/// the boundary.
Eigen::SparseMatrix<double> renormalized_laplacian(const WeightedGraph& g);

/// Applies the Laplacian above without assembling it. Boundary entries are 0.
VertexFunction apply_laplacian(const WeightedGraph& g, const VertexFunction& f);

/// -d*_N d_N f: the Laplacian that is self-adjoint for <.,.>_V. On SG graphs
/// it equals (1 + 3^-N) Lap_N at interior vertices. Boundary entries are 0.
VertexFunction measure_laplacian(const WeightedGraph& g, const VertexFunction& f);

/// (dn_N f)(a) = (5/3)^N sum_{y~a} c_ay (f(a) - f(y)). Throws when a is not
/// a boundary vertex.
double normal_derivative(const WeightedGraph& g, const VertexFunction& f, VertexId a);

/// Harmonic extension of boundary values given in boundary() order.
VertexFunction solve_harmonic(const WeightedGraph& g, std::span<const double> boundary_values);

/// Effective resistance with raw conductances.
double effective_resistance(const WeightedGraph& g, VertexId x, VertexId y);

/// Harmonic extension of f from Gamma_N to Gamma_{N+1} (the 1/5-2/5 rule
/// applied cell by cell, computed as a Dirichlet solve on Gamma_{N+1} with
/// V_N as boundary).
VertexFunction sg_harmonic_refine(const WeightedGraph& coarse, const WeightedGraph& fine,
                                  const VertexFunction& f);

/// For each vertex of `coarse`, the vertex of `fine` at the same position.
std::vector<VertexId> sg_embedding(const WeightedGraph& coarse, const WeightedGraph& fine);

void check_size(const WeightedGraph& g, const VertexFunction& f, const char* what);
void check_size(const WeightedGraph& g, const EdgeFunction& f, const char* what);

}  // namespace sghydro
