#include "sghydro/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "linsolve.hpp"

namespace sghydro {

namespace {

double ipow(double base, unsigned n) {
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r *= base;
  return r;
}

// Dirichlet problem for the conductance Laplacian: values on `fixed` are
// given in `f`, the remaining entries are overwritten by the harmonic
// extension.
void harmonic_fill(const WeightedGraph& g, const std::vector<char>& fixed, VertexFunction& f) {
  std::vector<Eigen::Index> free_idx, fixed_idx;
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    (fixed[v] ? fixed_idx : free_idx).push_back(static_cast<Eigen::Index>(v));
  if (free_idx.empty()) return;
  if (fixed_idx.empty())
    fail(ErrorKind::InvalidArgument, "harmonic solve needs at least one fixed vertex");

  const auto k = g.conductance_laplacian();
  const auto kff = detail::submatrix(k, free_idx, free_idx);
  const auto kfb = detail::submatrix(k, free_idx, fixed_idx);
  Eigen::VectorXd fb(static_cast<Eigen::Index>(fixed_idx.size()));
  for (std::size_t i = 0; i < fixed_idx.size(); ++i) fb[static_cast<Eigen::Index>(i)] = f.vec()[fixed_idx[i]];

  detail::SpdSolver solver(kff);
  const Eigen::VectorXd xf = solver.solve(-(kfb * fb));
  for (std::size_t i = 0; i < free_idx.size(); ++i) f.vec()[free_idx[i]] = xf[static_cast<Eigen::Index>(i)];
}

}  // namespace

void check_size(const WeightedGraph& g, const VertexFunction& f, const char* what) {
  if (f.size() != g.num_vertices())
    fail(ErrorKind::InvalidArgument, std::string(what) + ": vertex function has " + std::to_string(f.size()) +
                                         " entries, graph has " + std::to_string(g.num_vertices()) + " vertices");
}

void check_size(const WeightedGraph& g, const EdgeFunction& f, const char* what) {
  if (f.size() != g.num_edges())
    fail(ErrorKind::InvalidArgument, std::string(what) + ": edge function has " + std::to_string(f.size()) +
                                         " entries, graph has " + std::to_string(g.num_edges()) + " edges");
}

WeightedGraph::WeightedGraph(std::vector<Point> coords, std::vector<Edge> edges,
                             std::vector<VertexId> boundary, std::optional<unsigned> level)
    : coords_(std::move(coords)), edges_(std::move(edges)), boundary_(std::move(boundary)), level_(level) {
  const std::size_t n = coords_.size();
  if (n == 0) fail(ErrorKind::InvalidArgument, "graph has no vertices");
  for (auto& e : edges_) {
    if (e.tail >= n || e.head >= n) fail(ErrorKind::InvalidArgument, "edge endpoint out of range");
    if (e.tail == e.head) fail(ErrorKind::InvalidArgument, "graph has a loop at vertex " + std::to_string(e.tail));
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance))
      fail(ErrorKind::InvalidArgument, "conductances must be strictly positive and finite");
    if (e.tail > e.head) std::swap(e.tail, e.head);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.tail, a.head) < std::tie(b.tail, b.head); });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i].tail == edges_[i - 1].tail && edges_[i].head == edges_[i - 1].head)
      fail(ErrorKind::InvalidArgument, "graph has a multi-edge between " + std::to_string(edges_[i].tail) + " and " +
                                           std::to_string(edges_[i].head));

  boundary_pos_.assign(n, -1);
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    const auto b = boundary_[i];
    if (b >= n) fail(ErrorKind::InvalidArgument, "boundary vertex out of range");
    if (boundary_pos_[b] >= 0) fail(ErrorKind::InvalidArgument, "boundary vertex listed twice");
    boundary_pos_[b] = static_cast<int>(i);
  }

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.tail + 1];
    ++offsets_[e.head + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  incidence_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    incidence_[fill[e.tail]++] = {static_cast<EdgeId>(i), e.head, +1};
    incidence_[fill[e.head]++] = {static_cast<EdgeId>(i), e.tail, -1};
  }

  std::vector<char> seen(n, 0);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (const auto& inc : incident(v))
      if (!seen[inc.other]) {
        seen[inc.other] = 1;
        ++reached;
        q.push(inc.other);
      }
  }
  if (reached != n) fail(ErrorKind::InvalidArgument, "graph is not connected");

  energy_scale_ = ipow(5.0 / 3.0, scale_level());
  acceleration_ = ipow(5.0, scale_level());
}

Eigen::SparseMatrix<double> WeightedGraph::conductance_laplacian() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * edges_.size());
  for (const auto& e : edges_) {
    const auto t = static_cast<Eigen::Index>(e.tail), h = static_cast<Eigen::Index>(e.head);
    trips.emplace_back(t, t, e.conductance);
    trips.emplace_back(h, h, e.conductance);
    trips.emplace_back(t, h, -e.conductance);
    trips.emplace_back(h, t, -e.conductance);
  }
  const auto n = static_cast<Eigen::Index>(num_vertices());
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

std::string WeightedGraph::to_json() const {
  nlohmann::ordered_json doc;
  doc["level"] = level_ ? nlohmann::ordered_json(*level_) : nlohmann::ordered_json(nullptr);
  auto& vs = doc["vertices"] = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < coords_.size(); ++v)
    vs.push_back({{"id", v}, {"x", coords_[v].x}, {"y", coords_[v].y}, {"boundary", boundary_pos_[v] >= 0}});
  auto& es = doc["edges"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < edges_.size(); ++i)
    es.push_back({{"id", i}, {"tail", edges_[i].tail}, {"head", edges_[i].head}, {"conductance", edges_[i].conductance}});
  return doc.dump(1);
}

std::uint64_t sg_vertex_count(unsigned level) {
  std::uint64_t p = 1;
  for (unsigned i = 0; i <= level; ++i) p *= 3;
  return (p + 3) / 2;
}

std::uint64_t sg_edge_count(unsigned level) {
  std::uint64_t p = 1;
  for (unsigned i = 0; i <= level; ++i) p *= 3;
  return p;
}

namespace {

// Integer lattice coordinates at scale 2^N: a point is i*e1 + j*e2 with
// e1 = (1,0)/2^N and e2 = (1/2, sqrt3/2)/2^N.
struct LatticePoint {
  std::int64_t i, j;
};

void collect_cells(unsigned depth, std::int64_t i, std::int64_t j, std::int64_t size,
                   std::vector<LatticePoint>& corners) {
  if (depth == 0) {
    corners.push_back({i, j});
    return;
  }
  const std::int64_t h = size / 2;
  collect_cells(depth - 1, i, j, h, corners);
  collect_cells(depth - 1, i + h, j, h, corners);
  collect_cells(depth - 1, i, j + h, h, corners);
}

}  // namespace

WeightedGraph build_sg(unsigned level) {
  if (level > kMaxSgLevel)
    fail(ErrorKind::InvalidArgument, "SG level " + std::to_string(level) + " overflows the 32-bit index type (maximum level " +
                                         std::to_string(kMaxSgLevel) + ")");
  const std::int64_t scale = std::int64_t{1} << level;

  // lower-left corners of the 3^N smallest cells; each cell is the triangle
  // (i,j), (i+1,j), (i,j+1)
  std::vector<LatticePoint> cells;
  cells.reserve(static_cast<std::size_t>(sg_edge_count(level) / 3));
  collect_cells(level, 0, 0, scale, cells);

  auto key = [scale](std::int64_t i, std::int64_t j) { return static_cast<std::uint64_t>(i * (scale + 1) + j); };
  std::unordered_map<std::uint64_t, LatticePoint> unique;
  unique.reserve(static_cast<std::size_t>(sg_vertex_count(level)));
  for (const auto& c : cells)
    for (const LatticePoint p : {LatticePoint{c.i, c.j}, LatticePoint{c.i + 1, c.j}, LatticePoint{c.i, c.j + 1}})
      unique.emplace(key(p.i, p.j), p);

  // lexicographic on (x, y) = ((2i + j)/2^(N+1), j sqrt3/2^(N+1))
  std::vector<LatticePoint> pts;
  pts.reserve(unique.size());
  for (const auto& kv : unique) pts.push_back(kv.second);
  std::sort(pts.begin(), pts.end(), [](const LatticePoint& a, const LatticePoint& b) {
    return std::make_pair(2 * a.i + a.j, a.j) < std::make_pair(2 * b.i + b.j, b.j);
  });
  std::unordered_map<std::uint64_t, VertexId> id_of;
  id_of.reserve(pts.size());
  std::vector<Point> coords(pts.size());
  const double inv = 1.0 / static_cast<double>(scale);
  const double h3 = std::sqrt(3.0) / 2.0;
  for (std::size_t v = 0; v < pts.size(); ++v) {
    id_of[key(pts[v].i, pts[v].j)] = static_cast<VertexId>(v);
    coords[v] = {(static_cast<double>(pts[v].i) + 0.5 * static_cast<double>(pts[v].j)) * inv,
                 h3 * static_cast<double>(pts[v].j) * inv};
  }

  std::vector<Edge> edges;
  edges.reserve(3 * cells.size());
  for (const auto& c : cells) {
    const auto p0 = id_of.at(key(c.i, c.j));
    const auto p1 = id_of.at(key(c.i + 1, c.j));
    const auto p2 = id_of.at(key(c.i, c.j + 1));
    edges.push_back({p0, p1, 1.0});
    edges.push_back({p0, p2, 1.0});
    edges.push_back({p1, p2, 1.0});
  }
  std::vector<VertexId> boundary = {id_of.at(key(0, 0)), id_of.at(key(scale, 0)), id_of.at(key(0, scale))};
  return WeightedGraph(std::move(coords), std::move(edges), std::move(boundary), level);
}

double graph_energy(const WeightedGraph& g, const VertexFunction& f) { return graph_energy(g, f, f); }

double graph_energy(const WeightedGraph& g, const VertexFunction& f, const VertexFunction& f2) {
  check_size(g, f, "graph_energy");
  check_size(g, f2, "graph_energy");
  double s = 0.0;
  for (const auto& e : g.edges()) s += e.conductance * (f[e.tail] - f[e.head]) * (f2[e.tail] - f2[e.head]);
  return g.energy_scale() * s;
}

EdgeFunction discrete_gradient(const WeightedGraph& g, const VertexFunction& f) {
  check_size(g, f, "discrete_gradient");
  EdgeFunction out(g.num_edges());
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const auto& e = g.edge(static_cast<EdgeId>(i));
    out[i] = g.energy_scale() * (f[e.head] - f[e.tail]);
  }
  return out;
}

double edge_inner_product(const WeightedGraph& g, const EdgeFunction& a, const EdgeFunction& b) {
  check_size(g, a, "edge_inner_product");
  check_size(g, b, "edge_inner_product");
  double s = 0.0;
  for (std::size_t i = 0; i < g.num_edges(); ++i) s += g.edge(static_cast<EdgeId>(i)).conductance * a[i] * b[i];
  return s / g.energy_scale();
}

double vertex_inner_product(const WeightedGraph& g, const VertexFunction& u, const VertexFunction& v) {
  check_size(g, u, "vertex_inner_product");
  check_size(g, v, "vertex_inner_product");
  return u.vec().dot(v.vec()) / static_cast<double>(g.num_vertices());
}

VertexFunction discrete_divergence(const WeightedGraph& g, const EdgeFunction& theta) {
  check_size(g, theta, "discrete_divergence");
  const double nv = static_cast<double>(g.num_vertices());
  VertexFunction out(g.num_vertices());
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const auto& e = g.edge(static_cast<EdgeId>(i));
    const double w = nv * e.conductance * theta[i];
    out[e.tail] -= w;
    out[e.head] += w;
  }
  return out;
}

Eigen::SparseMatrix<double> renormalized_laplacian(const WeightedGraph& g) {
  const double s = 1.5 * g.acceleration();
  std::vector<Eigen::Triplet<double>> trips;
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (g.is_boundary(x)) {
      trips.emplace_back(x, x, 1.0);
      continue;
    }
    double diag = 0.0;
    for (const auto& inc : g.incident(x)) {
      const double c = g.edge(inc.edge).conductance;
      trips.emplace_back(x, inc.other, s * c);
      diag -= s * c;
    }
    trips.emplace_back(x, x, diag);
  }
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

namespace {

VertexFunction scaled_laplacian(const WeightedGraph& g, const VertexFunction& f, double s) {
  VertexFunction out(g.num_vertices());
  for (VertexId x = 0; x < g.num_vertices(); ++x) {
    if (g.is_boundary(x)) continue;
    double acc = 0.0;
    for (const auto& inc : g.incident(x)) acc += g.edge(inc.edge).conductance * (f[inc.other] - f[x]);
    out[x] = s * acc;
  }
  return out;
}

}  // namespace

VertexFunction apply_laplacian(const WeightedGraph& g, const VertexFunction& f) {
  check_size(g, f, "apply_laplacian");
  return scaled_laplacian(g, f, 1.5 * g.acceleration());
}

VertexFunction measure_laplacian(const WeightedGraph& g, const VertexFunction& f) {
  check_size(g, f, "measure_laplacian");
  return scaled_laplacian(g, f, static_cast<double>(g.num_vertices()) * g.energy_scale());
}

double normal_derivative(const WeightedGraph& g, const VertexFunction& f, VertexId a) {
  check_size(g, f, "normal_derivative");
  if (a >= g.num_vertices() || !g.is_boundary(a))
    fail(ErrorKind::InvalidArgument, "normal_derivative: vertex " + std::to_string(a) + " is not a boundary vertex");
  double acc = 0.0;
  for (const auto& inc : g.incident(a)) acc += g.edge(inc.edge).conductance * (f[a] - f[inc.other]);
  return g.energy_scale() * acc;
}

VertexFunction solve_harmonic(const WeightedGraph& g, std::span<const double> boundary_values) {
  if (boundary_values.size() != g.boundary().size())
    fail(ErrorKind::InvalidArgument, "solve_harmonic: expected " + std::to_string(g.boundary().size()) +
                                         " boundary values, got " + std::to_string(boundary_values.size()));
  if (g.boundary().empty()) fail(ErrorKind::InvalidArgument, "solve_harmonic: graph has no boundary");
  VertexFunction f(g.num_vertices());
  std::vector<char> fixed(g.num_vertices(), 0);
  for (std::size_t i = 0; i < g.boundary().size(); ++i) {
    f[g.boundary()[i]] = boundary_values[i];
    fixed[g.boundary()[i]] = 1;
  }
  harmonic_fill(g, fixed, f);
  return f;
}

double effective_resistance(const WeightedGraph& g, VertexId x, VertexId y) {
  if (x >= g.num_vertices() || y >= g.num_vertices())
    fail(ErrorKind::InvalidArgument, "effective_resistance: vertex out of range");
  if (x == y) return 0.0;
  std::vector<Eigen::Index> keep;
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    if (v != y) keep.push_back(static_cast<Eigen::Index>(v));
  const auto k = detail::submatrix(g.conductance_laplacian(), keep, keep);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k.rows());
  const Eigen::Index xi = x < y ? x : x - 1;
  rhs[xi] = 1.0;
  const Eigen::VectorXd v = detail::SpdSolver(k).solve(rhs);
  return v[xi];
}

std::vector<VertexId> sg_embedding(const WeightedGraph& coarse, const WeightedGraph& fine) {
  if (!coarse.level() || !fine.level() || *fine.level() < *coarse.level())
    fail(ErrorKind::InvalidArgument, "sg_embedding: needs SG graphs with fine level >= coarse level");
  const double scale = static_cast<double>(std::int64_t{1} << *fine.level());
  const double h3 = std::sqrt(3.0) / 2.0;
  auto lattice = [&](const Point& p) {
    const auto j = std::llround(p.y / h3 * scale);
    const auto i = std::llround(p.x * scale - 0.5 * static_cast<double>(j));
    return std::make_pair(i, j);
  };
  std::map<std::pair<long long, long long>, VertexId> fine_ids;
  for (VertexId v = 0; v < fine.num_vertices(); ++v) fine_ids[lattice(fine.coords()[v])] = v;
  std::vector<VertexId> out(coarse.num_vertices());
  for (VertexId v = 0; v < coarse.num_vertices(); ++v) out[v] = fine_ids.at(lattice(coarse.coords()[v]));
  return out;
}

VertexFunction sg_harmonic_refine(const WeightedGraph& coarse, const WeightedGraph& fine, const VertexFunction& f) {
  check_size(coarse, f, "sg_harmonic_refine");
  const auto emb = sg_embedding(coarse, fine);
  VertexFunction out(fine.num_vertices());
  std::vector<char> fixed(fine.num_vertices(), 0);
  for (VertexId v = 0; v < coarse.num_vertices(); ++v) {
    out[emb[v]] = f[v];
    fixed[emb[v]] = 1;
  }
  harmonic_fill(fine, fixed, out);
  return out;
}

}  // namespace sghydro
