#include "sghydro/sghydro.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "experiment.hpp"
#include "sghydro/hydro.hpp"
#include "sghydro/rate.hpp"
#include "sghydro/wasep.hpp"

#ifndef SGHYDRO_VERSION
#define SGHYDRO_VERSION "unknown"
#endif

struct sgh_graph {
  sghydro::WeightedGraph g;
};

struct sgh_sim {
  const sgh_graph* graph;
  sghydro::WasepSimulator sim;
};

namespace {

thread_local std::string last_error;

sgh_status set_error(sgh_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
sgh_status guarded(F fn) {
  try {
    fn();
    last_error.clear();
    return SGH_OK;
  } catch (const sghydro::Error& e) {
    return set_error(static_cast<sgh_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SGH_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SGH_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* msg) {
  if (!ok) sghydro::fail(sghydro::ErrorKind::InvalidArgument, msg);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sghydro::FieldSpec field_from(const char* json, const sghydro::WeightedGraph& g, double horizon) {
  if (!json) return sghydro::FieldSpec::zero();
  sghydro::experiment::Json d;
  try {
    d = sghydro::experiment::Json::parse(json);
  } catch (const std::exception& e) {
    sghydro::fail(sghydro::ErrorKind::Config, std::string("field descriptor is not valid JSON: ") + e.what());
  }
  return sghydro::experiment::make_field(d, g, horizon);
}

sghydro::VertexFunction vertex_function(const double* v, std::size_t n) {
  sghydro::VertexFunction f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = v[i];
  return f;
}

sghydro::Trajectory trajectory_from(const sgh_graph* g, const double* times, size_t K, const double* rho, size_t n,
                                    const double* flux, size_t ne) {
  require(g && times && rho && flux, "null argument");
  require(n == g->g.num_vertices() && ne == g->g.num_edges(), "trajectory sizes do not match the graph");
  sghydro::Trajectory t;
  t.provenance = sghydro::Provenance::Synthetic;
  for (size_t k = 0; k < K; ++k) {
    t.times.push_back(times[k]);
    t.rho.push_back(vertex_function(rho + k * n, n));
    sghydro::EdgeFunction w(ne);
    for (size_t e = 0; e < ne; ++e) w[e] = flux[k * ne + e];
    t.flux.push_back(std::move(w));
  }
  return t;
}

}  // namespace

extern "C" {

const char* sgh_version(void) { return SGHYDRO_VERSION; }
const char* sgh_last_error(void) { return last_error.c_str(); }
void sgh_string_free(char* s) { std::free(s); }

sgh_status sgh_graph_build_sg(unsigned level, sgh_graph** out) {
  return guarded([&] {
    require(out, "null output pointer");
    *out = new sgh_graph{sghydro::build_sg(level)};
  });
}

sgh_status sgh_graph_create(size_t num_vertices, const double* xy, size_t num_edges, const uint32_t* endpoints,
                            const double* conductances, size_t num_boundary, const uint32_t* boundary,
                            sgh_graph** out) {
  return guarded([&] {
    require(out && (xy || !num_vertices) && (endpoints || !num_edges) && (boundary || !num_boundary), "null argument");
    std::vector<sghydro::Point> coords(num_vertices);
    for (size_t v = 0; v < num_vertices; ++v) coords[v] = {xy[2 * v], xy[2 * v + 1]};
    std::vector<sghydro::Edge> edges(num_edges);
    for (size_t e = 0; e < num_edges; ++e)
      edges[e] = {endpoints[2 * e], endpoints[2 * e + 1], conductances ? conductances[e] : 1.0};
    std::vector<sghydro::VertexId> b(boundary, boundary + num_boundary);
    *out = new sgh_graph{sghydro::WeightedGraph(std::move(coords), std::move(edges), std::move(b))};
  });
}

void sgh_graph_free(sgh_graph* g) { delete g; }

sgh_status sgh_graph_size(const sgh_graph* g, size_t* num_vertices, size_t* num_edges) {
  return guarded([&] {
    require(g, "null graph");
    if (num_vertices) *num_vertices = g->g.num_vertices();
    if (num_edges) *num_edges = g->g.num_edges();
  });
}

sgh_status sgh_graph_edges(const sgh_graph* g, uint32_t* endpoints, size_t len) {
  return guarded([&] {
    require(g && endpoints, "null argument");
    require(len >= 2 * g->g.num_edges(), "endpoint buffer too small");
    for (size_t e = 0; e < g->g.num_edges(); ++e) {
      endpoints[2 * e] = g->g.edges()[e].tail;
      endpoints[2 * e + 1] = g->g.edges()[e].head;
    }
  });
}

sgh_status sgh_graph_boundary(const sgh_graph* g, uint32_t* boundary, size_t len, size_t* count) {
  return guarded([&] {
    require(g, "null graph");
    const auto& b = g->g.boundary();
    if (count) *count = b.size();
    if (boundary) {
      require(len >= b.size(), "boundary buffer too small");
      std::copy(b.begin(), b.end(), boundary);
    }
  });
}

sgh_status sgh_graph_energy(const sgh_graph* g, const double* f, size_t n, double* out) {
  return guarded([&] {
    require(g && f && out, "null argument");
    require(n == g->g.num_vertices(), "function length does not match the graph");
    *out = sghydro::graph_energy(g->g, vertex_function(f, n));
  });
}

sgh_status sgh_graph_solve_harmonic(const sgh_graph* g, const double* boundary_values, size_t nb, double* out,
                                    size_t n) {
  return guarded([&] {
    require(g && boundary_values && out, "null argument");
    require(n == g->g.num_vertices(), "output length does not match the graph");
    const auto h = sghydro::solve_harmonic(g->g, {boundary_values, nb});
    for (size_t v = 0; v < n; ++v) out[v] = h[v];
  });
}

sgh_status sgh_graph_effective_resistance(const sgh_graph* g, uint32_t x, uint32_t y, double* out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = sghydro::effective_resistance(g->g, x, y);
  });
}

sgh_status sgh_graph_to_json(const sgh_graph* g, char** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = dup_string(g->g.to_json());
  });
}

sgh_status sgh_sim_create(const sgh_graph* g, const double* lambda_plus, const double* lambda_minus, size_t nb,
                          const char* field_json, double horizon, double accel, const uint8_t* eta0, size_t n,
                          uint64_t seed, uint32_t replica, sgh_sim** out) {
  return guarded([&] {
    require(g && out && eta0 && (nb == 0 || (lambda_plus && lambda_minus)), "null argument");
    require(n == g->g.num_vertices(), "configuration length does not match the graph");
    sghydro::BoundaryRates rates{{lambda_plus, lambda_plus + nb}, {lambda_minus, lambda_minus + nb}};
    sghydro::Configuration c{{eta0, eta0 + n}};
    sghydro::RandomStream rng(seed, replica, sghydro::StreamPurpose::Dynamics);
    *out = new sgh_sim{g, sghydro::WasepSimulator(g->g, field_from(field_json, g->g, horizon), std::move(rates),
                                                  accel > 0.0 ? accel : g->g.acceleration(), std::move(c), rng)};
  });
}

void sgh_sim_free(sgh_sim* s) { delete s; }

sgh_status sgh_sim_advance(sgh_sim* s, double t) {
  return guarded([&] {
    require(s, "null simulator");
    s->sim.advance_to(t);
  });
}

sgh_status sgh_sim_state(const sgh_sim* s, double* clock, uint8_t* eta, size_t n, int64_t* current, size_t ne,
                         uint64_t* events) {
  return guarded([&] {
    require(s, "null simulator");
    const auto& st = s->sim.state();
    if (clock) *clock = st.clock;
    if (eta) {
      require(n >= st.config.size(), "configuration buffer too small");
      std::copy(st.config.eta.begin(), st.config.eta.end(), eta);
    }
    if (current) {
      require(ne >= st.current.size(), "current buffer too small");
      std::copy(st.current.begin(), st.current.end(), current);
    }
    if (events) *events = s->sim.accepted_events();
  });
}

sgh_status sgh_pde_solve(const sgh_graph* g, const char* field_json, const double* rho0, size_t n,
                         const double* rho_bar, size_t nb, double dt, double T, double theta, double* rho_T,
                         double* weak_residual) {
  return guarded([&] {
    require(g && rho0 && rho_bar && rho_T, "null argument");
    require(n == g->g.num_vertices(), "density length does not match the graph");
    sghydro::PdeConfig pc;
    pc.dt = dt;
    pc.horizon = T;
    pc.theta = theta;
    pc.record_every = 1;
    const auto sol = sghydro::solve_hydro(g->g, pc, field_from(field_json, g->g, T), vertex_function(rho0, n),
                                          {rho_bar, nb});
    const auto& last = sol.trajectory.rho.back();
    for (size_t v = 0; v < n; ++v) rho_T[v] = last[v];
    if (weak_residual) *weak_residual = sol.weak_residual;
  });
}

sgh_status sgh_rate_symmetric(const sgh_graph* g, const double* times, size_t K, const double* rho, size_t n,
                              const double* flux, size_t ne, double* value, int* infinite, char** diagnostics) {
  return guarded([&] {
    require(value && infinite, "null argument");
    const auto r = sghydro::rate_symmetric(g->g, trajectory_from(g, times, K, rho, n, flux, ne));
    *value = r.rate.value;
    *infinite = r.rate.infinite ? 1 : 0;
    if (diagnostics) *diagnostics = dup_string(r.rate.diagnostics);
  });
}

sgh_status sgh_rate_optimize_tilt(const sgh_graph* g, const double* times, size_t K, const double* rho, size_t n,
                                  const double* flux, size_t ne, double* value) {
  return guarded([&] {
    require(value, "null argument");
    *value = sghydro::optimize_tilt(g->g, trajectory_from(g, times, K, rho, n, flux, ne)).value;
  });
}

sgh_status sgh_config_validate(const char* config_text, const char* source, char** report) {
  return guarded([&] {
    require(config_text && report, "null argument");
    *report = dup_string(sghydro::experiment::validate(config_text, source ? source : "config"));
  });
}

sgh_status sgh_experiment_run(const char* config_text, const char* source, const char* out_dir, unsigned threads,
                              char** summary) {
  return guarded([&] {
    require(config_text && out_dir, "null argument");
    const auto s = sghydro::experiment::run(config_text, out_dir, threads, source ? source : "config");
    if (summary) *summary = dup_string(s);
  });
}

}  // extern "C"
