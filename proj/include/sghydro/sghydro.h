/* C interface to libsghydro. All objects are opaque handles; every call
 * returns an sgh_status and the message of the most recent failure on the
 * calling thread is available from sgh_last_error(). Strings returned
 * through char** out-parameters are owned by the caller and released with
 * sgh_string_free(). */
#ifndef SGHYDRO_SGHYDRO_H
#define SGHYDRO_SGHYDRO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SGH_API __declspec(dllexport)
#else
#define SGH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgh_status {
  SGH_OK = 0,
  SGH_ERR_INVALID_ARGUMENT = 1,
  SGH_ERR_CONFIG = 2,
  SGH_ERR_NUMERICAL = 3,
  SGH_ERR_IO = 4,
  SGH_ERR_INTERNAL = 5
} sgh_status;

typedef struct sgh_graph sgh_graph;
typedef struct sgh_sim sgh_sim;

SGH_API const char* sgh_version(void);
SGH_API const char* sgh_last_error(void);
SGH_API void sgh_string_free(char* s);

/* -- graphs --------------------------------------------------------------- */

SGH_API sgh_status sgh_graph_build_sg(unsigned level, sgh_graph** out);
/* xy: 2*num_vertices coordinates; endpoints: 2*num_edges vertex ids;
 * conductances may be NULL (all 1). */
SGH_API sgh_status sgh_graph_create(size_t num_vertices, const double* xy, size_t num_edges, const uint32_t* endpoints,
                                    const double* conductances, size_t num_boundary, const uint32_t* boundary,
                                    sgh_graph** out);
SGH_API void sgh_graph_free(sgh_graph* g);
SGH_API sgh_status sgh_graph_size(const sgh_graph* g, size_t* num_vertices, size_t* num_edges);
/* Edge e runs endpoints[2e] -> endpoints[2e+1] (tail < head). */
SGH_API sgh_status sgh_graph_edges(const sgh_graph* g, uint32_t* endpoints, size_t len);
SGH_API sgh_status sgh_graph_boundary(const sgh_graph* g, uint32_t* boundary, size_t len, size_t* count);
SGH_API sgh_status sgh_graph_energy(const sgh_graph* g, const double* f, size_t n, double* out);
SGH_API sgh_status sgh_graph_solve_harmonic(const sgh_graph* g, const double* boundary_values, size_t nb, double* out,
                                            size_t n);
SGH_API sgh_status sgh_graph_effective_resistance(const sgh_graph* g, uint32_t x, uint32_t y, double* out);
SGH_API sgh_status sgh_graph_to_json(const sgh_graph* g, char** out);

/* -- particle simulation ---------------------------------------------------- */

/* field_json: a field descriptor such as "{\"type\":\"zero\"}". horizon is
 * used for the field's declared bound. accel <= 0 selects 5^N. */
SGH_API sgh_status sgh_sim_create(const sgh_graph* g, const double* lambda_plus, const double* lambda_minus, size_t nb,
                                  const char* field_json, double horizon, double accel, const uint8_t* eta0, size_t n,
                                  uint64_t seed, uint32_t replica, sgh_sim** out);
SGH_API void sgh_sim_free(sgh_sim* s);
SGH_API sgh_status sgh_sim_advance(sgh_sim* s, double t);
/* Any output pointer may be NULL. */
SGH_API sgh_status sgh_sim_state(const sgh_sim* s, double* clock, uint8_t* eta, size_t n, int64_t* current, size_t ne,
                                 uint64_t* events);

/* -- hydrodynamic equation ------------------------------------------------- */

/* Solves to time T and writes the final density into rho_T (length n). */
SGH_API sgh_status sgh_pde_solve(const sgh_graph* g, const char* field_json, const double* rho0, size_t n,
                                 const double* rho_bar, size_t nb, double dt, double T, double theta, double* rho_T,
                                 double* weak_residual);

/* -- rate function ---------------------------------------------------------- */

/* Trajectory arrays are row-major: rho[k*n + v], flux[k*ne + e] (integrated
 * current, calibrated normalisation). *infinite is set to 1 when the value
 * is infinite; diagnostics (may be NULL) receives the reason. */
SGH_API sgh_status sgh_rate_symmetric(const sgh_graph* g, const double* times, size_t K, const double* rho, size_t n,
                                      const double* flux, size_t ne, double* value, int* infinite, char** diagnostics);
SGH_API sgh_status sgh_rate_optimize_tilt(const sgh_graph* g, const double* times, size_t K, const double* rho,
                                          size_t n, const double* flux, size_t ne, double* value);

/* -- experiments ------------------------------------------------------------ */

/* source names the config in error messages ("<source>:<line>: ..."). */
SGH_API sgh_status sgh_config_validate(const char* config_text, const char* source, char** report);
/* threads = 0 uses every hardware thread. summary (may be NULL) receives a
 * JSON object of derived quantities. */
SGH_API sgh_status sgh_experiment_run(const char* config_text, const char* source, const char* out_dir,
                                      unsigned threads, char** summary);

#ifdef __cplusplus
}
#endif

#endif
