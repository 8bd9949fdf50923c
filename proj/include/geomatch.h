/* geomatch — online matching on one-dimensional random geometric graphs.
 *
 * C interface to the geomatch core library. All objects are opaque handles
 * owned by the library; every function that can fail returns a
 * geomatch_status and leaves outputs untouched on error. A thread-local
 * message for the last failing call is available via geomatch_last_error().
 */
#ifndef GEOMATCH_H
#define GEOMATCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GEOMATCH_API __declspec(dllexport)
#else
#define GEOMATCH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum geomatch_status {
  GEOMATCH_OK = 0,
  GEOMATCH_ERR_INVALID_ARGUMENT = 1,
  GEOMATCH_ERR_EMPTY_ENSEMBLE = 2,
  GEOMATCH_ERR_GRID_TOO_FINE = 3,
  GEOMATCH_ERR_INSTANCE_TOO_LARGE = 4,
  GEOMATCH_ERR_NOT_ON_GRID = 5,
  GEOMATCH_ERR_FREE_SET_EXHAUSTED = 6,
  GEOMATCH_ERR_DEGENERATE_STATE = 7,
  GEOMATCH_ERR_SINGULAR_TIME = 8,
  GEOMATCH_ERR_INTEGRATION_DIVERGED = 9,
  GEOMATCH_ERR_CONFIG = 10,
  GEOMATCH_ERR_IO = 11,
  GEOMATCH_ERR_INTERNAL = 12
} geomatch_status;

enum geomatch_topology { GEOMATCH_TOPOLOGY_LINE = 0, GEOMATCH_TOPOLOGY_CIRCLE = 1 };
enum geomatch_fluid_mode { GEOMATCH_FLUID_CARDINALITY = 0, GEOMATCH_FLUID_METRIC = 1 };
enum geomatch_fluid_init {
  GEOMATCH_INIT_EXPONENTIAL = 0, /* k*p_k^2*exp(-l/k), p_k = 1-exp(-1/k)   */
  GEOMATCH_INIT_EXACT_GAPS = 1,    /* k*p_k^2*exp(-(l-1)/k): exact gap law   */
  GEOMATCH_INIT_NORMALIZED = 2     /* (1/k)(1-1/k)^(l-1): unit mass + length */
};

typedef struct geomatch_instance geomatch_instance;
typedef struct geomatch_matching geomatch_matching;
typedef struct geomatch_fluid geomatch_fluid;

GEOMATCH_API const char* geomatch_version(void);
GEOMATCH_API const char* geomatch_status_name(geomatch_status s);
GEOMATCH_API const char* geomatch_last_error(void);

/* ---- closed forms ---- */

/* Limit fraction of offline-matchable vertices, c/(c+1/2). */
GEOMATCH_API double geomatch_offline_fraction(double c);
/* Stationary density of the frontier-difference walk at x for threshold c. */
GEOMATCH_API double geomatch_stationary_density(double x, double c);
/* Limit total matching length after a fraction t of arrivals, (1/2)[1/(1-t)-1]. */
GEOMATCH_API double geomatch_metric_total_length(double t);

/* ---- instances ----
 * c < 0 or unbounded_c != 0 selects metric mode (no distance threshold).
 * Edge threshold in cardinality mode is c/n; circle distance is
 * min(|x-y|, 1-|x-y|).
 */
GEOMATCH_API geomatch_status geomatch_instance_uniform(
    uint64_t n, uint64_t n_online, double c, int unbounded_c, int topology,
    uint64_t seed, uint64_t stream, geomatch_instance** out);

/* Offline side run through the rounding pipeline (Poissonize, round to the
 * 1/(n*k) grid, discard duplicates, glue to the unit circle with a vertex
 * at 0). Online side is n_online uniform arrivals. */
GEOMATCH_API geomatch_status geomatch_instance_rounded(
    uint64_t n, uint64_t n_online, double c, int unbounded_c, uint32_t k,
    uint64_t seed, uint64_t stream, geomatch_instance** out);

GEOMATCH_API geomatch_status geomatch_instance_save(const geomatch_instance* inst,
                                                    const char* path);
GEOMATCH_API geomatch_status geomatch_instance_load(const char* path,
                                                    geomatch_instance** out);

GEOMATCH_API uint64_t geomatch_instance_offline_count(const geomatch_instance*);
GEOMATCH_API uint64_t geomatch_instance_online_count(const geomatch_instance*);
GEOMATCH_API uint64_t geomatch_instance_n(const geomatch_instance*);
GEOMATCH_API uint32_t geomatch_instance_k(const geomatch_instance*);
GEOMATCH_API double geomatch_instance_c(const geomatch_instance*, int* unbounded);
GEOMATCH_API int geomatch_instance_topology(const geomatch_instance*);
GEOMATCH_API double geomatch_instance_offline_coord(const geomatch_instance*, uint64_t i);
GEOMATCH_API double geomatch_instance_online_coord(const geomatch_instance*, uint64_t i);
GEOMATCH_API void geomatch_instance_free(geomatch_instance*);

/* ---- matchings ---- */

/* Offline optimum via the small-first sweep (line topology, bounded c). */
GEOMATCH_API geomatch_status geomatch_small_first(const geomatch_instance*,
                                                  geomatch_matching** out);

/* Online greedy: each arrival goes to the nearest free offline vertex.
 * Cardinality mode matches only below the c/n threshold; metric mode always
 * matches. max_arrivals = 0 processes the whole online side. */
GEOMATCH_API geomatch_status geomatch_closest(const geomatch_instance*,
                                              uint64_t max_arrivals,
                                              geomatch_matching** out);

/* Exact maximum matching size by augmenting paths (≤ 2000 points per side). */
GEOMATCH_API geomatch_status geomatch_brute_force_max_matching(
    const geomatch_instance*, uint64_t* out);

GEOMATCH_API uint64_t geomatch_matching_kappa(const geomatch_matching*);
GEOMATCH_API double geomatch_matching_rho(const geomatch_matching*);
GEOMATCH_API uint64_t geomatch_matching_edge_count(const geomatch_matching*);
GEOMATCH_API geomatch_status geomatch_matching_edge(const geomatch_matching*,
                                                    uint64_t i, uint32_t* offline_idx,
                                                    uint32_t* online_idx, double* length);
GEOMATCH_API void geomatch_matching_free(geomatch_matching*);

/* ---- generative frontier walk ---- */

/* Simulates the graph + matching jointly through the frontier-difference
 * walk; returns the iteration count, the fraction of matched iterations and
 * the matched-vertex fraction 2p/(p+1). */
GEOMATCH_API geomatch_status geomatch_generative_walk(double n, double c,
                                                      uint64_t seed, uint64_t stream,
                                                      uint64_t* tau, double* p_hat,
                                                      double* matched_fraction);

/* ---- fluid limit ---- */

GEOMATCH_API geomatch_status geomatch_fluid_create(uint32_t k, double c,
                                                   int unbounded_c, uint32_t lmax,
                                                   int mode, int init_kind,
                                                   geomatch_fluid** out);
GEOMATCH_API geomatch_status geomatch_fluid_integrate(geomatch_fluid*, double t_end,
                                                      double dt);
GEOMATCH_API double geomatch_fluid_time(const geomatch_fluid*);
GEOMATCH_API double geomatch_fluid_mass(const geomatch_fluid*);
GEOMATCH_API double geomatch_fluid_length_sum(const geomatch_fluid*);
GEOMATCH_API double geomatch_fluid_matched_fraction(const geomatch_fluid*);
GEOMATCH_API double geomatch_fluid_kappa_prediction(const geomatch_fluid*);
GEOMATCH_API double geomatch_fluid_second_moment(const geomatch_fluid*);
GEOMATCH_API double geomatch_fluid_cumulative_length(const geomatch_fluid*);
GEOMATCH_API double geomatch_fluid_tail_mass(const geomatch_fluid*);
GEOMATCH_API void geomatch_fluid_free(geomatch_fluid*);

/* Online matched fraction at t=1 divided by the offline limit c/(c+1/2).
 * lmax = 0 picks the default truncation 40k. */
GEOMATCH_API geomatch_status geomatch_competitive_ratio(double c, uint32_t k,
                                                        double dt, uint32_t lmax,
                                                        double* out);

/* ---- experiment harness ----
 * config_text is the flat key=value format also accepted by --config files;
 * the JSON summary is heap-allocated and must be released with
 * geomatch_string_free. */
GEOMATCH_API geomatch_status geomatch_run_experiment(const char* config_text,
                                                     char** json_out);
GEOMATCH_API void geomatch_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GEOMATCH_H */
