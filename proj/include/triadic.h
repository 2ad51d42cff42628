#ifndef TRIADIC_H
#define TRIADIC_H

/* C interface to the triadic-process simulation library.
 *
 * The library simulates the triadic closure process on a lazily sampled
 * random 3-uniform hypergraph: starting from a star, the edge xy is added
 * whenever some z with xz and zy present forms a hyperedge xzy.  All state
 * lives behind opaque handles; every fallible call returns a status code.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TRIADIC_API __declspec(dllexport)
#else
#define TRIADIC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum triadic_status {
  TRIADIC_OK = 0,
  TRIADIC_ERR_INVALID_INSTANCE = 1,
  TRIADIC_ERR_INVALID_PROBABILITY = 2,
  TRIADIC_ERR_INVALID_PAIR = 3,
  TRIADIC_ERR_STALLED = 4,
  TRIADIC_ERR_ILLEGAL_EDGE = 5,
  TRIADIC_ERR_REFUSED_SCALE = 6,
  TRIADIC_ERR_NO_ROOT = 7,
  TRIADIC_ERR_HORIZON_TOO_LATE = 8,
  TRIADIC_ERR_NEAR_SINGULARITY = 9,
  TRIADIC_ERR_NOT_PROPAGATED = 10,
  TRIADIC_ERR_CONFIG_MISMATCH = 11,
  TRIADIC_ERR_BRACKET_FAILURE = 12,
  TRIADIC_ERR_IO = 13,
  TRIADIC_ERR_INVALID_ARGUMENT = 14,
  TRIADIC_ERR_INTERNAL = 15
} triadic_status;

/* Stable short name for a status code ("ok", "invalid_instance", ...). */
TRIADIC_API const char* triadic_status_name(triadic_status s);

/* ------------------------------------------------------------------ */
/* Process engine                                                      */
/* ------------------------------------------------------------------ */

typedef struct triadic_process triadic_process;

typedef struct triadic_step_outcome {
  uint32_t triple[3]; /* sampled triple, sorted */
  int32_t success;
  uint32_t edge[2]; /* added edge, valid iff success */
  uint64_t triples_closed;
  uint64_t triples_opened;
} triadic_step_outcome;

typedef struct triadic_round_outcome {
  uint64_t q_before;
  uint64_t sampled_count;
  uint64_t success_count;
  uint64_t new_edges;
  uint64_t q_after;
} triadic_round_outcome;

/* stall_reason values in triadic_final_report */
enum {
  TRIADIC_STALL_COMPLETE = 0,
  TRIADIC_STALL_REGISTRY_EMPTY = 1,
  TRIADIC_STALL_TRUNCATED = 2
};

typedef struct triadic_final_report {
  int32_t propagated;
  int32_t stall_reason;
  uint64_t final_edges;
  uint64_t phase1_steps;
  uint64_t phase2_rounds;
} triadic_final_report;

/* Creates a process on n >= 3 vertices with per-triple probability p,
 * starting from the star centered at v0.  The triple-outcome oracle is a
 * pure function of (seed, triple); the order of uniform sampling is driven
 * by an independent stream derived from the same seed.  When
 * track_history is nonzero the process records every sample, which is
 * required for certificate extraction. */
TRIADIC_API triadic_status triadic_process_create(uint32_t n, double p,
                                                  uint64_t seed, uint32_t v0,
                                                  int32_t track_history,
                                                  triadic_process** out);

/* Same, with an explicit sampling-order seed (the oracle keeps `seed`). */
TRIADIC_API triadic_status triadic_process_create_ex(uint32_t n, double p,
                                                     uint64_t seed,
                                                     uint64_t order_seed,
                                                     uint32_t v0,
                                                     int32_t track_history,
                                                     triadic_process** out);

TRIADIC_API void triadic_process_destroy(triadic_process* p);

/* One phase-1 step: sample a uniform open triple.  Returns
 * TRIADIC_ERR_STALLED when no open triple remains. */
TRIADIC_API triadic_status triadic_process_step(triadic_process* p,
                                                triadic_step_outcome* out);

/* One phase-2 round.  With use_override nonzero every open triple is
 * decided by a fresh Bernoulli(override_p) draw instead of the native
 * oracle (the sprinkling variant). */
TRIADIC_API triadic_status triadic_process_round(triadic_process* p,
                                                 int32_t use_override,
                                                 double override_p,
                                                 triadic_round_outcome* out);

TRIADIC_API triadic_status triadic_process_run_phase1(triadic_process* p,
                                                      uint64_t max_steps,
                                                      uint64_t* steps_taken,
                                                      int32_t* stalled);

/* mode: 0 = standard rounds at native p, 1 = sprinkling. */
TRIADIC_API triadic_status triadic_process_run_phase2(
    triadic_process* p, int32_t mode, uint64_t max_rounds,
    triadic_final_report* out);

TRIADIC_API uint32_t triadic_process_n(const triadic_process* p);
TRIADIC_API uint64_t triadic_process_edge_count(const triadic_process* p);
TRIADIC_API uint64_t triadic_process_open_count(const triadic_process* p);
TRIADIC_API uint64_t triadic_process_step_index(const triadic_process* p);
TRIADIC_API uint64_t triadic_process_round_index(const triadic_process* p);
TRIADIC_API uint32_t triadic_process_degree(const triadic_process* p,
                                            uint32_t v);
TRIADIC_API uint64_t triadic_process_open_at(const triadic_process* p,
                                             uint32_t v);
TRIADIC_API int32_t triadic_process_complete(const triadic_process* p);

/* Writes the history log (one record per sample) to a file.  Fails with
 * TRIADIC_ERR_INVALID_ARGUMENT if the process does not track history. */
TRIADIC_API triadic_status triadic_process_write_history(
    const triadic_process* p, const char* path);

/* ------------------------------------------------------------------ */
/* Observables (pure; never mutate the process)                        */
/* ------------------------------------------------------------------ */

TRIADIC_API triadic_status triadic_codegree(const triadic_process* p,
                                            uint32_t u, uint32_t v,
                                            uint64_t* out);
TRIADIC_API triadic_status triadic_tilde_codegree(const triadic_process* p,
                                                  uint32_t u, uint32_t v,
                                                  uint64_t* out);
TRIADIC_API triadic_status triadic_open_three_walks(const triadic_process* p,
                                                    uint32_t u, uint32_t v,
                                                    uint64_t* out);
TRIADIC_API triadic_status triadic_open_four_walks(const triadic_process* p,
                                                   uint32_t u, uint32_t v,
                                                   uint64_t* out);

/* ------------------------------------------------------------------ */
/* Closed-form trajectories                                            */
/* ------------------------------------------------------------------ */

TRIADIC_API triadic_status triadic_closed_form(double c, double t, double* d,
                                               double* f, double* y,
                                               double* z);

/* First positive root of f for 0 < c <= 1/2. */
TRIADIC_API triadic_status triadic_f_root(double c, double* t0);

TRIADIC_API triadic_status triadic_compute_k(double c, double horizon,
                                             double* k);

TRIADIC_API triadic_status triadic_envelopes(double c, double k, uint32_t n,
                                             double t, double* g1, double* g2);

/* regime: 0 = subcritical, 1 = critical, 2 = supercritical. */
TRIADIC_API triadic_status triadic_select_horizon(double c, uint32_t n,
                                                  double* horizon, double* k,
                                                  int32_t* regime);

/* Max absolute ODE residual of the closed forms on [t_lo, t_hi]. */
TRIADIC_API triadic_status triadic_verify_ode(double c, double t_lo,
                                              double t_hi, double pitch,
                                              double* max_residual);

/* Max componentwise gap between an RK4 integration (step h) and the
 * closed forms on [0, t_end]. */
TRIADIC_API triadic_status triadic_rk4_max_gap(double c, double t_end,
                                               double h, double* max_gap);

/* ------------------------------------------------------------------ */
/* Experiment drivers                                                  */
/* ------------------------------------------------------------------ */

enum {
  TRIADIC_MODE_FULL = 0,     /* phase 1, then standard rounds */
  TRIADIC_MODE_SPRINKLE = 1, /* phase 1, then sprinkling rounds */
  TRIADIC_MODE_PHASE2_ONLY = 2
};

typedef struct triadic_run_config {
  uint32_t n;
  double c; /* p = c/sqrt(n); set to 0 (or negative) to pass p instead */
  double p; /* explicit probability; ignored when c > 0 */
  uint64_t seed;
  int32_t mode;
  double horizon;               /* phase-1 horizon override in time units; <= 0 -> automatic */
  uint64_t checkpoint_interval; /* steps between checkpoints; 0 -> ceil(n^2/100) */
  uint32_t monitored_pairs;     /* 0 -> 20 */
  uint64_t max_rounds;          /* 0 -> 10*ceil(log2 n) */
  const char* out_dir;          /* NULL -> no files written */
} triadic_run_config;

TRIADIC_API triadic_status triadic_run(const triadic_run_config* cfg,
                                       triadic_final_report* out);

typedef struct triadic_scan_config {
  const uint32_t* n_values;
  size_t n_count;
  const double* c_values;
  size_t c_count;
  uint32_t trials;
  uint32_t workers; /* 0 -> 1 */
  uint64_t master_seed;
  const char* out_csv; /* NULL -> no file */
} triadic_scan_config;

TRIADIC_API triadic_status triadic_scan(const triadic_scan_config* cfg);

typedef struct triadic_threshold_config {
  uint32_t n;
  double c_lo;
  double c_hi;
  double tolerance;
  uint32_t trials;
  uint32_t workers;
  uint64_t master_seed;
  const char* out_json; /* NULL -> no file */
} triadic_threshold_config;

typedef struct triadic_threshold_estimate {
  double c_hat;
  double bracket_lo;
  double bracket_hi;
  double freq_lo;
  double freq_hi;
  uint32_t trials_per_probe;
} triadic_threshold_estimate;

TRIADIC_API triadic_status triadic_threshold(
    const triadic_threshold_config* cfg, triadic_threshold_estimate* out);

/* Exact propagation probability by exhaustive hypergraph enumeration;
 * refuses n > 6. */
TRIADIC_API triadic_status triadic_exact_propagation_probability(uint32_t n,
                                                                 double p,
                                                                 double* out);

typedef struct triadic_collapse_config {
  uint32_t n;
  double c; /* as in triadic_run_config */
  double p;
  uint64_t seed;
  const char* out_dir; /* NULL -> no files */
} triadic_collapse_config;

typedef struct triadic_collapse_report {
  int32_t propagated;
  int32_t certificate_verified;
  int32_t is_hypertree;
  uint64_t certificate_steps;
  uint64_t residual_edges;
  uint64_t residual_faces;
} triadic_collapse_report;

TRIADIC_API triadic_status triadic_collapse(const triadic_collapse_config* cfg,
                                            triadic_collapse_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TRIADIC_H */
