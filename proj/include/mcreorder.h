/* mcreorder: reorder a fixed pool of Monte Carlo samples so that sequentially
 * propagated prefixes converge to the pool's empirical distribution as fast as
 * possible, plus a 2-D Cahn-Hilliard demonstration model and convergence
 * reporting.
 *
 * Conventions:
 *   - Every fallible function returns mcr_status; MCR_OK is 0.
 *   - On failure, mcr_last_error() returns a message for the current thread.
 *   - Objects created through an mcr_*_create/read/run function are owned by
 *     the caller and released with the matching mcr_*_free.
 *   - Pools are immutable and may be shared across threads. Other handles
 *     must not be mutated concurrently.
 *   - All randomness is derived from explicit 64-bit seeds; equal seeds give
 *     bit-identical results on every platform, independent of thread counts.
 */
#ifndef MCREORDER_H
#define MCREORDER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcr_status {
  MCR_OK = 0,
  MCR_ERR_INVALID = 2,     /* bad argument or configuration */
  MCR_ERR_IO = 3,          /* file open/read/write/parse failure */
  MCR_ERR_SIMULATION = 4,  /* numerical blow-up in a model run */
  MCR_ERR_CONSISTENCY = 5, /* artifacts disagree (fingerprints, shapes) */
  MCR_ERR_INTERNAL = 70
} mcr_status;

typedef struct mcr_pool mcr_pool;
typedef struct mcr_trace mcr_trace;
typedef struct mcr_outputs mcr_outputs;
typedef struct mcr_report mcr_report;

/* Selection objective. norm: 0 = Manhattan/L1 (default), 1 = L2, 2 = Linf.
 * scale: optional per-dimension divisors (length = pool dims), NULL = none. */
typedef struct mcr_objective {
  int norm;
  const double* scale;
} mcr_objective;

const char* mcr_version(void);
const char* mcr_rng_name(void);
const char* mcr_last_error(void);

/* ---- sample pools ------------------------------------------------------ */

/* data: row-major n*d; must be finite. */
mcr_status mcr_pool_create(const double* data, size_t n, size_t d, mcr_pool** out);
/* priors_json: JSON list of {"family":...,"params":[...]} (see README);
 * NULL selects the built-in 4-D demonstration priors. */
mcr_status mcr_pool_generate(const char* priors_json, size_t n, uint64_t seed,
                             mcr_pool** out);
mcr_status mcr_pool_read_csv(const char* path, mcr_pool** out);
mcr_status mcr_pool_write_csv(const mcr_pool* pool, const char* path);
void mcr_pool_free(mcr_pool* pool);

size_t mcr_pool_size(const mcr_pool* pool);
size_t mcr_pool_dims(const mcr_pool* pool);
mcr_status mcr_pool_value(const mcr_pool* pool, size_t row, size_t col, double* out);
uint64_t mcr_pool_fingerprint(const mcr_pool* pool);
mcr_status mcr_pool_column_stddev(const mcr_pool* pool, size_t col, double* out);

/* Built-in priors for the 4-D phase-field inputs [c*, W, kappa, M]. */
const char* mcr_default_priors_json(void);
mcr_status mcr_validate_priors_json(const char* priors_json);
mcr_status mcr_validate_model_json(const char* model_json);

/* ---- Wasserstein metric ------------------------------------------------ */

/* Exact W1 between the empirical distributions of two ascending multisets. */
mcr_status mcr_w1_sorted(const double* a, size_t m, const double* b, size_t n,
                         double* out);

/* ||W||_1 (and optionally the per-dimension vector) between the first m
 * entries of `order` and the full pool. order_len must equal pool size. */
mcr_status mcr_prefix_distance(const mcr_pool* pool, const uint32_t* order,
                               size_t order_len, size_t m, double* w_out,
                               double* manhattan_out);

/* ---- reordering policies ------------------------------------------------ */

/* Greedy per-sample argmin (ties to the smallest index); performs exactly
 * n(n+1)/2 - 1 candidate evaluations. objective may be NULL (L1). */
mcr_status mcr_reorder_greedy(const mcr_pool* pool, const mcr_objective* objective,
                              int threads, mcr_trace** out);
/* Best of k random size-b batches per iteration; ties to the first-drawn
 * batch; the final short remainder is appended without evaluation.
 * exhaustive != 0 enumerates every remaining sample instead of drawing
 * (requires b == 1; reduces to the greedy policy). */
mcr_status mcr_reorder_batch(const mcr_pool* pool, size_t b, size_t k, uint64_t seed,
                             uint32_t replicate, int exhaustive,
                             const mcr_objective* objective, int threads,
                             mcr_trace** out);
/* Uniform random permutation (Fisher-Yates over the seeded stream). */
mcr_status mcr_reorder_random(const mcr_pool* pool, uint64_t seed, uint32_t replicate,
                              mcr_trace** out);

void mcr_trace_free(mcr_trace* trace);
size_t mcr_trace_length(const mcr_trace* trace);      /* n */
size_t mcr_trace_event_count(const mcr_trace* trace); /* iterations */
uint64_t mcr_trace_eval_count(const mcr_trace* trace);
const char* mcr_trace_policy(const mcr_trace* trace);
size_t mcr_trace_batch_size(const mcr_trace* trace);
uint64_t mcr_trace_pool_fingerprint(const mcr_trace* trace);
/* out must hold mcr_trace_length entries. */
mcr_status mcr_trace_order(const mcr_trace* trace, uint32_t* out);
/* JSONL: one meta line, then one object per iteration
 * {"iter":t,"picked":[...],"w":[...],"manhattan":x,"elapsed_ms":y}.
 * with_timings == 0 writes elapsed_ms as 0 so reruns are byte-identical. */
mcr_status mcr_trace_write_jsonl(const mcr_trace* trace, const char* path,
                                 int with_timings);
mcr_status mcr_trace_read_jsonl(const char* path, mcr_trace** out);

/* ---- model propagation -------------------------------------------------- */

/* model_json: {"name":"identity"} | {"name":"surrogate"} |
 * {"name":"phasefield", "grid_n":64, "dt":0.5, "steps":3000, "seed":0, ...}.
 * Evaluates the model on the first `budget` samples of `order` (trace order;
 * NULL = natural order 0..n-1). Rows already evaluated in `resume` are kept.
 * A failing sample is recorded as a flagged row, not an error. */
mcr_status mcr_propagate(const mcr_pool* pool, const mcr_trace* order,
                         const char* model_json, size_t budget,
                         const mcr_outputs* resume, int threads, mcr_outputs** out);

void mcr_outputs_free(mcr_outputs* outputs);
size_t mcr_outputs_rows(const mcr_outputs* outputs);
size_t mcr_outputs_cols(const mcr_outputs* outputs);
size_t mcr_outputs_evaluated(const mcr_outputs* outputs);
size_t mcr_outputs_failed(const mcr_outputs* outputs);
/* 0 = pending, 1 = ok, 2 = failed */
int mcr_outputs_status(const mcr_outputs* outputs, size_t row);
const char* mcr_outputs_flags(const mcr_outputs* outputs, size_t row);
mcr_status mcr_outputs_value(const mcr_outputs* outputs, size_t row, size_t col,
                             double* out);
uint64_t mcr_outputs_pool_fingerprint(const mcr_outputs* outputs);
/* CSV header: sample_id,<columns...>,flags. A `<path>.meta.json` sidecar holds
 * the pool fingerprint and model name. */
mcr_status mcr_outputs_write_csv(const mcr_outputs* outputs, const char* path);
mcr_status mcr_outputs_read_csv(const char* path, mcr_outputs** out);
/* Output-space ||W||_1 of the first m picks vs all evaluated rows. */
mcr_status mcr_outputs_prefix_distance(const mcr_outputs* outputs,
                                       const uint32_t* order, size_t order_len,
                                       size_t m, double* manhattan_out);

/* ---- convergence reports ------------------------------------------------ */

mcr_status mcr_report_create(const size_t* checkpoints, size_t n_checkpoints,
                             mcr_report** out);
void mcr_report_free(mcr_report* report);

/* Adds one curve built from replicate traces, measured against the input pool
 * (or propagated outputs). Trace/pool fingerprints must agree. */
mcr_status mcr_report_add_input_curve(mcr_report* report, const mcr_pool* pool,
                                      const char* name, size_t b,
                                      const mcr_trace* const* traces, size_t n_traces,
                                      int threads);
mcr_status mcr_report_add_output_curve(mcr_report* report, const mcr_outputs* outputs,
                                       const char* name, size_t b,
                                       const mcr_trace* const* traces, size_t n_traces,
                                       int threads);
/* Runs a policy for `replicates` child-seeded runs and adds its input-space
 * curve. policy_json: {"policy":"greedy"|"batch"|"random", "b":..., "k":...,
 * "seed":..., "exhaustive":false, "norm":"l1"|"l2"|"linf", "scale":[...]}. */
mcr_status mcr_report_run_policy(mcr_report* report, const mcr_pool* pool,
                                 const char* policy_json, size_t replicates,
                                 int threads);

size_t mcr_report_curve_count(const mcr_report* report);
const char* mcr_report_curve_name(const mcr_report* report, size_t curve);
mcr_status mcr_report_curve_mean(const mcr_report* report, size_t curve,
                                 size_t checkpoint_index, double* out);
/* meta_json is embedded verbatim under "meta". with_timings == 0 zeroes the
 * wall-time fields so reruns are byte-identical. */
mcr_status mcr_report_write_json(const mcr_report* report, const char* path,
                                 const char* meta_json, int with_timings);
/* Flat CSV: policy,b,m,mean,lo,hi */
mcr_status mcr_report_write_plot_csv(const mcr_report* report, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MCREORDER_H */
