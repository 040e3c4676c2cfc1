#ifndef CRAN_POOL_H
#define CRAN_POOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CranPoolScheme {
  CRAN_POOL_SCHEME_OPTIMIZED_POOLING = 0,
  CRAN_POOL_SCHEME_NO_POOLING = 1,
  CRAN_POOL_SCHEME_EQUAL_THIRDS = 2,
  CRAN_POOL_SCHEME_ORTHOGONAL_OPTIMIZED = 3,
} CranPoolScheme;

typedef enum CranPoolStatus {
  CRAN_POOL_STATUS_OK = 0,
  CRAN_POOL_STATUS_NULL_POINTER = 1,
  CRAN_POOL_STATUS_INVALID_UTF8 = 2,
  CRAN_POOL_STATUS_INVALID_CONFIG = 3,
  CRAN_POOL_STATUS_INVALID_ARGUMENT = 4,
  CRAN_POOL_STATUS_INFEASIBLE = 5,
  CRAN_POOL_STATUS_NUMERICAL = 6,
  CRAN_POOL_STATUS_IO = 7,
  CRAN_POOL_STATUS_PANIC = 8,
} CranPoolStatus;

// One channel realization of a scenario.
typedef struct CranPoolInstance CranPoolInstance;

// Outcome of one optimization run.
typedef struct CranPoolResult CranPoolResult;

// Scenario plus optimizer settings parsed from a config file.
typedef struct CranPoolScenario CranPoolScenario;

// Headline numbers of one optimization run.
typedef struct CranPoolSummary {
  double sum_rate_bps;
  double secrecy_sum_rate_bps;
  double w_p1_hz;
  double w_p2_hz;
  double w_s_hz;
  // Largest relative violation of any constraint.
  double max_violation;
  size_t iterations;
  // 1 if the stopping rule fired before the iteration budget ran out.
  int32_t converged;
} CranPoolSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none failed.
// The pointer stays valid until the next failing call on the same thread.
const char *cran_pool_last_error(void);

// Library version as a static NUL-terminated string.
const char *cran_pool_version(void);

// Parses a TOML config (same keys as the `cran-pool` CLI) into a scenario.
//
// # Safety
// `config_toml` must be null or a NUL-terminated string; `out` must be null
// or valid for writing a pointer.
enum CranPoolStatus cran_pool_scenario_from_config(const char *config_toml,
                                                   struct CranPoolScenario **out);

// # Safety
// `scenario` must be null or a pointer returned by
// `cran_pool_scenario_from_config` that was not freed yet.
void cran_pool_scenario_free(struct CranPoolScenario *scenario);

// Draws placement and channels for `seed`.
//
// # Safety
// `scenario` must be null or a live scenario handle; `out` must be null or
// valid for writing a pointer.
enum CranPoolStatus cran_pool_instance_generate(const struct CranPoolScenario *scenario,
                                                uint64_t seed,
                                                struct CranPoolInstance **out);

// # Safety
// `instance` must be null or a live instance handle.
void cran_pool_instance_free(struct CranPoolInstance *instance);

// Runs the optimizer on `instance`. `scheme` is one of the
// `CRAN_POOL_SCHEME_*` values.
//
// # Safety
// `instance` must be null or a live instance handle; `out` must be null or
// valid for writing a pointer.
enum CranPoolStatus cran_pool_optimize(const struct CranPoolInstance *instance,
                                       uint32_t scheme,
                                       struct CranPoolResult **out);

// Copies the headline numbers of `result` into `out`.
//
// # Safety
// `result` must be null or a live result handle; `out` must be null or
// valid for writing a `CranPoolSummary`.
enum CranPoolStatus cran_pool_result_summary(const struct CranPoolResult *result,
                                             struct CranPoolSummary *out);

// Writes the per-iteration trace as CSV (`iter,sum_rate_bps,max_violation,ms`).
//
// # Safety
// `result` must be null or a live result handle; `path` must be null or a
// NUL-terminated string.
enum CranPoolStatus cran_pool_result_write_trace(const struct CranPoolResult *result,
                                                 const char *path);

// # Safety
// `result` must be null or a live result handle.
void cran_pool_result_free(struct CranPoolResult *result);

// Runs the whole experiment described by `config_toml` (which must set
// `sweep_axis` and `sweep_values`) and writes the CSV to `out_path`.
//
// # Safety
// Both arguments must be null or NUL-terminated strings.
enum CranPoolStatus cran_pool_run_experiment(const char *config_toml, const char *out_path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRAN_POOL_H */
