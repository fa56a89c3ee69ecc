#ifndef SUBRANK_H
#define SUBRANK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SubrankStatus {
  SUBRANK_STATUS_OK = 0,
  SUBRANK_STATUS_NULL_POINTER = 1,
  SUBRANK_STATUS_INVALID_UTF8 = 2,
  // The document could not be parsed or the instance is invalid.
  SUBRANK_STATUS_INVALID_INSTANCE = 3,
  // The instance exceeds the brute-force limit.
  SUBRANK_STATUS_TOO_LARGE = 4,
  SUBRANK_STATUS_BUFFER_TOO_SMALL = 5,
  SUBRANK_STATUS_INVALID_ARGUMENT = 6,
  // Solver traces exist only for the adaptive and greedy algorithms.
  SUBRANK_STATUS_NO_TRACE = 7,
  // A Rust panic was caught at the boundary.
  SUBRANK_STATUS_PANIC = 8,
} SubrankStatus;

typedef enum SubrankAlgorithm {
  SUBRANK_ALGORITHM_ADAPTIVE_RESIDUAL = 0,
  SUBRANK_ALGORITHM_CUMULATIVE_GREEDY = 1,
  SUBRANK_ALGORITHM_BRUTE_FORCE = 2,
} SubrankAlgorithm;

// A validated instance.
typedef struct SubrankInstance SubrankInstance;

// The outcome of [`subrank_solve`].
typedef struct SubrankRun SubrankRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses an instance document with the default threshold slack (1e-9).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum SubrankStatus subrank_instance_from_json(const char *json, struct SubrankInstance **out);

// Parses an instance document; a function counts as covered once its value
// reaches `1 - tolerance`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum SubrankStatus subrank_instance_from_json_with_tolerance(const char *json,
                                                             double tolerance,
                                                             struct SubrankInstance **out);

// # Safety
// `instance` must be NULL or a handle from `subrank_instance_from_json*`
// that has not been freed.
void subrank_instance_free(struct SubrankInstance *instance);

// Number of elements `m`, or 0 for NULL.
//
// # Safety
// `instance` must be NULL or a live handle.
size_t subrank_instance_num_elements(const struct SubrankInstance *instance);

// Number of functions `n`, or 0 for NULL.
//
// # Safety
// `instance` must be NULL or a live handle.
size_t subrank_instance_num_functions(const struct SubrankInstance *instance);

// Writes the certified smallest marginal `epsilon_hat` and
// `gamma = ln(1/epsilon_hat) + 2`.
//
// # Safety
// `instance` must be a live handle; the output pointers must be writable.
enum SubrankStatus subrank_instance_gamma(const struct SubrankInstance *instance,
                                          double *epsilon_hat,
                                          double *gamma);

// Cost of a caller-supplied 1-based ordering of length `m`.
//
// # Safety
// `instance` must be a live handle, `ordering` must point to `len` readable
// values and `cost` must be writable.
enum SubrankStatus subrank_cover_cost(const struct SubrankInstance *instance,
                                      const size_t *ordering,
                                      size_t len,
                                      double *cost);

// Orders the elements of `instance`. `limit` caps the ground set size for
// brute force (0 selects the default of 9) and is ignored otherwise.
//
// # Safety
// `instance` must be a live handle and `out` writable.
enum SubrankStatus subrank_solve(const struct SubrankInstance *instance,
                                 enum SubrankAlgorithm algorithm,
                                 size_t limit,
                                 struct SubrankRun **out);

// # Safety
// `run` must be NULL or a handle from [`subrank_solve`] that has not been freed.
void subrank_run_free(struct SubrankRun *run);

// Total weighted cover time, or NaN for NULL.
//
// # Safety
// `run` must be NULL or a live handle.
double subrank_run_cost(const struct SubrankRun *run);

// Copies the 1-based ordering (`m` values) into `buffer`.
//
// # Safety
// `run` must be a live handle and `buffer` must have room for `len` values.
enum SubrankStatus subrank_run_ordering(const struct SubrankRun *run, size_t *buffer, size_t len);

// Copies the cover times (`n` values, each in `1..=m`) into `buffer`.
//
// # Safety
// `run` must be a live handle and `buffer` must have room for `len` values.
enum SubrankStatus subrank_run_cover_times(const struct SubrankRun *run,
                                           size_t *buffer,
                                           size_t len);

// The canonical JSON trace of an adaptive or greedy run. Release the string
// with [`subrank_string_free`].
//
// # Safety
// `run` must be a live handle and `out` writable.
enum SubrankStatus subrank_run_trace_json(const struct SubrankRun *run, char **out);

// # Safety
// `text` must be NULL or a string returned by this library, not yet freed.
void subrank_string_free(char *text);

// Message for the most recent failed call on this thread, or NULL after a
// successful one. Valid until the next call into the library on this thread.
const char *subrank_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBRANK_H */
