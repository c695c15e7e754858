#ifndef XLMIMO_EE_H
#define XLMIMO_EE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible entry point.
typedef enum XlmimoStatus {
  XLMIMO_STATUS_OK = 0,
  // A required pointer argument was null.
  XLMIMO_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  XLMIMO_STATUS_INVALID_UTF8 = 2,
  // Configuration text could not be parsed or violates a unit constraint.
  XLMIMO_STATUS_INVALID_CONFIG = 3,
  // An argument is out of range for the model or drop.
  XLMIMO_STATUS_INVALID_ARGUMENT = 4,
  // The numerical core rejected the request.
  XLMIMO_STATUS_COMPUTATION_FAILED = 5,
  // A caller-supplied buffer is too small.
  XLMIMO_STATUS_BUFFER_TOO_SMALL = 6,
  // The library panicked; the handle involved should be freed.
  XLMIMO_STATUS_PANIC = 7,
} XlmimoStatus;

typedef enum XlmimoPrecoder {
  XLMIMO_PRECODER_CB = 0,
  XLMIMO_PRECODER_ZF = 1,
} XlmimoPrecoder;

typedef enum XlmimoScheme {
  XLMIMO_SCHEME_HRNP = 0,
  XLMIMO_SCHEME_LOCAL_SEARCH = 1,
  XLMIMO_SCHEME_GENETIC = 2,
  XLMIMO_SCHEME_SWARM = 3,
} XlmimoScheme;

// Path-gain matrix of one user drop, bound to the settings of its model.
typedef struct XlmimoDrop XlmimoDrop;

// Scenario, power model and heuristic settings with the derived analytic model.
typedef struct XlmimoModel XlmimoModel;

// Analytic optimum of the active-antenna count.
typedef struct XlmimoOptimum {
  size_t ms_star;
  // Last real-valued Newton iterate.
  double root;
  size_t iterations;
  double flops;
  // Analytic EE at `ms_star` (bits/J).
  double ee;
  size_t interval_lo;
  size_t interval_hi;
} XlmimoOptimum;

// Summary of one antenna-selection run.
typedef struct XlmimoSelection {
  // EE with the realized selection cost (bits/J).
  double ee;
  // EE under the search-time cost convention (bits/J).
  double raw_ee;
  size_t iterations;
  double flops_spent;
  size_t active;
} XlmimoSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null if none occurred.
//
// The pointer stays valid until the next failing call on the same thread.
const char *xlmimo_last_error_message(void);

// Creates a model with the reference deployment settings.
//
// # Safety
// `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_model_new_default(struct XlmimoModel **out);

// Creates a model from a flat JSON configuration object (same keys as the CLI
// configuration file). Missing keys keep their defaults.
//
// # Safety
// `json` must be null or a NUL-terminated string; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_model_from_json(const char *json, struct XlmimoModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must be null or a handle from this library that was not freed yet.
void xlmimo_model_free(struct XlmimoModel *model);

// Newton-Raphson optimum of the active-antenna count under the analytic model.
//
// # Safety
// `model` must be null or a live handle; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_model_optimal_ms(const struct XlmimoModel *model,
                                          struct XlmimoOptimum *out);

// Analytic EE (bits/J) at a real-valued active-antenna count.
//
// # Safety
// `model` must be null or a live handle; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_model_ee_analytic(const struct XlmimoModel *model, double ms, double *out);

// Largest active-antenna count for which the analytic approximation holds.
//
// # Safety
// `model` must be null or a live handle; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_model_validity_boundary(const struct XlmimoModel *model,
                                                 double threshold,
                                                 size_t *out);

// Draws user positions from `seed` and builds their path-gain matrix.
//
// # Safety
// `model` must be null or a live handle; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_drop_new(const struct XlmimoModel *model,
                                  uint64_t seed,
                                  struct XlmimoDrop **out);

// Builds a drop from an explicit row-major `antennas x users` path-gain matrix.
//
// # Safety
// `gains` must be null or point to `antennas * users` doubles; the other
// pointers follow [`xlmimo_drop_new`].
enum XlmimoStatus xlmimo_drop_from_gains(const struct XlmimoModel *model,
                                         const double *gains,
                                         size_t antennas,
                                         size_t users,
                                         struct XlmimoDrop **out);

// Releases a drop. Null is ignored.
//
// # Safety
// `handle` must be null or a handle from this library that was not freed yet.
void xlmimo_drop_free(struct XlmimoDrop *handle);

// Number of antennas and users of a drop.
//
// # Safety
// `handle` must be null or a live handle; the outputs must be null or valid for writes.
enum XlmimoStatus xlmimo_drop_shape(const struct XlmimoDrop *handle,
                                    size_t *antennas,
                                    size_t *users);

// Writes the `ms` antennas chosen by HRNP, ascending, into `indices`.
//
// # Safety
// `indices` must be null or valid for `capacity` writes.
enum XlmimoStatus xlmimo_drop_hrnp(const struct XlmimoDrop *handle,
                                   size_t ms,
                                   size_t *indices,
                                   size_t capacity);

// Total EE (bits/J) of the active set given by `mask`, priced with the HRNP
// selection cost. Infeasible sets score 0.
//
// # Safety
// `mask` must be null or point to `len` bytes; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_drop_evaluate(const struct XlmimoDrop *handle,
                                       enum XlmimoPrecoder kind,
                                       const uint8_t *mask,
                                       size_t len,
                                       double *out);

// Runs a selection scheme from the HRNP set of size `ms` and writes the
// chosen mask into `mask_out` (`len` must equal the antenna count).
//
// Randomized schemes are reproducible for a given `seed`.
//
// # Safety
// `mask_out` must be null or valid for `len` writes; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_drop_select(const struct XlmimoDrop *handle,
                                     enum XlmimoPrecoder kind,
                                     enum XlmimoScheme which,
                                     size_t ms,
                                     uint64_t seed,
                                     uint8_t *mask_out,
                                     size_t len,
                                     struct XlmimoSelection *out);

// Runs a full experiment described by a flat JSON configuration and returns
// its result rows as a JSON array in `*out`, to be released with
// [`xlmimo_string_free`].
//
// # Safety
// `json` must be null or a NUL-terminated string; `out` must be null or valid for writes.
enum XlmimoStatus xlmimo_run_experiment(const char *json, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library that was not freed yet.
void xlmimo_string_free(char *s);

// Validates a JSON configuration without building anything.
//
// # Safety
// `json` must be null or a NUL-terminated string.
enum XlmimoStatus xlmimo_config_check(const char *json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XLMIMO_EE_H */
