#ifndef REPEATERLAB_H
#define REPEATERLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_POINTER = 1,
  RL_STATUS_ANGLE_OUT_OF_RANGE = 2,
  RL_STATUS_INVALID_SCHMIDT = 3,
  RL_STATUS_DIMENSION_MISMATCH = 4,
  RL_STATUS_INVALID_MEASUREMENT = 5,
  RL_STATUS_NUMERICAL_FAILURE = 6,
  RL_STATUS_INVALID_ARGUMENT = 7,
  RL_STATUS_INDEX_OUT_OF_RANGE = 8,
  RL_STATUS_PANIC = 9,
} RlStatus;

/**
 * A validated projective measurement on Clare's two qubits.
 */
typedef struct RlMeasurement RlMeasurement;

/**
 * Analytic protocol run with Clare's optimal basis.
 */
typedef struct RlProtocol RlProtocol;

typedef struct RlOutcome {
  double probability;
  /**
   * Alice and Bob are maximally entangled right after this outcome.
   */
  bool maximal;
  bool bob_acts;
  /**
   * Probability that Bob's filter succeeds, given this outcome.
   */
  double bob_success;
} RlOutcome;

typedef struct RlSampleSummary {
  uint64_t successes;
  double estimate;
  double std_error;
  double bob_acts_frequency;
} RlSampleSummary;

typedef struct RlCriterion {
  double lhs;
  double rhs;
  double p_s;
  bool optimal;
} RlCriterion;

typedef struct RlBound {
  double p_max;
  double achieved_p;
  double post_fidelity;
} RlBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `cap`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t rl_last_error_message(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rl_version(void);

/**
 * `min{2 sin²θ, 2 sin²η}` computed by running the protocol.
 *
 * # Safety
 * `out` must be a valid pointer to a double.
 */
enum RlStatus rl_success_probability(double theta, double eta, double *out);

/**
 * Probabilities of the two generically successful projections.
 *
 * # Safety
 * `lower` and `upper` must be valid pointers to doubles.
 */
enum RlStatus rl_projection_bounds(double theta, double eta, double *lower, double *upper);

/**
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to free
 * with [`rl_protocol_free`].
 */
enum RlStatus rl_protocol_new(double theta,
                              double eta,
                              double beta1,
                              double beta2,
                              struct RlProtocol **out);

/**
 * # Safety
 * `handle` must be null or come from [`rl_protocol_new`] and not be used again.
 */
void rl_protocol_free(struct RlProtocol *handle);

/**
 * Overall success probability and the probability that Bob has to act.
 *
 * # Safety
 * `handle` must be live; `p_ms` and `bob_acts` must be valid pointers.
 */
enum RlStatus rl_protocol_summary(const struct RlProtocol *handle, double *p_ms, double *bob_acts);

/**
 * Details of Clare's outcome `index` (0 to 3).
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum RlStatus rl_protocol_outcome(const struct RlProtocol *handle,
                                  size_t index,
                                  struct RlOutcome *out);

/**
 * Monte-Carlo estimate from `n` seeded protocol runs.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RlStatus rl_sample_protocol(double theta,
                                 double eta,
                                 uint64_t n,
                                 uint64_t seed,
                                 struct RlSampleSummary *out);

/**
 * Built-in measurement: `"bell"`, `"optimal"` or `"computational"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RlStatus rl_measurement_builtin(const char *name,
                                     double theta,
                                     double eta,
                                     struct RlMeasurement **out);

/**
 * Measurement from four kets of dimension 4, given as 16 real and 16
 * imaginary parts in row-major order (one ket per row).
 *
 * # Safety
 * `re` and `im` must point to 16 doubles each; `out` must be valid.
 */
enum RlStatus rl_measurement_from_kets(const double *re,
                                       const double *im,
                                       struct RlMeasurement **out);

/**
 * # Safety
 * `handle` must be null or come from an `rl_measurement_*` constructor.
 */
void rl_measurement_free(struct RlMeasurement *handle);

/**
 * Optimality test of the measurement for the pair angles `θ`, `η`.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum RlStatus rl_criterion(const struct RlMeasurement *handle,
                           double theta,
                           double eta,
                           double tol,
                           struct RlCriterion *out);

/**
 * Upper bound on one successful outcome for Schmidt coefficient lists.
 *
 * # Safety
 * `a` and `b` must point to `len_a` and `len_b` doubles; `out` must be valid.
 */
enum RlStatus rl_p_max(const double *a, size_t len_a, const double *b, size_t len_b, double *out);

/**
 * Applies the bound-achieving measurement element and reports the result.
 *
 * # Safety
 * As for [`rl_p_max`].
 */
enum RlStatus rl_achieving_operator(const double *a,
                                    size_t len_a,
                                    const double *b,
                                    size_t len_b,
                                    struct RlBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REPEATERLAB_H */
