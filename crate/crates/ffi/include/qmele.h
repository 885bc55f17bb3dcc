#ifndef QMELE_H
#define QMELE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum QmeleStatus {
  QMELE_STATUS_OK = 0,
  QMELE_STATUS_NULL_POINTER = 1,
  QMELE_STATUS_INVALID_ARGUMENT = 2,
  QMELE_STATUS_INSUFFICIENT_DATA = 3,
  QMELE_STATUS_DEGENERATE_SAMPLE = 4,
  QMELE_STATUS_NUMERIC_OVERFLOW = 5,
  QMELE_STATUS_SINGULAR_INFORMATION = 6,
  QMELE_STATUS_NON_CONVERGENCE = 7,
  QMELE_STATUS_BUFFER_TOO_SMALL = 8,
  QMELE_STATUS_PANIC = 9,
} QmeleStatus;

/**
 * Innovation laws, rescaled according to a [`QmeleStandardization`].
 */
typedef enum QmeleInnovation {
  QMELE_INNOVATION_LAPLACE = 0,
  QMELE_INNOVATION_NORMAL = 1,
  QMELE_INNOVATION_STUDENT_T3 = 2,
  QMELE_INNOVATION_NORMAL_MIXTURE = 3,
} QmeleInnovation;

typedef enum QmeleStandardization {
  QMELE_STANDARDIZATION_ABS_MEAN_ONE = 0,
  QMELE_STANDARDIZATION_VAR_ONE = 1,
  QMELE_STANDARDIZATION_RAW = 2,
} QmeleStandardization;

/**
 * Estimator with the smaller asymptotic variance factor.
 */
typedef enum QmelePreferred {
  QMELE_PREFERRED_QMELE = 0,
  QMELE_PREFERRED_QMLE = 1,
  QMELE_PREFERRED_TIE = 2,
} QmelePreferred;

/**
 * Opaque fitted model.
 */
typedef struct QmeleFit QmeleFit;

typedef struct QmeleEfficiency {
  double kappa1;
  double kappa2;
  double eta2;
  double eta4;
  bool eta4_infinite;
  enum QmelePreferred preferred;
} QmeleEfficiency;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. Valid until the next call into this library.
 */
const char *qmele_last_error_message(void);

/**
 * Number of parameters of ARMA(p,q)-GARCH(r,s).
 */
uintptr_t qmele_param_count(uintptr_t p, uintptr_t q, uintptr_t r, uintptr_t s);

/**
 * Fits the self-weighted QMELE, followed by the one-step local QMELE when `local` is true.
 *
 * `g0 > 0` fixes the innovation density at zero; otherwise it is estimated by a kernel.
 *
 * # Safety
 * `values` must point to `n` doubles and `out` to writable storage for one handle.
 */
enum QmeleStatus qmele_fit(const double *values,
                           uintptr_t n,
                           uintptr_t p,
                           uintptr_t q,
                           uintptr_t r,
                           uintptr_t s,
                           bool local,
                           double g0,
                           uint64_t seed,
                           struct QmeleFit **out);

/**
 * Releases a fit handle. Null is ignored.
 *
 * # Safety
 * `fit` must be null or a handle from [`qmele_fit`] not yet freed.
 */
void qmele_fit_free(struct QmeleFit *fit);

/**
 * Number of parameters of a fit, or 0 for a null handle.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
uintptr_t qmele_fit_dim(const struct QmeleFit *fit);

/**
 * Copies the estimate into `out` (capacity `len`).
 *
 * # Safety
 * `fit` must be a live handle and `out` must point to `len` writable doubles.
 */
enum QmeleStatus qmele_fit_estimates(const struct QmeleFit *fit, double *out, uintptr_t len);

/**
 * Copies the standard errors into `out` (capacity `len`).
 *
 * # Safety
 * As for [`qmele_fit_estimates`].
 */
enum QmeleStatus qmele_fit_std_errors(const struct QmeleFit *fit, double *out, uintptr_t len);

/**
 * Copies the covariance matrix, row-major, into `out` (capacity `len` ≥ dim²).
 *
 * # Safety
 * As for [`qmele_fit_estimates`].
 */
enum QmeleStatus qmele_fit_covariance(const struct QmeleFit *fit, double *out, uintptr_t len);

/**
 * Objective value at the estimate, or NaN for a null handle.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
double qmele_fit_objective(const struct QmeleFit *fit);

/**
 * Simulates `n` observations into `out` after discarding `burn_in`.
 *
 * # Safety
 * `theta` must point to `theta_len` doubles and `out` to `n` writable doubles.
 */
enum QmeleStatus qmele_simulate(const double *theta,
                                uintptr_t theta_len,
                                uintptr_t p,
                                uintptr_t q,
                                uintptr_t r,
                                uintptr_t s,
                                enum QmeleInnovation innovation_kind,
                                double mix_eps,
                                double mix_tau,
                                enum QmeleStandardization standardization,
                                uintptr_t n,
                                uintptr_t burn_in,
                                uint64_t seed,
                                double *out);

/**
 * Self-weights of `values` (default weighting) for the given orders, written to `out`.
 *
 * # Safety
 * `values` must point to `n` doubles and `out` to `n` writable doubles.
 */
enum QmeleStatus qmele_weights(const double *values,
                               uintptr_t n,
                               uintptr_t p,
                               uintptr_t q,
                               uintptr_t r,
                               uintptr_t s,
                               double *out);

/**
 * Hill tail-index estimate from the `k` largest positive values.
 *
 * # Safety
 * `values` must point to `n` doubles and `out` to one writable double.
 */
enum QmeleStatus qmele_hill(const double *values, uintptr_t n, uintptr_t k, double *out);

/**
 * Efficiency factors for the law rescaled to E|eta| = 1.
 *
 * # Safety
 * `out` must point to one writable [`QmeleEfficiency`].
 */
enum QmeleStatus qmele_efficiency(enum QmeleInnovation innovation_kind,
                                  double mix_eps,
                                  double mix_tau,
                                  struct QmeleEfficiency *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMELE_H */
