/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#ifndef NITSCHE_LAB_H
#define NITSCHE_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NlStatus {
  NL_STATUS_OK = 0,
  NL_STATUS_NULL_POINTER = 1,
  NL_STATUS_INVALID_INPUT = 2,
  NL_STATUS_DOMAIN = 3,
  /**
   * The radial problem has no monotone solution.
   */
  NL_STATUS_NO_SOLUTION = 4,
  NL_STATUS_NUMERICAL = 5,
  NL_STATUS_IO = 6,
  NL_STATUS_PANIC = 7,
} NlStatus;

typedef struct NlMetric NlMetric;

typedef struct NlProfile NlProfile;

/**
 * Sign of a curvature bound: `-1`, `0` or `1`, with `kappa` ignored for 0.
 */
typedef struct NlBound {
  int sign;
  double kappa;
} NlBound;

/**
 * Both sides of `rho2/rho1 >= Psi*mod^2 + 1`.
 */
typedef struct NlBoundReport {
  double modulus;
  double rho1;
  double rho2;
  double psi_big;
  double lhs;
  double rhs;
  double margin;
  double tolerance;
  /**
   * Number of failed sub-checks (always 0 for arithmetic reports).
   */
  uint32_t failed_subchecks;
  bool pass;
} NlBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *nl_version(void);

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *nl_last_error(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum NlStatus nl_metric_constant(struct NlBound bound, struct NlMetric **out);

/**
 * Build a metric from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum NlStatus nl_metric_from_json(const char *json, struct NlMetric **out);

/**
 * # Safety
 * `m` must come from a `nl_metric_*` constructor or be NULL.
 */
void nl_metric_free(struct NlMetric *m);

/**
 * Geodesic polar coefficient `G(rho)`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NlStatus nl_metric_g(const struct NlMetric *m, double rho, double *out);

/**
 * Distance from the origin of the chart point at radius `s`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NlStatus nl_metric_distance(const struct NlMetric *m, double s, double *out);

/**
 * Gaussian curvature at chart radius `s`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NlStatus nl_metric_curvature(const struct NlMetric *m, double s, double *out);

/**
 * Declared or inferred curvature bound of a metric.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NlStatus nl_metric_bound(const struct NlMetric *m, struct NlBound *out);

/**
 * Laplacian comparison coefficient `psi(rho)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_psi(struct NlBound bound, double rho, double *out);

/**
 * Hessian comparison function `h_c(r)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_h_c(struct NlBound bound, double r, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_modulus_circular(double r1, double r2, double *out);

/**
 * Arithmetic report of both sides of the bound.
 *
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_check_bound(struct NlBound bound,
                             double rho1,
                             double rho2,
                             double modulus,
                             struct NlBoundReport *out);

/**
 * Solve the harmonic map on an `nr x ntheta` log-polar grid and run every
 * diagnostic. `radial` selects the shooting solver instead of Newton-Krylov.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NlStatus nl_verify(const struct NlMetric *m,
                        double r1,
                        double r2,
                        double rho1,
                        double rho2,
                        size_t nr,
                        size_t ntheta,
                        bool radial,
                        struct NlBoundReport *out);

/**
 * Outer radius reached by the radial map with zero initial slope.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NlStatus nl_critical_outer(const struct NlMetric *m, double rho1, double modulus, double *out);

/**
 * Radial boundary-value problem. On `NL_STATUS_NO_SOLUTION` the critical
 * outer radius is written to `critical` when it is not NULL and `out` is
 * left untouched.
 *
 * # Safety
 * `m` must be a live handle, `out` writable and `critical` writable or NULL.
 */
enum NlStatus nl_solve_bvp(const struct NlMetric *m,
                           double rho1,
                           double rho2,
                           double modulus,
                           struct NlProfile **out,
                           double *critical);

/**
 * # Safety
 * `p` must come from [`nl_solve_bvp`] or be NULL.
 */
void nl_profile_free(struct NlProfile *p);

/**
 * Number of nodes in a profile, or 0 for NULL.
 *
 * # Safety
 * `p` must be a live handle or NULL.
 */
size_t nl_profile_len(const struct NlProfile *p);

/**
 * Initial slope `rho'(0)` of a solved profile.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum NlStatus nl_profile_slope0(const struct NlProfile *p, double *out);

/**
 * Copy up to `len` nodes of `(t, rho, rho')` into caller buffers; any
 * buffer may be NULL.
 *
 * # Safety
 * Non-NULL buffers must hold `len` doubles.
 */
enum NlStatus nl_profile_copy(const struct NlProfile *p,
                              double *t,
                              double *rho,
                              double *slope,
                              size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NITSCHE_LAB_H */
