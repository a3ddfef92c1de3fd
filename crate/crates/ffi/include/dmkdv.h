#ifndef DMKDV_H
#define DMKDV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Branch convention for the outer saddle constants.
 */
typedef enum DmkdvConvention {
  DMKDV_CONVENTION_NORMALIZED = 0,
  DMKDV_CONVENTION_PRINTED = 1,
} DmkdvConvention;

/**
 * Status codes.
 */
typedef enum DmkdvStatus {
  DMKDV_STATUS_OK = 0,
  DMKDV_STATUS_DOMAIN = 1,
  DMKDV_STATUS_NEAR_BOUNDARY = 2,
  DMKDV_STATUS_LENS_INFEASIBLE = 3,
  DMKDV_STATUS_NON_CONVERGENCE = 4,
  DMKDV_STATUS_QUADRATURE = 5,
  DMKDV_STATUS_SINGULAR_NU = 6,
  DMKDV_STATUS_PRECONDITION = 7,
  DMKDV_STATUS_BOUNDARY_MISMATCH = 8,
  DMKDV_STATUS_INSTABILITY = 9,
  DMKDV_STATUS_STEP_UNDERFLOW = 10,
  DMKDV_STATUS_ILL_CONDITIONED = 11,
  DMKDV_STATUS_IO = 12,
  DMKDV_STATUS_CONFIG = 13,
  DMKDV_STATUS_NULL_POINTER = 100,
  DMKDV_STATUS_INVALID_STRING = 101,
  DMKDV_STATUS_PANIC = 102,
} DmkdvStatus;

/**
 * Opaque left-field evaluator bound to one ray.
 */
typedef struct DmkdvLeftField DmkdvLeftField;

/**
 * Opaque scattering data.
 */
typedef struct DmkdvScattering DmkdvScattering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, static storage.
 */
const char *dmkdv_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *dmkdv_last_error(void);

/**
 * theta(z; xi).
 *
 * # Safety
 * `out_re` and `out_im` must be valid for writes.
 */
enum DmkdvStatus dmkdv_theta(double re, double im, double xi, double *out_re, double *out_im);

/**
 * The four saddle points and their signs eps_j.
 *
 * # Safety
 * Each out array must hold 4 doubles.
 */
enum DmkdvStatus dmkdv_saddles(double xi, double *out_re, double *out_im, double *out_eps);

/**
 * Scattering data for a datum given as "tanh", "tanh+gaussian(a,x0,w)" or a CSV path.
 *
 * # Safety
 * `datum` must be a NUL-terminated string; `out_handle` valid for writes.
 */
enum DmkdvStatus dmkdv_scattering_new(const char *datum,
                                      double half_width,
                                      struct DmkdvScattering **out_handle);

/**
 * Release scattering data. Null is ignored.
 *
 * # Safety
 * `h` must come from `dmkdv_scattering_new` and not be used afterwards.
 */
void dmkdv_scattering_free(struct DmkdvScattering *h);

/**
 * Interpolated reflection coefficient at real z.
 *
 * # Safety
 * `h` must be a live handle; out pointers valid for writes.
 */
enum DmkdvStatus dmkdv_scattering_r(const struct DmkdvScattering *h,
                                    double z,
                                    double *out_re,
                                    double *out_im);

/**
 * Number of discrete eigenvalues (the fixed zero at i excluded).
 *
 * # Safety
 * `h` must be a live handle; `out_n` valid for writes.
 */
enum DmkdvStatus dmkdv_scattering_eigenvalue_count(const struct DmkdvScattering *h, size_t *out_n);

/**
 * Eigenvalue `k` and its norming constant.
 *
 * # Safety
 * `h` must be a live handle; out pointers valid for writes.
 */
enum DmkdvStatus dmkdv_scattering_eigenvalue(const struct DmkdvScattering *h,
                                             size_t k,
                                             double *eta_re,
                                             double *eta_im,
                                             double *c_re,
                                             double *c_im);

/**
 * Leading-order field q(x, t); rays in the transition zones fail with NEAR_BOUNDARY.
 *
 * # Safety
 * `h` must be a live handle; `out_q` valid for writes.
 */
enum DmkdvStatus dmkdv_q_asym(const struct DmkdvScattering *h,
                              double x,
                              double t,
                              enum DmkdvConvention conv,
                              double *out_q);

/**
 * Precompute the left-field amplitude for ray `xi` < -6.
 *
 * # Safety
 * `h` must be a live handle; `out_handle` valid for writes.
 */
enum DmkdvStatus dmkdv_left_field_new(const struct DmkdvScattering *h,
                                      double xi,
                                      struct DmkdvLeftField **out_handle);

/**
 * Release a left-field handle. Null is ignored.
 *
 * # Safety
 * `h` must come from `dmkdv_left_field_new` and not be used afterwards.
 */
void dmkdv_left_field_free(struct DmkdvLeftField *h);

/**
 * Amplitude f at time t: q ~ -1 + Re f / sqrt(t).
 *
 * # Safety
 * `h` must be a live handle; out pointers valid for writes.
 */
enum DmkdvStatus dmkdv_left_field_f(const struct DmkdvLeftField *h,
                                    double t,
                                    enum DmkdvConvention conv,
                                    double *out_re,
                                    double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DMKDV_H */
