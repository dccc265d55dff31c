#ifndef SPC_H
#define SPC_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpcStatus {
  SPC_STATUS_OK = 0,
  SPC_STATUS_NULL_POINTER = 1,
  SPC_STATUS_CONFIG = 2,
  SPC_STATUS_USAGE = 3,
  SPC_STATUS_NUMERICAL = 4,
  SPC_STATUS_STUDY = 5,
  SPC_STATUS_PANIC = 6,
} SpcStatus;

/**
 * Critical coupling and threshold state handle.
 */
typedef struct SpcCritical SpcCritical;

/**
 * Radial grid handle.
 */
typedef struct SpcGrid SpcGrid;

/**
 * Potential model handle.
 */
typedef struct SpcModel SpcModel;

typedef struct SpcCriticalSummary {
  double lambda_c;
  double c0;
  double identity_residual;
} SpcCriticalSummary;

typedef struct SpcResonancePeak {
  double sigma;
  double k_peak;
  double delta_width;
  double peak_value;
} SpcResonancePeak;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after a success).
 * The pointer stays valid until the next `spc_*` call on the same thread.
 */
const char *spc_last_error_message(void);

/**
 * Square well of radius `radius`; `sign` is +1 or -1, `kappa` is +1 or -1.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum SpcStatus spc_model_well(double radius,
                              double lambda_c,
                              double lambda_slope,
                              int32_t sign,
                              int32_t kappa,
                              struct SpcModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`spc_model_well`] not yet freed.
 */
void spc_model_free(struct SpcModel *model);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum SpcStatus spc_grid_new(double r_max, uintptr_t n, struct SpcGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from [`spc_grid_new`] not yet freed.
 */
void spc_grid_free(struct SpcGrid *grid);

/**
 * Searches the critical coupling in `[search_lo, search_hi]`.
 *
 * # Safety
 * `model` and `grid` must be live handles, `out` a valid handle slot.
 */
enum SpcStatus spc_critical_find(const struct SpcModel *model,
                                 const struct SpcGrid *grid,
                                 double search_lo,
                                 double search_hi,
                                 struct SpcCritical **out);

/**
 * # Safety
 * `critical` must be null or a handle from [`spc_critical_find`] not yet freed.
 */
void spc_critical_free(struct SpcCritical *critical);

/**
 * # Safety
 * `critical` must be a live handle and `out` a valid pointer.
 */
enum SpcStatus spc_critical_summary(const struct SpcCritical *critical,
                                    struct SpcCriticalSummary *out);

/**
 * Energy of the gap eigenstate of the model at `sigma`.
 *
 * # Safety
 * `model` and `grid` must be live handles and `energy` a valid pointer.
 */
enum SpcStatus spc_bound_state_energy(const struct SpcModel *model,
                                      const struct SpcGrid *grid,
                                      double sigma,
                                      double *energy);

/**
 * Scans the outgoing resonance profile at `sigma` on the default momentum
 * window and reports its peak and half width.
 *
 * # Safety
 * `critical` must be a live handle and `out` a valid pointer.
 */
enum SpcStatus spc_scan_resonance(const struct SpcCritical *critical,
                                  double sigma,
                                  struct SpcResonancePeak *out);

/**
 * Self-consistent static decay time for the given profile constants.
 *
 * # Safety
 * `s_d` must be a valid pointer.
 */
enum SpcStatus spc_fixed_point_sd(double c0,
                                  double abs_c2,
                                  double abs_c3,
                                  double epsilon,
                                  double *s_d);

/**
 * Version of this C interface.
 */
uint32_t spc_abi_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPC_H */
