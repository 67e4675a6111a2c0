#ifndef BECOM_H
#define BECOM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BecomStatus {
  BECOM_STATUS_OK = 0,
  BECOM_STATUS_NULL_POINTER = 1,
  BECOM_STATUS_INVALID_PARAMETER = 2,
  BECOM_STATUS_DOMAIN = 3,
  BECOM_STATUS_NONCONVERGENCE = 4,
  BECOM_STATUS_RESONANCE_NOT_BRACKETED = 5,
  BECOM_STATUS_UNSTABLE = 6,
  BECOM_STATUS_SINGULAR = 7,
  BECOM_STATUS_NONPHYSICAL = 8,
  BECOM_STATUS_SINGULAR_RESPONSE = 9,
  BECOM_STATUS_DIVERGENCE = 10,
  BECOM_STATUS_OUT_OF_RANGE = 11,
  BECOM_STATUS_PANIC = 12,
} BecomStatus;

/**
 * Parameter selector for [`becom_params_set`] and [`becom_params_get`].
 */
typedef enum BecomParam {
  BECOM_PARAM_N_ATOMS = 0,
  BECOM_PARAM_U0 = 1,
  BECOM_PARAM_KAPPA = 2,
  BECOM_PARAM_GAMMA = 3,
  BECOM_PARAM_ETA = 4,
  BECOM_PARAM_DELTA_C = 5,
  BECOM_PARAM_OMEGA_SW = 6,
  BECOM_PARAM_TEMPERATURE = 7,
  BECOM_PARAM_OMEGA_R_HZ = 8,
  BECOM_PARAM_N_PERIODS = 9,
  BECOM_PARAM_N_PH_THERMAL = 10,
} BecomParam;

/**
 * Opaque parameter set.
 */
typedef struct BecomParams BecomParams;

/**
 * Opaque spectrum result.
 */
typedef struct BecomSpectrum BecomSpectrum;

typedef struct BecomSteadyState {
  double alpha;
  double beta_1;
  double beta_0;
  double delta_d;
  double omega_10_tilde;
  double omega_01_tilde;
  double omega_m;
  double coupling_g;
  double residual;
  uint64_t iterations;
} BecomSteadyState;

typedef struct BecomFluctuations {
  double delta_n_ph;
  double delta_n_b;
  double log_negativity;
  double max_real_part;
  /**
   * Covariance matrix of (X, Y, P, Q), row-major.
   */
  double covariance[16];
} BecomFluctuations;

typedef struct BecomSpectrumPoint {
  double omega;
  double omega_eff;
  double gamma_eff;
  double chi_abs2;
  double s_x;
} BecomSpectrumPoint;

/**
 * Mean-field amplitudes in rectangular form.
 */
typedef struct BecomMeanField {
  double a_re;
  double a_im;
  double c10_re;
  double c10_im;
  double c01_re;
  double c01_im;
  double t;
} BecomMeanField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *becom_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *becom_version(void);

/**
 * New parameter set holding the default experimental values.
 */
struct BecomParams *becom_params_new(void);

/**
 * # Safety
 * `params` must be null or a handle from [`becom_params_new`] not yet freed.
 */
void becom_params_free(struct BecomParams *params);

/**
 * Sets one parameter. Values are not validated until a solver runs or
 * [`becom_params_validate`] is called.
 *
 * # Safety
 * `params` must be null or a live handle.
 */
enum BecomStatus becom_params_set(struct BecomParams *params, enum BecomParam key, double value);

/**
 * # Safety
 * `params` must be null or a live handle; `out` must be null or writable.
 */
enum BecomStatus becom_params_get(const struct BecomParams *params,
                                  enum BecomParam key,
                                  double *out);

/**
 * # Safety
 * `params` must be null or a live handle.
 */
enum BecomStatus becom_params_validate(const struct BecomParams *params);

/**
 * # Safety
 * `params` must be null or a live handle; `out` must be null or writable.
 */
enum BecomStatus becom_steady_state(const struct BecomParams *params, struct BecomSteadyState *out);

/**
 * Cavity detuning at which the effective detuning vanishes.
 *
 * # Safety
 * `params` must be null or a live handle; `out` must be null or writable.
 */
enum BecomStatus becom_resonance_detuning(const struct BecomParams *params, double *out);

/**
 * Steady-state covariance and derived observables.
 *
 * # Safety
 * `params` must be null or a live handle; `out` must be null or writable.
 */
enum BecomStatus becom_fluctuations(const struct BecomParams *params,
                                    struct BecomFluctuations *out);

/**
 * Displacement spectrum on `grid` (ω in units of ω_R, strictly increasing).
 * A null `grid` selects the default grid over [0, 2ω_m].
 *
 * # Safety
 * `params` must be null or a live handle; `grid` must be null or point to
 * `len` readable doubles; `out` must be null or writable.
 */
enum BecomStatus becom_spectrum(const struct BecomParams *params,
                                const double *grid,
                                size_t len,
                                struct BecomSpectrum **out);

/**
 * # Safety
 * `s` must be null or a live spectrum handle.
 */
size_t becom_spectrum_len(const struct BecomSpectrum *s);

/**
 * # Safety
 * `s` must be null or a live spectrum handle; `out` must be null or writable.
 */
enum BecomStatus becom_spectrum_point(const struct BecomSpectrum *s,
                                      size_t index,
                                      struct BecomSpectrumPoint *out);

/**
 * # Safety
 * `s` must be null or a live spectrum handle.
 */
size_t becom_spectrum_peak_count(const struct BecomSpectrum *s);

/**
 * # Safety
 * `s` must be null or a live spectrum handle; `out` must be null or writable.
 */
enum BecomStatus becom_spectrum_peak(const struct BecomSpectrum *s, size_t index, double *out);

/**
 * Whether the spectrum shows normal-mode splitting (two or more peaks).
 *
 * # Safety
 * `s` must be null or a live spectrum handle.
 */
bool becom_spectrum_nms_detected(const struct BecomSpectrum *s);

/**
 * # Safety
 * `s` must be null or a handle from [`becom_spectrum`] not yet freed.
 */
void becom_spectrum_free(struct BecomSpectrum *s);

/**
 * Integrates the mean-field equations for a duration `t_end` (units of
 * 1/ω_R), replacing `state` with the final amplitudes. A `step` of zero or
 * less selects the default step.
 *
 * # Safety
 * `params` must be null or a live handle; `state` must be null or point to
 * a readable and writable struct.
 */
enum BecomStatus becom_dynamics_integrate(const struct BecomParams *params,
                                          struct BecomMeanField *state,
                                          double t_end,
                                          double step);

/**
 * Largest mean-field rate |d/dt| at `state`; a trajectory is considered
 * settled below 1e-8.
 *
 * # Safety
 * `params` must be null or a live handle; `state` must be null or readable;
 * `out` must be null or writable.
 */
enum BecomStatus becom_dynamics_rate(const struct BecomParams *params,
                                     const struct BecomMeanField *state,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BECOM_H */
