#ifndef VOLSCALE_H
#define VOLSCALE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VsStatus {
  VS_STATUS_OK = 0,
  VS_STATUS_NULL_POINTER = 1,
  VS_STATUS_INVALID_ARGUMENT = 2,
  VS_STATUS_SERIES_TOO_SHORT = 3,
  VS_STATUS_DEGENERATE_INPUT = 4,
  VS_STATUS_INSUFFICIENT_DATA = 5,
  VS_STATUS_BUFFER_TOO_SMALL = 6,
  VS_STATUS_INTERNAL = 7,
} VsStatus;

typedef enum VsGrid {
  VS_GRID_LOG = 0,
  VS_GRID_DYADIC = 1,
} VsGrid;

/**
 * Which per-q column of a multifractal result to copy.
 */
typedef enum VsMfField {
  VS_MF_FIELD_Q = 0,
  VS_MF_FIELD_H = 1,
  VS_MF_FIELD_H_STDERR = 2,
  VS_MF_FIELD_TAU = 3,
  VS_MF_FIELD_ALPHA = 4,
  VS_MF_FIELD_F_ALPHA = 5,
} VsMfField;

/**
 * Generalized Hurst exponents and singularity spectrum.
 */
typedef struct VsMfResult VsMfResult;

/**
 * A sequence of samples.
 */
typedef struct VsSeries VsSeries;

/**
 * Analysis parameters. `s_max == 0` means a quarter of the series length.
 */
typedef struct VsMfdfaConfig {
  double q_min;
  double q_max;
  double q_step;
  size_t s_min;
  size_t s_max;
  size_t n_scales;
  enum VsGrid grid;
  size_t detrend_order;
} VsMfdfaConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *vs_last_error_message(void);

/**
 * Copies `len` values into a new series.
 *
 * # Safety
 * `data` must point to `len` readable doubles; `out` must be writable.
 */
enum VsStatus vs_series_new(const double *data, size_t len, struct VsSeries **out);

/**
 * # Safety
 * `series` must be NULL or a handle from this library not yet freed.
 */
void vs_series_free(struct VsSeries *series);

/**
 * Number of samples, 0 for NULL.
 *
 * # Safety
 * `series` must be NULL or a live handle.
 */
size_t vs_series_len(const struct VsSeries *series);

/**
 * Copies samples into `buf`. `written` (optional) receives the series
 * length even when the buffer is too small.
 *
 * # Safety
 * `series` must be a live handle and `buf` must hold `cap` doubles.
 */
enum VsStatus vs_series_copy(const struct VsSeries *series,
                             double *buf,
                             size_t cap,
                             size_t *written);

/**
 * Fractional Gaussian noise with Hurst index `hurst`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VsStatus vs_gen_fgn(double hurst, size_t len, uint64_t seed, struct VsSeries **out);

/**
 * Binomial multiplicative cascade of length `2^levels`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VsStatus vs_gen_cascade(double p,
                             uint32_t levels,
                             bool randomize,
                             uint64_t seed,
                             struct VsSeries **out);

/**
 * Random permutation of `series` into a new handle.
 *
 * # Safety
 * `series` must be a live handle and `out` writable.
 */
enum VsStatus vs_shuffle(const struct VsSeries *series, uint64_t seed, struct VsSeries **out);

struct VsMfdfaConfig vs_mfdfa_config_default(void);

/**
 * Runs MF-DFA. A NULL `config` uses the defaults.
 *
 * # Safety
 * `series` must be a live handle, `config` NULL or readable, `out` writable.
 */
enum VsStatus vs_mfdfa(const struct VsSeries *series,
                       const struct VsMfdfaConfig *config,
                       struct VsMfResult **out);

/**
 * DFA Hurst index and its standard error. Only the scale settings of
 * `config` are used.
 *
 * # Safety
 * `series` must be a live handle, `config` NULL or readable, `hurst`
 * writable, `stderr_out` NULL or writable.
 */
enum VsStatus vs_dfa(const struct VsSeries *series,
                     const struct VsMfdfaConfig *config,
                     double *hurst,
                     double *stderr_out);

/**
 * Least squares fit of `log10 y` against `log10 x`.
 *
 * # Safety
 * `x` and `y` must hold `n` doubles; `slope` writable; `intercept` and
 * `slope_stderr` NULL or writable.
 */
enum VsStatus vs_loglog_fit(const double *x,
                            const double *y,
                            size_t n,
                            double *slope,
                            double *intercept,
                            double *slope_stderr);

/**
 * # Safety
 * `result` must be NULL or a handle from [`vs_mfdfa`] not yet freed.
 */
void vs_mf_result_free(struct VsMfResult *result);

/**
 * Number of q values, 0 for NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
size_t vs_mf_result_len(const struct VsMfResult *result);

/**
 * `h(2)`. Fails with `InvalidArgument` when the q grid lacks 2.
 *
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum VsStatus vs_mf_result_hurst(const struct VsMfResult *result, double *out);

/**
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum VsStatus vs_mf_result_delta_h(const struct VsMfResult *result, double *out);

/**
 * # Safety
 * `result` must be a live handle and `out` writable.
 */
enum VsStatus vs_mf_result_delta_alpha(const struct VsMfResult *result, double *out);

/**
 * Copies one per-q column into `buf`.
 *
 * # Safety
 * `result` must be a live handle, `buf` must hold `cap` doubles, `written`
 * NULL or writable.
 */
enum VsStatus vs_mf_result_copy(const struct VsMfResult *result,
                                enum VsMfField field,
                                double *buf,
                                size_t cap,
                                size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VOLSCALE_H */
