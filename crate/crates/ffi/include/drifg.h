#ifndef DRIFG_H
#define DRIFG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum DrifgStatus {
  DRIFG_STATUS_OK = 0,
  DRIFG_STATUS_NULL_POINTER = 1,
  DRIFG_STATUS_INVALID_PARAMETER = 2,
  DRIFG_STATUS_DIMENSION = 3,
  DRIFG_STATUS_NON_FINITE = 4,
  DRIFG_STATUS_IO = 5,
  DRIFG_STATUS_FORMAT = 6,
  DRIFG_STATUS_TOO_LARGE = 7,
  DRIFG_STATUS_CONFIG = 8,
  DRIFG_STATUS_PANIC = 99,
} DrifgStatus;

// Wavelet family selector for [`DrifgRecoveryOptions`].
typedef enum DrifgWavelet {
  DRIFG_WAVELET_HAAR = 0,
  DRIFG_WAVELET_DB2 = 1,
  DRIFG_WAVELET_DB4 = 2,
} DrifgWavelet;

// Opaque complex image.
typedef struct DrifgImage DrifgImage;

// Solver settings; obtain defaults from [`drifg_recovery_options_default`].
typedef struct DrifgRecoveryOptions {
  double lambda;
  size_t max_iters;
  double step;
  double rel_tol;
  bool normalize_input;
  bool adaptive_restart;
  enum DrifgWavelet wavelet;
  uint32_t wavelet_levels;
} DrifgRecoveryOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an image from `2 * rows * cols` interleaved doubles.
//
// # Safety
// `data` must point to `2 * rows * cols` readable doubles and `out` to a
// writable handle slot.
enum DrifgStatus drifg_image_new(size_t rows,
                                 size_t cols,
                                 const double *data,
                                 struct DrifgImage **out);

// Number of rows, or 0 for a null handle.
//
// # Safety
// `img` must be null or a live handle.
size_t drifg_image_rows(const struct DrifgImage *img);

// Number of columns, or 0 for a null handle.
//
// # Safety
// `img` must be null or a live handle.
size_t drifg_image_cols(const struct DrifgImage *img);

// Copies the samples into `out` as interleaved doubles; `len` must equal
// `2 * rows * cols`.
//
// # Safety
// `img` must be a live handle and `out` must point to `len` writable doubles.
enum DrifgStatus drifg_image_copy_data(const struct DrifgImage *img, double *out, size_t len);

// Releases a handle; null is ignored.
//
// # Safety
// `img` must be null or a handle not yet freed.
void drifg_image_free(struct DrifgImage *img);

// Reads a complex image file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable handle slot.
enum DrifgStatus drifg_image_read(const char *path, struct DrifgImage **out);

// Writes a complex image file.
//
// # Safety
// `img` must be a live handle and `path` a NUL-terminated string.
enum DrifgStatus drifg_image_write(const struct DrifgImage *img, const char *path);

// Band-limits and resamples `z` to `alpha x beta` of its size.
//
// # Safety
// `z` must be a live handle and `out` a writable handle slot.
enum DrifgStatus drifg_decimate(const struct DrifgImage *z,
                                uint32_t alpha_num,
                                uint32_t alpha_den,
                                uint32_t beta_num,
                                uint32_t beta_den,
                                struct DrifgImage **out);

// Unit-modulus modulation `exp(j (phase(z1) + flat))`; `flat` holds
// `rows * cols` row-major values.
//
// # Safety
// `z1` must be a live handle, `flat` must point to `len` readable doubles
// and `out` must be a writable handle slot.
enum DrifgStatus drifg_modulation_from_reference(const struct DrifgImage *z1,
                                                 const double *flat,
                                                 size_t len,
                                                 struct DrifgImage **out);

struct DrifgRecoveryOptions drifg_recovery_options_default(void);

// Recovers the full-resolution interferogram from the low-resolution image
// `z2_low` and the modulation `theta`. `iterations`, when non-null,
// receives the number of iterations run.
//
// # Safety
// `z2_low` and `theta` must be live handles, `options` null or valid,
// `out` a writable handle slot and `iterations` null or writable.
enum DrifgStatus drifg_recover(const struct DrifgImage *z2_low,
                               const struct DrifgImage *theta,
                               uint32_t alpha_num,
                               uint32_t alpha_den,
                               uint32_t beta_num,
                               uint32_t beta_den,
                               const struct DrifgRecoveryOptions *options,
                               struct DrifgImage **out,
                               size_t *iterations);

// RRMSE in dB between two unwrapped phase arrays of `len` values.
//
// # Safety
// `rec` and `reference` must point to `len` readable doubles and `out` to a
// writable double.
enum DrifgStatus drifg_rrmse_db(const double *rec,
                                const double *reference,
                                size_t len,
                                double *out);

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next call into this library on the thread.
const char *drifg_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *drifg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRIFG_H */
