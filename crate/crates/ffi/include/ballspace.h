#ifndef BALLSPACE_H
#define BALLSPACE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_CHECK_FAILED = 1,
  BS_STATUS_NULL_POINTER = 2,
  BS_STATUS_INVALID_ARGUMENT = 3,
  BS_STATUS_NON_CONVERGENCE = 4,
  BS_STATUS_BUDGET_EXCEEDED = 5,
  BS_STATUS_PARSE_ERROR = 6,
  BS_STATUS_IO_ERROR = 7,
  BS_STATUS_PANIC = 8,
} BsStatus;

typedef struct BsCertificate BsCertificate;

typedef struct BsSeries BsSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The caller
 * frees it with [`bs_string_free`].
 */
char *bs_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void bs_string_free(char *s);

/**
 * Squared norm of `z^alpha` in `space` (`"ball:<d>"` or `"disk:<n>"`),
 * as a natural log.
 *
 * # Safety
 * `space` must be a C string, `alpha` must point to `len` values and
 * `out_logmag` must be writable.
 */
enum BsStatus bs_norm_sq(const char *space,
                         const uint32_t *alpha,
                         uintptr_t len,
                         double *out_logmag);

/**
 * # Safety
 * `values` must point to `len` doubles and `out` must be writable.
 */
enum BsStatus bs_series_from_values(const double *values, uintptr_t len, struct BsSeries **out);

/**
 * Parses the `k,sign,logmag` CSV form.
 *
 * # Safety
 * `csv` must be a C string and `out` must be writable.
 */
enum BsStatus bs_series_from_csv(const char *csv, struct BsSeries **out);

/**
 * Number of stored coefficients (truncation degree plus one), or 0 for
 * a null handle.
 *
 * # Safety
 * `s` must be null or a live series handle.
 */
uintptr_t bs_series_len(const struct BsSeries *s);

/**
 * Coefficient `k` as a sign in `{-1, 0, 1}` and a natural-log magnitude.
 *
 * # Safety
 * `s` must be a live series handle and both outputs writable.
 */
enum BsStatus bs_series_get(const struct BsSeries *s,
                            uintptr_t k,
                            int8_t *out_sign,
                            double *out_logmag);

/**
 * CSV form of a series, freed with [`bs_string_free`]; null on error.
 *
 * # Safety
 * `s` must be null or a live series handle.
 */
char *bs_series_to_csv(const struct BsSeries *s);

/**
 * # Safety
 * `s` must be null or a handle not freed before.
 */
void bs_series_free(struct BsSeries *s);

/**
 * Taylor coefficients of `F_{c, r e_1}` in `z_1` up to degree `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum BsStatus bs_kernel_coeffs(uint32_t d, double c, double r, uintptr_t n, struct BsSeries **out);

/**
 * `∫ log(1 + c|F|) dσ` with relative tolerance `tol`.
 *
 * # Safety
 * Both outputs must be writable.
 */
enum BsStatus bs_drewnowski(uint32_t d,
                            double c,
                            double r,
                            double tol,
                            double *out_value,
                            double *out_error);

/**
 * The radius maximizing the normalized `i`-th kernel coefficient.
 *
 * # Safety
 * Both outputs must be writable.
 */
enum BsStatus bs_nawrocki(uint32_t d,
                          double c,
                          uint64_t i,
                          double *out_r_star,
                          double *out_log_value);

/**
 * `T_{m̄} g` on a one-variable space.
 *
 * # Safety
 * `space` must be a C string, `m` and `g` live handles, `out` writable.
 */
enum BsStatus bs_toeplitz_apply(const char *space,
                                const struct BsSeries *m,
                                const struct BsSeries *g,
                                struct BsSeries **out);

/**
 * Solves `T_{m̄} g = f` up to degree `n` on a one-variable space.
 *
 * # Safety
 * `space` must be a C string, `m` and `f` live handles, outputs writable.
 */
enum BsStatus bs_toeplitz_solve(const char *space,
                                const struct BsSeries *m,
                                const struct BsSeries *f,
                                uintptr_t n,
                                struct BsSeries **out,
                                double *out_residual);

/**
 * Builds a certificate from a TOML config (null for the defaults).
 *
 * # Safety
 * `config_toml` must be null or a C string; `out` must be writable.
 */
enum BsStatus bs_certificate_build(const char *config_toml, struct BsCertificate **out);

/**
 * # Safety
 * `json` must be a C string and `out` writable.
 */
enum BsStatus bs_certificate_from_json(const char *json, struct BsCertificate **out);

/**
 * JSON form, freed with [`bs_string_free`]; null on error.
 *
 * # Safety
 * `cert` must be null or a live certificate handle.
 */
char *bs_certificate_to_json(const struct BsCertificate *cert);

/**
 * Number of levels, or 0 for a null handle.
 *
 * # Safety
 * `cert` must be null or a live certificate handle.
 */
uintptr_t bs_certificate_levels(const struct BsCertificate *cert);

/**
 * Recomputes every inequality. Returns `CheckFailed` with the failed
 * checks in [`bs_last_error`] when any of them does not hold.
 *
 * # Safety
 * `cert` must be a live certificate handle.
 */
enum BsStatus bs_certificate_verify(const struct BsCertificate *cert);

/**
 * # Safety
 * `cert` must be null or a handle not freed before.
 */
void bs_certificate_free(struct BsCertificate *cert);

/**
 * Library version as a static C string.
 */
const char *bs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BALLSPACE_H */
