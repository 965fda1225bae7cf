#ifndef POLYDIST_H
#define POLYDIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdMode {
  PD_MODE_AUTO = 0,
  PD_MODE_SINGLE_PAIR = 1,
  PD_MODE_CORRECTED = 2,
} PdMode;

/**
 * Status code returned by every fallible function.
 */
typedef enum PdStatus {
  PD_STATUS_OK = 0,
  PD_STATUS_NULL_POINTER = 1,
  PD_STATUS_INVALID_ARGUMENT = 2,
  PD_STATUS_INVALID_POLYNOMIAL = 3,
  /**
   * The numerical pipeline stopped early; the analysis handle is still
   * produced and carries the partial report.
   */
  PD_STATUS_NUMERICAL = 4,
  PD_STATUS_BUFFER_TOO_SMALL = 5,
  PD_STATUS_PANIC = 6,
} PdStatus;

typedef enum PdVerdict {
  /**
   * No verification was reached.
   */
  PD_VERDICT_UNAVAILABLE = 0,
  PD_VERDICT_MULTIPLE_DEFECTIVE = 1,
  PD_VERDICT_MULTIPLE_SEMISIMPLE = 2,
  PD_VERDICT_SIMPLE_EIGENVALUE = 3,
  PD_VERDICT_NOT_AN_EIGENVALUE = 4,
} PdVerdict;

/**
 * Opaque analysis result.
 */
typedef struct PdAnalysis PdAnalysis;

/**
 * Opaque matrix polynomial.
 */
typedef struct PdPolynomial PdPolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes, excluding
 * the terminator.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t pd_last_error_message(char *buf, size_t len);

/**
 * Create a polynomial from `m + 1` row-major `n × n` coefficients.
 *
 * `im` may be NULL for real coefficients.
 *
 * # Safety
 * `re` (and `im` when not NULL) must point to `n * n * (m + 1)` doubles;
 * `out` must be a valid pointer.
 */
enum PdStatus pd_polynomial_new(size_t n,
                                size_t m,
                                const double *re,
                                const double *im,
                                struct PdPolynomial **out);

/**
 * # Safety
 * `poly` must be NULL or a handle from `pd_polynomial_new` not yet freed.
 */
void pd_polynomial_free(struct PdPolynomial *poly);

/**
 * # Safety
 * `poly` must be a live handle.
 */
size_t pd_polynomial_dim(const struct PdPolynomial *poly);

/**
 * # Safety
 * `poly` must be a live handle.
 */
size_t pd_polynomial_degree(const struct PdPolynomial *poly);

/**
 * Evaluate `P(z)` into row-major `n × n` buffers.
 *
 * # Safety
 * `poly` must be a live handle; `re` (and `im` unless NULL) must point to
 * `n * n` writable doubles.
 */
enum PdStatus pd_polynomial_evaluate(const struct PdPolynomial *poly,
                                     double z_re,
                                     double z_im,
                                     double *re,
                                     double *im);

/**
 * Run the full construction.
 *
 * `weights` may be NULL for all-ones weights; otherwise it holds `m + 1`
 * values. On `PdStatus::Ok` or `PdStatus::Numerical` a handle is written to
 * `out` and must be released with `pd_analysis_free`.
 *
 * # Safety
 * `poly` must be a live handle, `weights` NULL or `weights_len` readable
 * doubles, `out` a valid pointer.
 */
enum PdStatus pd_analyze(const struct PdPolynomial *poly,
                         const double *weights,
                         size_t weights_len,
                         double mu_re,
                         double mu_im,
                         enum PdMode mode,
                         struct PdAnalysis **out);

/**
 * # Safety
 * `analysis` must be NULL or a handle from `pd_analyze` not yet freed.
 */
void pd_analysis_free(struct PdAnalysis *analysis);

/**
 * `γ*`, or NaN when the search did not complete.
 *
 * # Safety
 * `analysis` must be a live handle.
 */
double pd_analysis_gamma_star(const struct PdAnalysis *analysis);

/**
 * `s*`, or NaN when the search did not complete.
 *
 * # Safety
 * `analysis` must be a live handle.
 */
double pd_analysis_s_star(const struct PdAnalysis *analysis);

/**
 * Whether `s_{2n-1}` and `s_{2n-2}` coalesced at `γ*`.
 *
 * # Safety
 * `analysis` must be a live handle.
 */
bool pd_analysis_coalesced(const struct PdAnalysis *analysis);

/**
 * Whether the corrected singular pair was used.
 *
 * # Safety
 * `analysis` must be a live handle.
 */
bool pd_analysis_corrected(const struct PdAnalysis *analysis);

/**
 * # Safety
 * `analysis` must be a live handle.
 */
enum PdVerdict pd_analysis_verdict(const struct PdAnalysis *analysis);

/**
 * Copy the coefficients of `Q(λ)` (`n * n * (m + 1)` values, `A_0` first,
 * row-major) into the caller's buffers.
 *
 * # Safety
 * `analysis` must be a live handle; `re` (and `im` unless NULL) must point
 * to `len` writable doubles.
 */
enum PdStatus pd_analysis_q_coefficients(const struct PdAnalysis *analysis,
                                         double *re,
                                         double *im,
                                         size_t len);

/**
 * JSON report of the analysis, as produced by the `analyze` command. Free
 * with `pd_string_free`. NULL on failure.
 *
 * # Safety
 * `analysis` must be a live handle.
 */
char *pd_analysis_report_json(const struct PdAnalysis *analysis);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void pd_string_free(char *s);

/**
 * Sample `s_{2n-1}` and `s_{2n-2}` of `F[P(μ); γ]` at `count` uniformly
 * spaced `γ` in `[gamma_lo, gamma_hi]`.
 *
 * # Safety
 * `poly` must be a live handle; the three output arrays must each hold
 * `count` doubles.
 */
enum PdStatus pd_sample_curve(const struct PdPolynomial *poly,
                              double mu_re,
                              double mu_im,
                              double gamma_lo,
                              double gamma_hi,
                              size_t count,
                              double *gamma_out,
                              double *s_lo_out,
                              double *s_hi_out);

/**
 * Check whether `μ` is a multiple eigenvalue of `q`. `reference` (the
 * unperturbed polynomial) may be NULL. Any of the output pointers may be
 * NULL.
 *
 * # Safety
 * `q` must be a live handle; `reference` NULL or a live handle.
 */
enum PdStatus pd_verify_multiple(const struct PdPolynomial *q,
                                 const struct PdPolynomial *reference,
                                 double mu_re,
                                 double mu_im,
                                 double tol,
                                 enum PdVerdict *verdict,
                                 double *eigen_residual,
                                 double *slope_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYDIST_H */
