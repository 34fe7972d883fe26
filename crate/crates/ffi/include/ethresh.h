#ifndef ETHRESH_H
#define ETHRESH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call. Values 1 to 4 match the command-line
 exit codes.
 */
typedef enum EtStatus {
  ET_STATUS_OK = 0,
  ET_STATUS_IO = 1,
  ET_STATUS_INVALID_INPUT = 2,
  ET_STATUS_NOT_IN_CATALOG = 3,
  ET_STATUS_RESOURCE_LIMIT = 4,
  ET_STATUS_NULL_POINTER = 5,
  ET_STATUS_PANIC = 6,
} EtStatus;

/*
 Criterion selector for [`et_check_spectrum`] and [`et_check_state`].
 */
typedef enum EtCriterion {
  ET_CRITERION_RED = 0,
  ET_CRITERION_PPT = 1,
  ET_CRITERION_ARED = 2,
  ET_CRITERION_LS = 3,
  ET_CRITERION_GER = 4,
  ET_CRITERION_SEPBALL = 5,
} EtCriterion;

/*
 Outcome of a membership test.
 */
typedef enum EtMembership {
  ET_MEMBERSHIP_IN_CERTIFIED = 0,
  ET_MEMBERSHIP_IN_NUMERICAL = 1,
  ET_MEMBERSHIP_OUT = 2,
} EtMembership;

/*
 Rule that decided a verdict.
 */
typedef enum EtCertificate {
  ET_CERTIFICATE_MIN_EIGENVALUE = 0,
  ET_CERTIFICATE_SCHUR_COMPLEMENT = 1,
  ET_CERTIFICATE_SPECTRAL_INEQUALITY = 2,
  ET_CERTIFICATE_TRIVIAL_FACTOR = 3,
  ET_CERTIFICATE_RANK_BOUND = 4,
  ET_CERTIFICATE_EIGENVALUE_RATIO = 5,
  ET_CERTIFICATE_INNER_SET = 6,
  ET_CERTIFICATE_OUTER_SET = 7,
  ET_CERTIFICATE_SEARCH_WITNESS = 8,
  ET_CERTIFICATE_SEARCH_EXHAUSTED = 9,
} EtCertificate;

/*
 Opaque probability vector sorted in descending order.
 */
typedef struct EtSpectrum EtSpectrum;

/*
 Opaque sweep output.
 */
typedef struct EtSweepResult EtSweepResult;

/*
 A membership verdict. `witness_len` is the length of the witness vector
 (0 when there is none); the entries are copied to the caller's buffer.
 */
typedef struct EtVerdict {
  enum EtMembership membership;
  enum EtCertificate certificate;
  double margin;
  size_t witness_len;
} EtVerdict;

/*
 Numeric columns of one sweep row.
 */
typedef struct EtSweepRow {
  size_t n;
  size_t k;
  size_t s;
  double c;
  size_t trials;
  size_t successes;
  double p_hat;
  double ci_low;
  double ci_high;
  size_t undecided;
  uint64_t master_seed;
} EtSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or NULL if none. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *et_last_error_message(void);

/*
 Limits of the smallest and largest rescaled Wishart eigenvalue at ratio `c`.

 # Safety
 `left` and `right` must be valid for writes.
 */
enum EtStatus et_mp_edges(double c, double *left, double *right);

/*
 Density of the Marchenko-Pastur law (bulk part) at `x`.

 # Safety
 `out` must be valid for writes.
 */
enum EtStatus et_mp_density(double c, double x, double *out);

/*
 Cumulative distribution function of the Marchenko-Pastur law.

 # Safety
 `out` must be valid for writes.
 */
enum EtStatus et_mp_cdf(double c, double x, double *out);

/*
 Quantile of the Marchenko-Pastur law for `q` strictly between the atom
 mass and 1.

 # Safety
 `out` must be valid for writes.
 */
enum EtStatus et_mp_quantile(double c, double q, double *out);

/*
 Builds a spectrum from `len` values summing to one.

 # Safety
 `values` must be valid for `len` reads and `out` for a write.
 */
enum EtStatus et_spectrum_new(const double *values, size_t len, struct EtSpectrum **out);

/*
 Samples the normalized spectrum of a random induced state on
 `C^n (x) C^k` with environment dimension `s`.

 # Safety
 `out` must be valid for a write.
 */
enum EtStatus et_spectrum_sample(size_t n,
                                 size_t k,
                                 size_t s,
                                 uint64_t seed,
                                 struct EtSpectrum **out);

/*
 Number of entries, or 0 for NULL.

 # Safety
 `spectrum` must be NULL or a live handle.
 */
size_t et_spectrum_len(const struct EtSpectrum *spectrum);

/*
 Copies the entries (descending) into `buf`, which must hold the length.

 # Safety
 `spectrum` must be a live handle and `buf` valid for `cap` writes.
 */
enum EtStatus et_spectrum_copy(const struct EtSpectrum *spectrum, double *buf, size_t cap);

/*
 Releases a spectrum. NULL is ignored.

 # Safety
 `spectrum` must be NULL or a handle not yet freed.
 */
void et_spectrum_free(struct EtSpectrum *spectrum);

/*
 Tests a spectrum against a spectral criterion (`ARED`, `LS`, `GER`,
 `SEPBALL`). `p` is used by `LS` only. `ARED` uses the default search
 budget. A witness, when present, is copied to `witness` up to
 `witness_cap` entries; `witness` may be NULL.

 # Safety
 `spectrum` must be a live handle, `out` valid for a write and `witness`
 NULL or valid for `witness_cap` writes.
 */
enum EtStatus et_check_spectrum(const struct EtSpectrum *spectrum,
                                enum EtCriterion criterion,
                                size_t n,
                                size_t k,
                                size_t p,
                                struct EtVerdict *out,
                                double *witness,
                                size_t witness_cap);

/*
 Tests a density matrix against `RED` or `PPT`. `entries` holds
 `2 (nk)^2` doubles: row-major `(re, im)` pairs.

 # Safety
 `entries` must be valid for `2 (nk)^2` reads and `out` for a write.
 */
enum EtStatus et_check_state(const double *entries,
                             size_t n,
                             size_t k,
                             enum EtCriterion criterion,
                             struct EtVerdict *out);

/*
 Hat vector of the probability vector `x` (length `r`) for `n x k`.
 Writes `n k` values to `hat` (descending) and the secular roots to
 `etas`, which must hold `r` values; `etas_len` receives their count.

 # Safety
 `x` valid for `r` reads, `hat` for `n k` writes, `etas` for `r` writes,
 `etas_len` for a write.
 */
enum EtStatus et_hat(const double *x,
                     size_t r,
                     size_t n,
                     size_t k,
                     double *hat,
                     double *etas,
                     size_t *etas_len);

/*
 Catalogued threshold. `criterion` and `regime` use the command-line
 spellings (`ared`, `ls:4`, `second-unbalanced`, ...); `fixed` is the
 fixed dimension or 0 for none. On success `value` holds the critical
 constant, or the critical environment dimension when `is_fixed_dim` is 1.

 # Safety
 Strings must be NUL-terminated; outputs valid for writes.
 */
enum EtStatus et_threshold(const char *criterion,
                           const char *regime,
                           size_t fixed,
                           double *value,
                           int32_t *is_fixed_dim);

/*
 Runs a sweep described by a JSON configuration (same schema as the
 command line's `--config`). The resource cap honours `ET_MAX_ENTRIES`.

 # Safety
 `config_json` must be NUL-terminated; `out` valid for a write.
 */
enum EtStatus et_sweep_run_json(const char *config_json, struct EtSweepResult **out);

/*
 Number of rows, or 0 for NULL.

 # Safety
 `result` must be NULL or a live handle.
 */
size_t et_sweep_row_count(const struct EtSweepResult *result);

/*
 Copies row `index`.

 # Safety
 `result` must be a live handle and `out` valid for a write.
 */
enum EtStatus et_sweep_row(const struct EtSweepResult *result,
                           size_t index,
                           struct EtSweepRow *out);

/*
 The sweep as CSV text. Release the string with [`et_string_free`].

 # Safety
 `result` must be a live handle and `out` valid for a write.
 */
enum EtStatus et_sweep_csv(const struct EtSweepResult *result, char **out);

/*
 Releases a sweep result. NULL is ignored.

 # Safety
 `result` must be NULL or a handle not yet freed.
 */
void et_sweep_free(struct EtSweepResult *result);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must be NULL or a string from this library not yet freed.
 */
void et_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ETHRESH_H */
