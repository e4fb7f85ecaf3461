#ifndef COMBING_H
#define COMBING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Sign class selector for link sets.
 */
typedef enum CombingSignClass {
  COMBING_SIGN_CLASS_POSITIVE = 0,
  COMBING_SIGN_CLASS_NEGATIVE = 1,
} CombingSignClass;

/**
 * Result code of every fallible call.
 */
typedef enum CombingStatus {
  COMBING_STATUS_OK = 0,
  COMBING_STATUS_NULL_POINTER = 1,
  COMBING_STATUS_INVALID_UTF8 = 2,
  COMBING_STATUS_PARSE_ERROR = 3,
  COMBING_STATUS_CONFIG_ERROR = 4,
  COMBING_STATUS_TRANSVERSALITY_FAILURE = 5,
  COMBING_STATUS_RESOLUTION_TOO_COARSE = 6,
  COMBING_STATUS_UNRELIABLE_LINKING = 7,
  COMBING_STATUS_NUMERICAL_FAILURE = 8,
  COMBING_STATUS_OUT_OF_RANGE = 9,
  COMBING_STATUS_BUFFER_TOO_SMALL = 10,
  COMBING_STATUS_PANIC = 11,
} CombingStatus;

/**
 * A compiled vector field.
 */
typedef struct CombingField CombingField;

/**
 * The collinearity links `C₊`, `C₋` of two fields.
 */
typedef struct CombingLinks CombingLinks;

/**
 * Extraction parameters.
 */
typedef struct CombingParams CombingParams;

/**
 * An invariant report with its JSON text.
 */
typedef struct CombingReport CombingReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *combing_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *combing_version(void);

/**
 * Parses a field spec such as `hopf+`, `seifert:3,2`, `R(ms:5)`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CombingStatus combing_field_parse(const char *spec, struct CombingField **out);

/**
 * Releases a field; null is ignored.
 *
 * # Safety
 * `f` must come from [`combing_field_parse`] and not be used afterwards.
 */
void combing_field_free(struct CombingField *f);

/**
 * Unit field vector (ℝ⁴ coordinates) at the normalization of `x`.
 *
 * # Safety
 * `x` and `out` must point to 4 doubles.
 */
enum CombingStatus combing_field_eval(const struct CombingField *f, const double *x, double *out);

/**
 * Default extraction parameters.
 */
struct CombingParams *combing_params_new(void);

/**
 * # Safety
 * `p` must come from [`combing_params_new`] and not be used afterwards.
 */
void combing_params_free(struct CombingParams *p);

/**
 * Sets the grid resolution (vertices per axis and chart, at least 2).
 *
 * # Safety
 * `p` must be a valid params handle.
 */
enum CombingStatus combing_params_set_resolution(struct CombingParams *p, size_t resolution);

/**
 * Sets the Newton residual tolerance (positive).
 *
 * # Safety
 * `p` must be a valid params handle.
 */
enum CombingStatus combing_params_set_eps(struct CombingParams *p, double eps);

/**
 * Homotopy distance `D(x, y)`; `params` may be null for defaults.
 *
 * # Safety
 * Handles must be valid; `out` must be a valid pointer.
 */
enum CombingStatus combing_distance(const struct CombingField *x,
                                    const struct CombingField *y,
                                    const struct CombingParams *params,
                                    struct CombingReport **out);

/**
 * Homotopy number `I(x)`; `params` may be null for defaults.
 *
 * # Safety
 * Handles must be valid; `out` must be a valid pointer.
 */
enum CombingStatus combing_homotopy_number(const struct CombingField *x,
                                           const struct CombingParams *params,
                                           struct CombingReport **out);

/**
 * `D` of a distance report.
 *
 * # Safety
 * `r` must be a valid report handle and `out` a valid pointer.
 */
enum CombingStatus combing_report_distance(const struct CombingReport *r, int64_t *out);

/**
 * Signed `H_X(Y)` of a distance report.
 *
 * # Safety
 * `r` must be a valid report handle and `out` a valid pointer.
 */
enum CombingStatus combing_report_signed_h(const struct CombingReport *r, int64_t *out);

/**
 * `I` of a homotopy-number report.
 *
 * # Safety
 * `r` must be a valid report handle and `out` a valid pointer.
 */
enum CombingStatus combing_report_homotopy_number(const struct CombingReport *r, int64_t *out);

/**
 * JSON text of the report, owned by the report.
 *
 * # Safety
 * `r` must be a valid report handle or null.
 */
const char *combing_report_json(const struct CombingReport *r);

/**
 * # Safety
 * `r` must come from a compute call and not be used afterwards.
 */
void combing_report_free(struct CombingReport *r);

/**
 * Collinearity links of `(x, y)`; `params` may be null for defaults.
 *
 * # Safety
 * Handles must be valid; `out` must be a valid pointer.
 */
enum CombingStatus combing_extract(const struct CombingField *x,
                                   const struct CombingField *y,
                                   const struct CombingParams *params,
                                   struct CombingLinks **out);

/**
 * Number of loops in one sign class (a [`CombingSignClass`] value).
 *
 * # Safety
 * `l` must be a valid links handle and `out` a valid pointer.
 */
enum CombingStatus combing_links_count(const struct CombingLinks *l, uint32_t class_, size_t *out);

/**
 * Copies loop `index` as `4·len` doubles into `buf` (capacity `cap` doubles)
 * and stores its vertex count in `len`. With `buf` null only `len` is set.
 *
 * # Safety
 * `l` must be a valid links handle, `len` a valid pointer, and `buf` null or
 * writable for `cap` doubles.
 */
enum CombingStatus combing_links_loop(const struct CombingLinks *l,
                                      uint32_t class_,
                                      size_t index,
                                      double *buf,
                                      size_t cap,
                                      size_t *len);

/**
 * # Safety
 * `l` must come from [`combing_extract`] and not be used afterwards.
 */
void combing_links_free(struct CombingLinks *l);

/**
 * Linking number of two closed polylines on S³ given as `4·n` doubles each.
 *
 * # Safety
 * `a` and `b` must be readable for `4·na` and `4·nb` doubles; `out` valid.
 */
enum CombingStatus combing_gauss_linking(const double *a,
                                         size_t na,
                                         const double *b,
                                         size_t nb,
                                         int64_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* COMBING_H */
