#ifndef QCS_H
#define QCS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcsMode {
  QCS_MODE_STANDARD = 0,
  QCS_MODE_SQRT = 1,
  QCS_MODE_Y1 = 2,
} QcsMode;

typedef enum QcsStatus {
  QCS_STATUS_OK = 0,
  QCS_STATUS_NULL_POINTER = 1,
  QCS_STATUS_INVALID_UTF8 = 2,
  QCS_STATUS_PARSE = 3,
  QCS_STATUS_VALIDATION = 4,
  QCS_STATUS_DOMAIN = 5,
  QCS_STATUS_SIGN = 6,
  QCS_STATUS_INPUT = 7,
  QCS_STATUS_PANIC = 8,
} QcsStatus;

/**
 * Laurent polynomial.
 */
typedef struct QcsPoly QcsPoly;

/**
 * Parsed `.qcs` document.
 */
typedef struct QcsSpec QcsSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Owned by the library;
 * valid until the next call that fails on the same thread.
 */
const char *qcs_last_error(void);

/**
 * Parse a `.qcs` document.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum QcsStatus qcs_spec_parse(const char *text, struct QcsSpec **out);

/**
 * # Safety
 * `spec` must come from [`qcs_spec_parse`] and not be freed twice.
 */
void qcs_spec_free(struct QcsSpec *spec);

/**
 * Number of curves declared in the document.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QcsStatus qcs_spec_curve_count(const struct QcsSpec *spec, size_t *out);

/**
 * Laurent expansion of a named curve (boundary units set to 1).
 *
 * # Safety
 * Pointers must be valid; `curve` NUL-terminated.
 */
enum QcsStatus qcs_expand(const struct QcsSpec *spec,
                          const char *curve,
                          enum QcsMode mode,
                          struct QcsPoly **out);

/**
 * Number of (good) perfect matchings of the curve's snake or band graph.
 *
 * # Safety
 * Pointers must be valid; `curve` NUL-terminated.
 */
enum QcsStatus qcs_matching_count(const struct QcsSpec *spec, const char *curve, size_t *out);

/**
 * Whether the matching enumerator, tile formula and M-path agree.
 *
 * # Safety
 * Pointers must be valid; `curve` NUL-terminated.
 */
enum QcsStatus qcs_verify(const struct QcsSpec *spec, const char *curve, bool *out);

/**
 * Parse a polynomial in canonical syntax.
 *
 * # Safety
 * `text` NUL-terminated; `out` writable.
 */
enum QcsStatus qcs_poly_parse(const char *text, struct QcsPoly **out);

/**
 * Product of two polynomials as a new handle.
 *
 * # Safety
 * Handles must be valid; `out` writable.
 */
enum QcsStatus qcs_poly_mul(const struct QcsPoly *a, const struct QcsPoly *b, struct QcsPoly **out);

/**
 * # Safety
 * Handles must be valid; `out` writable.
 */
enum QcsStatus qcs_poly_equal(const struct QcsPoly *a, const struct QcsPoly *b, bool *out);

/**
 * Canonical string of a polynomial; release with [`qcs_string_free`].
 *
 * # Safety
 * Handle must be valid; `out` writable.
 */
enum QcsStatus qcs_poly_to_string(const struct QcsPoly *p, char **out);

/**
 * # Safety
 * `p` must come from this library and not be freed twice.
 */
void qcs_poly_free(struct QcsPoly *p);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void qcs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCS_H */
