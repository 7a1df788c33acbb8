#ifndef ENTROPIK_H
#define ENTROPIK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Pattern selector for [`entropik_line_degrees`].
#define ENTROPIK_PATTERN_GENERAL 0

#define ENTROPIK_PATTERN_SYMMETRIC 1

#define ENTROPIK_PATTERN_CYCLIC 2

#define ENTROPIK_PATTERN_CYCLIC_SYMMETRIC 3

// Result codes.
typedef enum EntropikStatus {
  ENTROPIK_STATUS_OK = 0,
  // a required pointer was null
  ENTROPIK_STATUS_NULL_POINTER = 1,
  // arguments violate a documented precondition
  ENTROPIK_STATUS_PRECONDITION = 2,
  // computed values disagree with reference values
  ENTROPIK_STATUS_GOLDEN_MISMATCH = 3,
  // a resource cap was reached
  ENTROPIK_STATUS_RESOURCE_CAP = 4,
  // the computation failed (degenerate data, singular system)
  ENTROPIK_STATUS_COMPUTATION = 5,
  // the sequence admits no stable generating function
  ENTROPIK_STATUS_UNSTABLE = 6,
  // an index was out of range or a value does not fit the output type
  ENTROPIK_STATUS_OUT_OF_RANGE = 7,
  // a panic was caught at the boundary
  ENTROPIK_STATUS_PANIC = 8,
} EntropikStatus;

// Opaque full-step degree sequence.
typedef struct EntropikDegrees EntropikDegrees;

// Opaque rational generating function.
typedef struct EntropikGenfun EntropikGenfun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty after a success. The
// pointer stays valid until the next call into the library on this thread.
const char *entropik_last_error(void);

// Library version as a static NUL-terminated string.
const char *entropik_version(void);

// Complexity of the cyclic symmetric pattern for prime `q ≥ 5`.
//
// # Safety
// `out` must point to a writable `double`.
enum EntropikStatus entropik_cs_prime_complexity(size_t q, double *out);

// Analytic complexity of the cyclic pattern for `q ≥ 4`.
//
// # Safety
// `out` must point to a writable `double`.
enum EntropikStatus entropik_cyclic_complexity(size_t q, double *out);

// Conjectured common complexity of general, symmetric and cyclic matrices.
//
// # Safety
// `out` must point to a writable `double`.
enum EntropikStatus entropik_conjecture_lambda(size_t q, double *out);

// Full-step degrees `d_0..=d_{n_max}` on a generic line.
//
// # Safety
// `out` must point to a writable handle pointer. On success it receives a
// handle to release with [`entropik_degrees_free`].
enum EntropikStatus entropik_line_degrees(uint32_t pattern,
                                          size_t q,
                                          size_t n_max,
                                          size_t trials,
                                          uint64_t seed,
                                          struct EntropikDegrees **out);

// Number of degrees held by the handle (0 for a null handle).
//
// # Safety
// `h` must be null or a live handle from [`entropik_line_degrees`].
size_t entropik_degrees_len(const struct EntropikDegrees *h);

// Copies up to `cap` degrees into `buf`; `written` receives the count.
//
// # Safety
// `h` must be a live handle, `buf` must hold `cap` values and `written`
// must be writable.
enum EntropikStatus entropik_degrees_copy(const struct EntropikDegrees *h,
                                          uint64_t *buf,
                                          size_t cap,
                                          size_t *written);

// Releases a degree handle; null is ignored.
//
// # Safety
// `h` must be null or a handle not yet freed.
void entropik_degrees_free(struct EntropikDegrees *h);

// Fits a rational generating function to `len` full-step degrees.
// Returns `ENTROPIK_STATUS_UNSTABLE` when no fraction stabilizes.
//
// # Safety
// `terms` must point to `len` readable values and `out` must be writable.
// A handle stored in `out` is released with [`entropik_genfun_free`].
enum EntropikStatus entropik_genfun_fit(const uint64_t *terms,
                                        size_t len,
                                        struct EntropikGenfun **out);

// `λ` of a fitted generating function, and the polynomial growth order
// (or `-1` when `λ > 1`).
//
// # Safety
// `h` must be a live handle; `lambda` and `growth_order` must be writable.
enum EntropikStatus entropik_genfun_lambda(const struct EntropikGenfun *h,
                                           double *lambda,
                                           int32_t *growth_order);

// Copies the numerator (`which = 0`) or denominator (`which = 1`),
// lowest degree first. `len` always receives the full length; coefficients
// are written only when `cap` suffices.
//
// # Safety
// `h` must be a live handle, `buf` must hold `cap` values (or be null with
// `cap = 0`) and `len` must be writable.
enum EntropikStatus entropik_genfun_coefficients(const struct EntropikGenfun *h,
                                                 uint32_t which,
                                                 int64_t *buf,
                                                 size_t cap,
                                                 size_t *len);

// Releases a generating-function handle; null is ignored.
//
// # Safety
// `h` must be null or a handle not yet freed.
void entropik_genfun_free(struct EntropikGenfun *h);

// Exact recurrence sequences for cyclic symmetric `q` (prime or 9) as JSON
// with decimal-string integers. Release the string with
// [`entropik_string_free`].
//
// # Safety
// `out` must point to a writable `char *`.
enum EntropikStatus entropik_recurrence_json(size_t q, size_t n_max, char **out);

// Runs the command line with a NUL-terminated argument vector (without the
// program name) and returns its exit code. Output goes to stdout, or to the
// file named by `--output`.
//
// # Safety
// `argv` must point to `argc` valid NUL-terminated strings.
enum EntropikStatus entropik_run(size_t argc, const char *const *argv, int32_t *exit_code);

// Releases a string returned by the library; null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void entropik_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTROPIK_H */
