#ifndef NURBS_INVERT_H
#define NURBS_INVERT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every fallible entry point.
typedef enum NiStatus {
  NI_STATUS_OK = 0,
  NI_STATUS_NULL_POINTER = 1,
  NI_STATUS_INVALID_UTF8 = 2,
  NI_STATUS_PARSE = 3,
  NI_STATUS_VALIDATION = 4,
  NI_STATUS_OUT_OF_DOMAIN = 5,
  NI_STATUS_NON_GENERAL = 6,
  NI_STATUS_NOT_ON_CURVE = 7,
  NI_STATUS_BUFFER_TOO_SMALL = 8,
  NI_STATUS_INTERNAL = 9,
} NiStatus;

// Opaque curve handle.
typedef struct NiCurve NiCurve;

// Opaque piecewise inverse handle.
typedef struct NiInverse NiInverse;

// One preimage of a query point.
typedef struct NiPreimage {
  double u;
  // Knot interval index of the segment that produced `u`.
  size_t segment;
  double residual;
} NiPreimage;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null if none.
// The pointer stays valid until the next failing call on the same thread.
const char *ni_last_error_message(void);

// Parses a JSON curve document.
//
// # Safety
// `json` must be a NUL-terminated string and `out_curve` a valid pointer.
enum NiStatus ni_curve_from_json(const char *json, struct NiCurve **out_curve);

// Releases a curve. Null is ignored.
//
// # Safety
// `curve` must come from [`ni_curve_from_json`] and not be freed twice.
void ni_curve_free(struct NiCurve *curve);

// Parameter domain of the curve.
//
// # Safety
// All pointers must be valid.
enum NiStatus ni_curve_domain(const struct NiCurve *curve, double *lo, double *hi);

// Evaluates the curve at `u`, writing `x`, `y` into `point[0..2]`.
//
// # Safety
// `curve` must be valid and `point` must hold two doubles.
enum NiStatus ni_curve_eval(const struct NiCurve *curve, double u, double *point);

// Builds the piecewise inverse of a curve. The curve handle may be freed afterwards.
//
// # Safety
// `curve` must be valid and `out_inverse` a valid pointer.
enum NiStatus ni_inverse_new(const struct NiCurve *curve, struct NiInverse **out_inverse);

// Releases an inverse. Null is ignored.
//
// # Safety
// `inverse` must come from [`ni_inverse_new`] and not be freed twice.
void ni_inverse_free(struct NiInverse *inverse);

// Number of segments (nonempty knot intervals) in the inverse.
//
// # Safety
// `inverse` must be valid or null (null yields 0).
size_t ni_inverse_segment_count(const struct NiInverse *inverse);

// Inverts a point with the float backend.
//
// Candidates are sorted by residual. `count` receives the total number found;
// at most `capacity` are written to `preimages`. A point farther than `tol`
// from the curve yields `NI_STATUS_NOT_ON_CURVE`.
//
// # Safety
// `inverse` and `count` must be valid; `preimages` must hold `capacity` entries.
enum NiStatus ni_inverse_invert(const struct NiInverse *inverse,
                                double x,
                                double y,
                                double tol,
                                struct NiPreimage *preimages,
                                size_t capacity,
                                size_t *count);

// Inverts a point given as exact decimal or `p/q` text, writing the best
// parameter as text into `buf`.
//
// `needed` (may be null) receives the buffer size required, including the NUL.
//
// # Safety
// String arguments must be NUL-terminated; `buf` must hold `len` bytes.
enum NiStatus ni_inverse_invert_exact(const struct NiInverse *inverse,
                                      const char *x,
                                      const char *y,
                                      const char *tol,
                                      char *buf,
                                      size_t len,
                                      size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NURBS_INVERT_H */
