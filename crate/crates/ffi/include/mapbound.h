/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef MAPBOUND_H
#define MAPBOUND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Estimator selectors for `mb_estimate_1d` / `mb_estimate_2d`.
#define MB_ESTIMATOR_MMSE 0

#define MB_ESTIMATOR_MAP 1

#define MB_ESTIMATOR_ML 2

// Result code of every fallible call.
typedef enum MbStatus {
  MB_STATUS_OK = 0,
  MB_STATUS_NULL_POINTER = 1,
  MB_STATUS_INVALID_INPUT = 2,
  MB_STATUS_NUMERIC_FAILURE = 3,
  MB_STATUS_IO_ERROR = 4,
  MB_STATUS_PANIC = 5,
} MbStatus;

// Opaque 2-D map.
typedef struct MbRectMap MbRectMap;

// Opaque 1-D support.
typedef struct MbSegments MbSegments;

// Axis-aligned rectangle, closed, in metres.
typedef struct MbRect {
  double x_lo;
  double y_lo;
  double x_hi;
  double y_hi;
} MbRect;

// All three bound families (m²). The `*_y` fields and `wwb_h_opt_y` are NaN
// for 1-D supports.
typedef struct MbBounds {
  double bcrb_x;
  double bcrb_y;
  double ezzb_x;
  double ezzb_y;
  double wwb_x;
  double wwb_y;
  double wwb_h_opt_x;
  double wwb_h_opt_y;
} MbBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mb_version(void);

// Copies the calling thread's last error message into `buf` (truncated and
// always NUL-terminated when `len > 0`). Returns the full message length
// plus one, so a caller can size its buffer; 0 when there is no message.
//
// # Safety
// `buf` must be NULL or point to `len` writable bytes.
size_t mb_last_error_message(char *buf, size_t len);

// Builds a map from `n` rectangles.
//
// # Safety
// `rects` must point to `n` readable `MbRect`; `out` must be writable.
enum MbStatus mb_rect_map_new(const struct MbRect *rects, size_t n, struct MbRectMap **out);

// Loads a 2-D JSON map file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum MbStatus mb_rect_map_load(const char *path, struct MbRectMap **out);

// Releases a map; NULL is ignored.
//
// # Safety
// `map` must be NULL or a handle from this library not yet freed.
void mb_rect_map_free(struct MbRectMap *map);

// # Safety
// `map` must be a live handle; `out` must be writable.
enum MbStatus mb_rect_map_area(const struct MbRectMap *map, double *out);

// # Safety
// `map` must be a live handle; `out` must be writable.
enum MbStatus mb_rect_map_contains(const struct MbRectMap *map, double x, double y, bool *out);

// Builds a 1-D support from `n` `[lo, hi]` pairs stored flat in `bounds`.
//
// # Safety
// `bounds` must point to `2 * n` readable doubles; `out` must be writable.
enum MbStatus mb_segments_new(const double *bounds, size_t n, struct MbSegments **out);

// Releases a 1-D support; NULL is ignored.
//
// # Safety
// `segs` must be NULL or a handle from this library not yet freed.
void mb_segments_free(struct MbSegments *segs);

// Total length of a 1-D support.
//
// # Safety
// `segs` must be a live handle; `out` must be writable.
enum MbStatus mb_segments_total_width(const struct MbSegments *segs, double *out);

// BCRB, EZZB and WWB of a 1-D support under noise `sigma`.
//
// # Safety
// `segs` must be a live handle; `out` must be writable.
enum MbStatus mb_bounds_1d(const struct MbSegments *segs,
                           double sigma,
                           double j_s,
                           struct MbBounds *out);

// BCRB, EZZB and WWB of a 2-D map under per-axis noise.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum MbStatus mb_bounds_2d(const struct MbRectMap *map,
                           double sigma_x,
                           double sigma_y,
                           double j_s,
                           struct MbBounds *out);

// Position estimate from one 1-D Gaussian observation `z`.
//
// # Safety
// `segs` must be a live handle; `out` must be writable.
enum MbStatus mb_estimate_1d(const struct MbSegments *segs,
                             int32_t estimator,
                             double z,
                             double sigma,
                             double *out);

// Position estimate from one 2-D Gaussian observation `(zx, zy)`.
//
// # Safety
// `map` must be a live handle; `out_x`, `out_y` must be writable.
enum MbStatus mb_estimate_2d(const struct MbRectMap *map,
                             int32_t estimator,
                             double zx,
                             double zy,
                             double sigma_x,
                             double sigma_y,
                             double *out_x,
                             double *out_y);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAPBOUND_H */
