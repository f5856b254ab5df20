#ifndef MIXEDVOL_H
#define MIXEDVOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MvStatus {
  MV_STATUS_OK = 0,
  MV_STATUS_NULL_POINTER = 1,
  MV_STATUS_DIMENSION_MISMATCH = 2,
  MV_STATUS_INVALID_PARAMETER = 3,
  MV_STATUS_DEGENERATE_HULL = 4,
  MV_STATUS_LP_FAILURE = 5,
  MV_STATUS_ILL_CONDITIONED = 6,
  MV_STATUS_NO_CONVERGENCE = 7,
  MV_STATUS_PRECONDITION = 8,
  MV_STATUS_JSON = 9,
  MV_STATUS_INVALID_UTF8 = 10,
  MV_STATUS_PANIC = 11,
} MvStatus;

/*
 Inequality selector for `mv_check`.
 */
typedef enum MvCheck {
  MV_CHECK_MINKOWSKI = 0,
  MV_CHECK_BETKE_WEIL = 1,
  MV_CHECK_BETKE_WEIL_SELF = 2,
  MV_CHECK_REVERSE_MINKOWSKI = 3,
  MV_CHECK_LINHART = 4,
} MvCheck;

/*
 Opaque polytope handle.
 */
typedef struct MvPolytope MvPolytope;

typedef struct MvCheckResult {
  double lhs;
  double rhs;
  double deficit;
  double tolerance;
  bool satisfied;
  /*
   True when the inputs match the equality case.
   */
  bool equality_witness;
} MvCheckResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copy the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length without the NUL.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t mv_last_error_message(char *buf, size_t len);

/*
 Build a polytope from `n_points` points of dimension `dim`, stored row-major in `coords`.

 # Safety
 `coords` must hold `dim * n_points` doubles; `out` must be writable.
 */
enum MvStatus mv_polytope_new(size_t dim,
                              const double *coords,
                              size_t n_points,
                              struct MvPolytope **out);

/*
 Build a polytope from its JSON form `{"dim": n, "vertices": [[...], ...]}`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MvStatus mv_polytope_from_json(const char *json, struct MvPolytope **out);

/*
 Release a handle. Null is ignored.

 # Safety
 `p` must come from this library and not be used afterwards.
 */
void mv_polytope_free(struct MvPolytope *p);

/*
 Ambient dimension, or 0 for null.

 # Safety
 `p` must be null or a live handle.
 */
size_t mv_polytope_dim(const struct MvPolytope *p);

/*
 Number of vertices, or 0 for null.

 # Safety
 `p` must be null or a live handle.
 */
size_t mv_polytope_vertex_count(const struct MvPolytope *p);

/*
 Copy vertex `i` into `out` (length `dim`).

 # Safety
 `p` must be a live handle and `out` valid for `dim` doubles.
 */
enum MvStatus mv_polytope_vertex(const struct MvPolytope *p, size_t i, double *out);

/*
 n-dimensional volume.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum MvStatus mv_volume(const struct MvPolytope *p, double *out);

/*
 Surface area (zero below full dimension).

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum MvStatus mv_surface_area(const struct MvPolytope *p, double *out);

/*
 First intrinsic volume.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum MvStatus mv_v1(const struct MvPolytope *p, double *out);

/*
 Radius of the smallest enclosing ball.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum MvStatus mv_circumradius(const struct MvPolytope *p, double *out);

/*
 Largest vertex distance.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum MvStatus mv_diameter(const struct MvPolytope *p, double *out);

/*
 Mixed volume V(K, M, ..., M).

 # Safety
 `k`, `m` must be live handles and `out` writable.
 */
enum MvStatus mv_mixed_volume(const struct MvPolytope *k, const struct MvPolytope *m, double *out);

/*
 Evaluate one inequality. `m` may be null for the single-body checks.

 # Safety
 `k` must be a live handle, `m` null or live, `out` writable.
 */
enum MvStatus mv_check(enum MvCheck which,
                       const struct MvPolytope *k,
                       const struct MvPolytope *m,
                       double tolerance,
                       struct MvCheckResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIXEDVOL_H */
