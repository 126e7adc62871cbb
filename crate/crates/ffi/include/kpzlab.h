#ifndef KPZLAB_H
#define KPZLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KpzStatus {
  KPZ_STATUS_OK = 0,
  KPZ_STATUS_NULL_POINTER = 1,
  KPZ_STATUS_INVALID_ARGUMENT = 2,
  KPZ_STATUS_INVALID_GRID = 3,
  KPZ_STATUS_BOUNDARY_GUARD = 4,
  KPZ_STATUS_NOT_GRID_MULTIPLE = 5,
  KPZ_STATUS_OUT_OF_RANGE = 6,
  KPZ_STATUS_NON_FINITE = 7,
  KPZ_STATUS_NON_POSITIVE = 8,
  KPZ_STATUS_INCOMPATIBLE = 9,
  KPZ_STATUS_OVERFLOW = 10,
  KPZ_STATUS_EXPRESSION = 11,
  KPZ_STATUS_NOT_POSITIVE_DEFINITE = 12,
  KPZ_STATUS_NEGATIVE_EIGENVALUE = 13,
  KPZ_STATUS_INSUFFICIENT = 14,
  KPZ_STATUS_CONFIG = 15,
  KPZ_STATUS_IO = 16,
  KPZ_STATUS_FORMAT = 17,
  KPZ_STATUS_BUFFER_TOO_SMALL = 18,
  KPZ_STATUS_PANIC = 99,
} KpzStatus;

typedef enum KpzMode {
  KPZ_MODE_MULTIPLICATIVE = 0,
  KPZ_MODE_ADDITIVE = 1,
} KpzMode;

/**
 * Space-time grid.
 */
typedef struct KpzGrid KpzGrid;

/**
 * Initial datum.
 */
typedef struct KpzInitial KpzInitial;

/**
 * Uniformly sampled real path.
 */
typedef struct KpzPath KpzPath;

/**
 * Solver output.
 */
typedef struct KpzTrajectory KpzTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *kpz_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *kpz_version(void);

/**
 * Heat kernel `p_t(x)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum KpzStatus kpz_heat_kernel(double t, double x, double *out);

/**
 * Closed-form `Var(V_{t+eps} - V_t)` for the additive equation.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum KpzStatus kpz_linear_increment_variance(double t, double eps, double *out);

/**
 * Builds a grid; `override_guard` disables the `10 sqrt(t_end)` width check.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum KpzStatus kpz_grid_new(double x_min,
                            double x_max,
                            size_t nx,
                            double t_start,
                            double t_end,
                            size_t nt,
                            bool override_guard,
                            struct KpzGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from [`kpz_grid_new`] not yet freed.
 */
void kpz_grid_free(struct KpzGrid *grid);

/**
 * Narrow-wedge datum started at `t0 > 0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum KpzStatus kpz_initial_narrow_wedge(double t0, struct KpzInitial **out);

/**
 * Two-sided Brownian datum drawn from `seed`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum KpzStatus kpz_initial_brownian(uint64_t seed, struct KpzInitial **out);

/**
 * `Z_0 = exp(f)` with `f` given as an expression such as `"-x^2"` or `"-inf"`.
 *
 * # Safety
 * `expr` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum KpzStatus kpz_initial_expr(const char *expr, struct KpzInitial **out);

/**
 * # Safety
 * `ic` must be null or a live initial-datum handle.
 */
void kpz_initial_free(struct KpzInitial *ic);

/**
 * Solves one replica driven by the noise stream `(seed, stream)`, recording the origin
 * every `origin_stride` steps.
 *
 * # Safety
 * `grid` and `ic` must be live handles; `out` must be valid for writes.
 */
enum KpzStatus kpz_solve(const struct KpzGrid *grid,
                         const struct KpzInitial *ic,
                         enum KpzMode mode,
                         uint64_t seed,
                         uint64_t stream,
                         size_t origin_stride,
                         struct KpzTrajectory **out);

/**
 * `Z_t(0)` (or `V_t(0)` in additive mode) as a path.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be valid for writes.
 */
enum KpzStatus kpz_trajectory_origin_path(const struct KpzTrajectory *traj, struct KpzPath **out);

/**
 * `H_t = log Z_t(0)` (multiplicative runs only).
 *
 * # Safety
 * `traj` must be a live handle; `out` must be valid for writes.
 */
enum KpzStatus kpz_trajectory_height_path(const struct KpzTrajectory *traj, struct KpzPath **out);

/**
 * # Safety
 * `traj` must be null or a live handle.
 */
void kpz_trajectory_free(struct KpzTrajectory *traj);

/**
 * Copies `len` values sampled at `t0 + i dt` into a new path.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be valid for writes.
 */
enum KpzStatus kpz_path_new(double t0,
                            double dt,
                            const double *values,
                            size_t len,
                            struct KpzPath **out);

/**
 * # Safety
 * `path` must be a live handle or null (then 0 is returned).
 */
size_t kpz_path_len(const struct KpzPath *path);

/**
 * # Safety
 * `path` must be a live handle or null (then NaN is returned).
 */
double kpz_path_t0(const struct KpzPath *path);

/**
 * # Safety
 * `path` must be a live handle or null (then NaN is returned).
 */
double kpz_path_dt(const struct KpzPath *path);

/**
 * Copies the path values into `buf`; fails with `BufferTooSmall` if `cap < len`.
 *
 * # Safety
 * `path` must be a live handle; `buf` must be valid for `cap` writes.
 */
enum KpzStatus kpz_path_values(const struct KpzPath *path, double *buf, size_t cap);

/**
 * # Safety
 * `path` must be null or a live handle.
 */
void kpz_path_free(struct KpzPath *path);

/**
 * Exact fBm on `[0, n dt]` by circulant embedding (`n` a power of two), optionally
 * multiplied by `(2/pi)^{1/4}`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum KpzStatus kpz_fbm_circulant(double hurst,
                                 size_t n,
                                 double dt,
                                 uint64_t seed,
                                 uint64_t stream,
                                 bool rescale,
                                 struct KpzPath **out);

/**
 * Exact fBm at arbitrary distinct positive times by Cholesky factorization; writes
 * `len` values into `values_out`.
 *
 * # Safety
 * `times` must hold `len` doubles and `values_out` must be valid for `len` writes.
 */
enum KpzStatus kpz_fbm_cholesky(double hurst,
                                const double *times,
                                size_t len,
                                uint64_t seed,
                                uint64_t stream,
                                double *values_out);

/**
 * `sum |X_{s+eps} - X_s|^alpha eps` over grid times `s` in `[a, b - eps]`.
 *
 * # Safety
 * `path` must be a live handle; `out` must be valid for writes.
 */
enum KpzStatus kpz_alpha_variation(const struct KpzPath *path,
                                   double alpha,
                                   double eps,
                                   double a,
                                   double b,
                                   double *out);

/**
 * LIL statistic at depths `1..=max_depth` around `t`; writes `max_depth` values
 * (NaN where a depth is unavailable).
 *
 * # Safety
 * `path` must be a live handle; `out` must be valid for `max_depth` writes.
 */
enum KpzStatus kpz_lil_profile(const struct KpzPath *path,
                               double t,
                               uint32_t max_depth,
                               size_t min_steps,
                               double *out);

/**
 * Modulus-of-continuity statistic at the given levels over `[a, b]`; writes one value per level.
 *
 * # Safety
 * `path` must be a live handle; `levels` must hold `len` entries and `out` be valid for `len` writes.
 */
enum KpzStatus kpz_moc_profile(const struct KpzPath *path,
                               double a,
                               double b,
                               const uint32_t *levels,
                               size_t len,
                               size_t min_steps,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KPZLAB_H */
