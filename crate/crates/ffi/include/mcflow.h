#ifndef MCFLOW_H
#define MCFLOW_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum McflowLaw {
  MCFLOW_LAW_CSF = 0,
  MCFLOW_LAW_CURVE_DIFFUSION = 1,
  MCFLOW_LAW_WILLMORE = 2,
} McflowLaw;

typedef enum McflowStatus {
  MCFLOW_STATUS_OK = 0,
  MCFLOW_STATUS_NULL_POINTER = 1,
  MCFLOW_STATUS_INVALID_ARGUMENT = 2,
  MCFLOW_STATUS_INVALID_CURVE = 3,
  MCFLOW_STATUS_INVALID_CONFIG = 4,
  MCFLOW_STATUS_UNSTABLE = 5,
  MCFLOW_STATUS_NUMERICAL = 6,
  MCFLOW_STATUS_GRID_MISMATCH = 7,
  MCFLOW_STATUS_IO = 8,
  MCFLOW_STATUS_BUFFER_TOO_SMALL = 9,
  MCFLOW_STATUS_PANIC = 10,
} McflowStatus;

/**
 * Closed polygonal curve.
 */
typedef struct McflowCurve McflowCurve;

/**
 * Scalar field on the periodic unit square.
 */
typedef struct McflowField McflowField;

/**
 * Result of a parametric flow run.
 */
typedef struct McflowTrajectory McflowTrajectory;

/**
 * Parameters of a parametric flow run.
 */
typedef struct McflowFlowConfig {
  enum McflowLaw law;
  double dt;
  double t_end;
  size_t n;
  size_t resample_every;
  double stop_area_fraction;
  size_t snapshot_stride;
} McflowFlowConfig;

/**
 * One diagnostic row of a trajectory.
 */
typedef struct McflowRecord {
  double t;
  double length;
  double area;
  double dissipation;
  double min_curvature;
  double isoperimetric_ratio;
} McflowRecord;

/**
 * Radial minimizing-movement chain summary. `extinction_time` is NaN when
 * the disk survives to the end time.
 */
typedef struct McflowAtwSummary {
  size_t steps;
  double final_radius;
  double sup_error;
  double extinction_time;
} McflowAtwSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *mcflow_last_error_message(void);

void mcflow_clear_error(void);

/**
 * Static, NUL-terminated version string.
 */
const char *mcflow_version(void);

/**
 * Curve through `n_points` vertices given as interleaved `x, y` pairs.
 * The vertices must be counterclockwise and the polygon simple.
 *
 * # Safety
 * `xy` must point to `2 * n_points` readable doubles; `out` must be
 * writable.
 */
enum McflowStatus mcflow_curve_from_points(const double *xy,
                                           size_t n_points,
                                           struct McflowCurve **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_curve_circle(double cx,
                                      double cy,
                                      double r,
                                      size_t n,
                                      struct McflowCurve **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_curve_ellipse(double a, double b, size_t n, struct McflowCurve **out);

/**
 * The built-in capped Archimedean spiral.
 *
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_curve_spiral(size_t n, struct McflowCurve **out);

/**
 * # Safety
 * `curve` must be null or a handle from this library not yet freed.
 */
void mcflow_curve_free(struct McflowCurve *curve);

/**
 * Vertex count, 0 for a null handle.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t mcflow_curve_len(const struct McflowCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_curve_length(const struct McflowCurve *curve, double *out);

/**
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_curve_area(const struct McflowCurve *curve, double *out);

/**
 * Copies the vertices as interleaved `x, y` pairs. `capacity` counts
 * points, not doubles.
 *
 * # Safety
 * `curve` must be a live handle; `xy` must have room for `2 * capacity`
 * doubles.
 */
enum McflowStatus mcflow_curve_points(const struct McflowCurve *curve, double *xy, size_t capacity);

/**
 * Fills `out` with the library defaults for `law`.
 *
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_flow_config_default(enum McflowLaw law, struct McflowFlowConfig *out);

/**
 * Evolves `curve` under `config`.
 *
 * # Safety
 * `curve` and `config` must be valid; `out` must be writable.
 */
enum McflowStatus mcflow_flow_run(const struct McflowCurve *curve,
                                  const struct McflowFlowConfig *config,
                                  struct McflowTrajectory **out);

/**
 * # Safety
 * `traj` must be null or a live handle.
 */
void mcflow_trajectory_free(struct McflowTrajectory *traj);

/**
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_trajectory_final_time(const struct McflowTrajectory *traj, double *out);

/**
 * 1 if the run stopped at the area guard, 0 if it reached the end time.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_trajectory_extinct(const struct McflowTrajectory *traj, int32_t *out);

/**
 * Copy of the last snapshot as a new curve handle.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_trajectory_final_curve(const struct McflowTrajectory *traj,
                                                struct McflowCurve **out);

/**
 * Slope of a linear fit of the enclosed area over the records with
 * `A ≥ floor · A(0)`.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_trajectory_area_slope(const struct McflowTrajectory *traj,
                                               double floor,
                                               double *out);

/**
 * First record time after which the curve stays convex, NaN if never.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_trajectory_convexification_time(const struct McflowTrajectory *traj,
                                                         double *out);

/**
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t mcflow_trajectory_record_count(const struct McflowTrajectory *traj);

/**
 * # Safety
 * `traj` must be a live handle; `records` must have room for `capacity`
 * entries.
 */
enum McflowStatus mcflow_trajectory_records(const struct McflowTrajectory *traj,
                                            struct McflowRecord *records,
                                            size_t capacity);

/**
 * Field from `n * n` row-major values at cell centers; `n` must be a power
 * of two.
 *
 * # Safety
 * `values` must point to `n * n` readable doubles; `out` must be writable.
 */
enum McflowStatus mcflow_field_from_values(size_t n,
                                           const double *values,
                                           struct McflowField **out);

/**
 * `±1` indicator of the disk of radius `r` centered in the cell.
 *
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_field_disk(size_t n, double r, struct McflowField **out);

/**
 * Uniform noise on `[-1, 1]` from `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_field_random_phase(size_t n, uint64_t seed, struct McflowField **out);

/**
 * # Safety
 * `field` must be null or a live handle.
 */
void mcflow_field_free(struct McflowField *field);

/**
 * Grid size per axis, 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t mcflow_field_n(const struct McflowField *field);

/**
 * # Safety
 * `field` must be a live handle; `values` must have room for `capacity`
 * doubles.
 */
enum McflowStatus mcflow_field_values(const struct McflowField *field,
                                      double *values,
                                      size_t capacity);

/**
 * One threshold step: heat flow for time `h`, then the sign.
 *
 * # Safety
 * `field` must be a live handle holding a `±1` indicator; `out` must be
 * writable.
 */
enum McflowStatus mcflow_mbo_step(const struct McflowField *field,
                                  double h,
                                  struct McflowField **out);

/**
 * One Lie-split Allen–Cahn step.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_allen_cahn_step(const struct McflowField *field,
                                         double dt,
                                         double epsilon,
                                         struct McflowField **out);

/**
 * Area enclosed by the `level` contour.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_field_contour_area(const struct McflowField *field,
                                            double level,
                                            double *out);

/**
 * Fraction of cells with `|u| > threshold`.
 *
 * # Safety
 * `field` must be a live handle; `out` must be writable.
 */
enum McflowStatus mcflow_field_fraction_saturated(const struct McflowField *field,
                                                  double threshold,
                                                  double *out);

/**
 * Minimizing radius for one step from `r_prev`.
 *
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_atw_step(double r_prev, double h, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum McflowStatus mcflow_atw_run(double r0, double h, double t_end, struct McflowAtwSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCFLOW_H */
