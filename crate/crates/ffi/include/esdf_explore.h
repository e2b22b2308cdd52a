#ifndef ESDF_EXPLORE_H
#define ESDF_EXPLORE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of a fallible call.
typedef enum EeStatus {
  EE_STATUS_OK = 0,
  EE_STATUS_NULL_POINTER = 1,
  EE_STATUS_INVALID_ARGUMENT = 2,
  EE_STATUS_INVALID_GRID = 3,
  EE_STATUS_INVALID_POSE = 4,
  EE_STATUS_INVALID_START = 5,
  EE_STATUS_DEAD_END = 6,
  EE_STATUS_MALFORMED_SCAN = 7,
  EE_STATUS_CONFIG = 8,
  EE_STATUS_IO = 9,
  EE_STATUS_PARSE = 10,
  EE_STATUS_BUFFER_TOO_SMALL = 11,
  EE_STATUS_PANIC = 12,
} EeStatus;

// Signed distance field.
typedef struct EeEsdf EeEsdf;

// Obstacle mask.
typedef struct EeGrid EeGrid;

// Planned grid path.
typedef struct EePath EePath;

// Planner parameters, field for field the library configuration.
typedef struct EePlannerConfig {
  double threshold;
  double planning_range;
  double sensor_range;
  double fov_deg;
  uint32_t samples;
  uint32_t raw_beams;
  double epsilon;
  double d_safe;
  double lambda_dist;
  double r_robot;
  double replan_period;
  double v_max;
  double lpf_cutoff;
  double window_size;
  double window_height;
  double dead_end_range;
} EePlannerConfig;

typedef struct EePoint {
  double x;
  double y;
} EePoint;

// Planar pose; `yaw` in radians.
typedef struct EePose {
  double x;
  double y;
  double yaw;
} EePose;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next library call on the same thread.
const char *ee_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ee_version(void);

struct EePlannerConfig ee_planner_config_default(void);

// Checks a configuration; see [`ee_last_error_message`] for the reason.
enum EeStatus ee_planner_config_validate(const struct EePlannerConfig *config);

// Builds an obstacle mask from `width * height` bytes, nonzero meaning
// occupied.
enum EeStatus ee_grid_new(size_t width,
                          size_t height,
                          double resolution,
                          double origin_x,
                          double origin_y,
                          const uint8_t *occupied,
                          struct EeGrid **out);

// Thresholds occupancy probabilities (0..=100, or 255 for unknown, which
// counts as free) into an obstacle mask.
enum EeStatus ee_grid_from_occupancy(size_t width,
                                     size_t height,
                                     double resolution,
                                     double origin_x,
                                     double origin_y,
                                     const uint8_t *probabilities,
                                     double threshold,
                                     struct EeGrid **out);

// Releases a grid. Null is ignored.
void ee_grid_free(struct EeGrid *grid);

// Signed distance transform of `grid`: positive in free space, negative
// inside obstacles, meters.
enum EeStatus ee_esdf_compute(const struct EeGrid *grid, struct EeEsdf **out);

// Wraps caller-provided distances, `width * height` values.
enum EeStatus ee_esdf_from_values(size_t width,
                                  size_t height,
                                  double resolution,
                                  double origin_x,
                                  double origin_y,
                                  const double *values,
                                  struct EeEsdf **out);

size_t ee_esdf_width(const struct EeEsdf *esdf);

size_t ee_esdf_height(const struct EeEsdf *esdf);

// Distance at a cell.
enum EeStatus ee_esdf_get(const struct EeEsdf *esdf, size_t row, size_t col, double *out);

// Copies all distances, row-major, into `buffer` of `capacity` values.
enum EeStatus ee_esdf_copy(const struct EeEsdf *esdf, double *buffer, size_t capacity);

void ee_esdf_free(struct EeEsdf *esdf);

// Plans from `start` to `goal` over `esdf`. With `baseline` set the search
// is plain A* with the same robot radius. An unreachable goal still yields
// a path, to the closest reachable cell, flagged by [`ee_path_is_surrogate`].
enum EeStatus ee_plan(const struct EeEsdf *esdf,
                      const struct EePlannerConfig *config,
                      bool baseline,
                      struct EePoint start,
                      struct EePoint goal,
                      struct EePath **out);

// Number of cells on the path, start included.
size_t ee_path_len(const struct EePath *path);

// Accumulated cost `g` of the last cell.
double ee_path_cost(const struct EePath *path);

// Geometric length, meters.
double ee_path_length(const struct EePath *path);

bool ee_path_is_surrogate(const struct EePath *path);

// Copies cell-center waypoints into `points` of `capacity` entries.
enum EeStatus ee_path_waypoints(const struct EePath *path, struct EePoint *points, size_t capacity);

void ee_path_free(struct EePath *path);

// Clamps one measured range to the planning range. Returns NaN for a null
// configuration.
double ee_clamp_range(double sigma, const struct EePlannerConfig *config);

// Picks the planning end-point from a raw scan of `count` ranges
// (`INFINITY` for no return) taken at `pose`, validated against `esdf`.
// Returns `EE_STATUS_DEAD_END` when the scan signals a dead end.
enum EeStatus ee_select_endpoint(const struct EePlannerConfig *config,
                                 struct EePose pose,
                                 const double *ranges,
                                 size_t count,
                                 const struct EeEsdf *esdf,
                                 struct EePoint *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ESDF_EXPLORE_H */
