//! C ABI over the grid, end-point and planner modules.
//!
//! Objects cross the boundary as opaque handles created by `ee_*_new` or
//! `ee_*_compute` style functions and released with the matching `ee_*_free`.
//! Fallible calls return an [`EeStatus`]; on failure
//! [`ee_last_error_message`] describes the most recent error on the calling
//! thread. Grids are row-major with row 0 at the lowest y.

#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use esdf_explore::endpoint::{self, Pose, ScanFrame};
use esdf_explore::grid::{self, BooleanGrid, EsdfGrid, GridGeometry, OccupancyGrid};
use esdf_explore::planner::{self, CostModel, GridPath};
use esdf_explore::{Error, PlannerConfig};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    InvalidPose = 4,
    InvalidStart = 5,
    DeadEnd = 6,
    MalformedScan = 7,
    Config = 8,
    Io = 9,
    Parse = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

impl From<&Error> for EeStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config(_) => EeStatus::Config,
            Error::InvalidGrid(_) => EeStatus::InvalidGrid,
            Error::InvalidPose { .. } => EeStatus::InvalidPose,
            Error::MalformedScan { .. } => EeStatus::MalformedScan,
            Error::InvalidStart { .. } => EeStatus::InvalidStart,
            Error::DeadEnd(_) => EeStatus::DeadEnd,
            Error::Parse { .. } => EeStatus::Parse,
            Error::Io { .. } => EeStatus::Io,
        }
    }
}

/// Planner parameters, field for field the library configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EePlannerConfig {
    pub threshold: f64,
    pub planning_range: f64,
    pub sensor_range: f64,
    pub fov_deg: f64,
    pub samples: u32,
    pub raw_beams: u32,
    pub epsilon: f64,
    pub d_safe: f64,
    pub lambda_dist: f64,
    pub r_robot: f64,
    pub replan_period: f64,
    pub v_max: f64,
    pub lpf_cutoff: f64,
    pub window_size: f64,
    pub window_height: f64,
    pub dead_end_range: f64,
}

impl From<&PlannerConfig> for EePlannerConfig {
    fn from(c: &PlannerConfig) -> Self {
        Self {
            threshold: c.threshold,
            planning_range: c.planning_range,
            sensor_range: c.sensor_range,
            fov_deg: c.fov_deg,
            samples: c.samples as u32,
            raw_beams: c.raw_beams as u32,
            epsilon: c.epsilon,
            d_safe: c.d_safe,
            lambda_dist: c.lambda_dist,
            r_robot: c.r_robot,
            replan_period: c.replan_period,
            v_max: c.v_max,
            lpf_cutoff: c.lpf_cutoff,
            window_size: c.window_size,
            window_height: c.window_height,
            dead_end_range: c.dead_end_range,
        }
    }
}

impl From<&EePlannerConfig> for PlannerConfig {
    fn from(c: &EePlannerConfig) -> Self {
        Self {
            threshold: c.threshold,
            planning_range: c.planning_range,
            sensor_range: c.sensor_range,
            fov_deg: c.fov_deg,
            samples: c.samples as usize,
            raw_beams: c.raw_beams as usize,
            epsilon: c.epsilon,
            d_safe: c.d_safe,
            lambda_dist: c.lambda_dist,
            r_robot: c.r_robot,
            replan_period: c.replan_period,
            v_max: c.v_max,
            lpf_cutoff: c.lpf_cutoff,
            window_size: c.window_size,
            window_height: c.window_height,
            dead_end_range: c.dead_end_range,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EePoint {
    pub x: f64,
    pub y: f64,
}

/// Planar pose; `yaw` in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EePose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

/// Obstacle mask.
pub struct EeGrid(BooleanGrid);

/// Signed distance field.
pub struct EeEsdf(EsdfGrid);

/// Planned grid path.
pub struct EePath(GridPath);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: EeStatus, msg: &str) -> EeStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), EeStatus>) -> EeStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EeStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(EeStatus::Panic, "internal panic"),
    }
}

fn lib_error(e: Error) -> EeStatus {
    fail(EeStatus::from(&e), &e.to_string())
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, EeStatus> {
    // SAFETY: callers pass either null or a pointer obtained from this library
    // (or a valid caller-owned value) that outlives the call.
    unsafe { p.as_ref() }.ok_or_else(|| fail(EeStatus::NullPointer, &format!("{what} is null")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, EeStatus> {
    // SAFETY: as for `non_null`, and the caller grants exclusive access.
    unsafe { p.as_mut() }.ok_or_else(|| fail(EeStatus::NullPointer, &format!("{what} is null")))
}

fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], EeStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(EeStatus::NullPointer, &format!("{what} is null")));
    }
    // SAFETY: the caller promises `len` readable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], EeStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(EeStatus::NullPointer, &format!("{what} is null")));
    }
    // SAFETY: the caller promises `len` writable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn geometry(width: usize, height: usize, resolution: f64, origin_x: f64, origin_y: f64) -> Result<GridGeometry, EeStatus> {
    GridGeometry::new(width, height, resolution, origin_x, origin_y).map_err(lib_error)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ee_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ee_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn ee_planner_config_default() -> EePlannerConfig {
    EePlannerConfig::from(&PlannerConfig::default())
}

/// Checks a configuration; see [`ee_last_error_message`] for the reason.
#[no_mangle]
pub extern "C" fn ee_planner_config_validate(config: *const EePlannerConfig) -> EeStatus {
    guard(|| {
        let cfg = PlannerConfig::from(non_null(config, "config")?);
        cfg.validate().map_err(lib_error)
    })
}

/// Builds an obstacle mask from `width * height` bytes, nonzero meaning
/// occupied.
#[no_mangle]
pub extern "C" fn ee_grid_new(
    width: usize,
    height: usize,
    resolution: f64,
    origin_x: f64,
    origin_y: f64,
    occupied: *const u8,
    out: *mut *mut EeGrid,
) -> EeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let g = geometry(width, height, resolution, origin_x, origin_y)?;
        let cells = slice(occupied, g.len(), "occupied")?.iter().map(|&v| v != 0).collect();
        let grid = BooleanGrid::from_cells(g, cells).map_err(lib_error)?;
        *out = Box::into_raw(Box::new(EeGrid(grid)));
        Ok(())
    })
}

/// Thresholds occupancy probabilities (0..=100, or 255 for unknown, which
/// counts as free) into an obstacle mask.
#[no_mangle]
pub extern "C" fn ee_grid_from_occupancy(
    width: usize,
    height: usize,
    resolution: f64,
    origin_x: f64,
    origin_y: f64,
    probabilities: *const u8,
    threshold: f64,
    out: *mut *mut EeGrid,
) -> EeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let g = geometry(width, height, resolution, origin_x, origin_y)?;
        let cells = slice(probabilities, g.len(), "probabilities")?.to_vec();
        let occ = OccupancyGrid::from_cells(g, cells).map_err(lib_error)?;
        *out = Box::into_raw(Box::new(EeGrid(grid::threshold_occupancy(&occ, threshold))));
        Ok(())
    })
}

/// Releases a grid. Null is ignored.
#[no_mangle]
pub extern "C" fn ee_grid_free(grid: *mut EeGrid) {
    if !grid.is_null() {
        // SAFETY: non-null grids come from `Box::into_raw` in this library and
        // are freed once.
        drop(unsafe { Box::from_raw(grid) });
    }
}

/// Signed distance transform of `grid`: positive in free space, negative
/// inside obstacles, meters.
#[no_mangle]
pub extern "C" fn ee_esdf_compute(grid: *const EeGrid, out: *mut *mut EeEsdf) -> EeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let grid = non_null(grid, "grid")?;
        *out = Box::into_raw(Box::new(EeEsdf(grid::signed_distance_transform(&grid.0))));
        Ok(())
    })
}

/// Wraps caller-provided distances, `width * height` values.
#[no_mangle]
pub extern "C" fn ee_esdf_from_values(
    width: usize,
    height: usize,
    resolution: f64,
    origin_x: f64,
    origin_y: f64,
    values: *const f64,
    out: *mut *mut EeEsdf,
) -> EeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let g = geometry(width, height, resolution, origin_x, origin_y)?;
        let cells = slice(values, g.len(), "values")?.to_vec();
        *out = Box::into_raw(Box::new(EeEsdf(EsdfGrid::from_cells(g, cells).map_err(lib_error)?)));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ee_esdf_width(esdf: *const EeEsdf) -> usize {
    non_null(esdf, "esdf").map_or(0, |e| e.0.geometry().width)
}

#[no_mangle]
pub extern "C" fn ee_esdf_height(esdf: *const EeEsdf) -> usize {
    non_null(esdf, "esdf").map_or(0, |e| e.0.geometry().height)
}

/// Distance at a cell.
#[no_mangle]
pub extern "C" fn ee_esdf_get(esdf: *const EeEsdf, row: usize, col: usize, out: *mut f64) -> EeStatus {
    guard(|| {
        let esdf = &non_null(esdf, "esdf")?.0;
        let out = out_ptr(out, "out")?;
        let g = esdf.geometry();
        if row >= g.height || col >= g.width {
            return Err(fail(
                EeStatus::InvalidArgument,
                &format!("cell ({row}, {col}) outside {}x{}", g.width, g.height),
            ));
        }
        *out = esdf.get(grid::Cell::new(row, col));
        Ok(())
    })
}

/// Copies all distances, row-major, into `buffer` of `capacity` values.
#[no_mangle]
pub extern "C" fn ee_esdf_copy(esdf: *const EeEsdf, buffer: *mut f64, capacity: usize) -> EeStatus {
    guard(|| {
        let cells = non_null(esdf, "esdf")?.0.cells();
        if capacity < cells.len() {
            return Err(fail(
                EeStatus::BufferTooSmall,
                &format!("need {} values, got {capacity}", cells.len()),
            ));
        }
        slice_mut(buffer, cells.len(), "buffer")?.copy_from_slice(cells);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ee_esdf_free(esdf: *mut EeEsdf) {
    if !esdf.is_null() {
        // SAFETY: see `ee_grid_free`.
        drop(unsafe { Box::from_raw(esdf) });
    }
}

/// Plans from `start` to `goal` over `esdf`. With `baseline` set the search
/// is plain A* with the same robot radius. An unreachable goal still yields
/// a path, to the closest reachable cell, flagged by [`ee_path_is_surrogate`].
#[no_mangle]
pub extern "C" fn ee_plan(
    esdf: *const EeEsdf,
    config: *const EePlannerConfig,
    baseline: bool,
    start: EePoint,
    goal: EePoint,
    out: *mut *mut EePath,
) -> EeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let esdf = &non_null(esdf, "esdf")?.0;
        let cfg = PlannerConfig::from(non_null(config, "config")?);
        cfg.validate().map_err(lib_error)?;
        let model = if baseline {
            CostModel::plain(cfg.r_robot)
        } else {
            CostModel::from_config(&cfg)
        };
        let path = planner::plan(
            endpoint::Point::new(start.x, start.y),
            endpoint::Point::new(goal.x, goal.y),
            esdf,
            &model,
        )
        .map_err(lib_error)?;
        *out = Box::into_raw(Box::new(EePath(path)));
        Ok(())
    })
}

/// Number of cells on the path, start included.
#[no_mangle]
pub extern "C" fn ee_path_len(path: *const EePath) -> usize {
    non_null(path, "path").map_or(0, |p| p.0.nodes.len())
}

/// Accumulated cost `g` of the last cell.
#[no_mangle]
pub extern "C" fn ee_path_cost(path: *const EePath) -> f64 {
    non_null(path, "path").map_or(f64::NAN, |p| p.0.total_cost)
}

/// Geometric length, meters.
#[no_mangle]
pub extern "C" fn ee_path_length(path: *const EePath) -> f64 {
    non_null(path, "path").map_or(f64::NAN, |p| p.0.length())
}

#[no_mangle]
pub extern "C" fn ee_path_is_surrogate(path: *const EePath) -> bool {
    non_null(path, "path").is_ok_and(|p| p.0.surrogate)
}

/// Copies cell-center waypoints into `points` of `capacity` entries.
#[no_mangle]
pub extern "C" fn ee_path_waypoints(path: *const EePath, points: *mut EePoint, capacity: usize) -> EeStatus {
    guard(|| {
        let waypoints = non_null(path, "path")?.0.waypoints();
        if capacity < waypoints.len() {
            return Err(fail(
                EeStatus::BufferTooSmall,
                &format!("need {} points, got {capacity}", waypoints.len()),
            ));
        }
        let dst = slice_mut(points, waypoints.len(), "points")?;
        for (d, w) in dst.iter_mut().zip(&waypoints) {
            *d = EePoint { x: w.x, y: w.y };
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ee_path_free(path: *mut EePath) {
    if !path.is_null() {
        // SAFETY: see `ee_grid_free`.
        drop(unsafe { Box::from_raw(path) });
    }
}

/// Clamps one measured range to the planning range. Returns NaN for a null
/// configuration.
#[no_mangle]
pub extern "C" fn ee_clamp_range(sigma: f64, config: *const EePlannerConfig) -> f64 {
    non_null(config, "config").map_or(f64::NAN, |c| endpoint::clamp_range(sigma, &PlannerConfig::from(c)))
}

/// Picks the planning end-point from a raw scan of `count` ranges
/// (`INFINITY` for no return) taken at `pose`, validated against `esdf`.
/// Returns `EE_STATUS_DEAD_END` when the scan signals a dead end.
#[no_mangle]
pub extern "C" fn ee_select_endpoint(
    config: *const EePlannerConfig,
    pose: EePose,
    ranges: *const f64,
    count: usize,
    esdf: *const EeEsdf,
    out: *mut EePoint,
) -> EeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let cfg = PlannerConfig::from(non_null(config, "config")?);
        cfg.validate().map_err(lib_error)?;
        let esdf = &non_null(esdf, "esdf")?.0;
        let ranges = slice(ranges, count, "ranges")?.to_vec();
        let scan = ScanFrame::new(ranges, cfg.fov_deg, 0.0).map_err(lib_error)?;
        let samples = endpoint::downsample_scan(&scan, &cfg).map_err(lib_error)?;
        let pose = Pose::new(pose.x, pose.y, 0.0, pose.yaw);
        let ep = endpoint::select_endpoint(&pose, &samples, esdf, &cfg).map_err(lib_error)?;
        *out = EePoint {
            x: ep.position.x,
            y: ep.position.y,
        };
        Ok(())
    })
}
