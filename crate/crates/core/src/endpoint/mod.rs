//! Receding-horizon end-point selection.
//!
//! Each tick a fixed subset of the range scan is turned into candidate
//! destinations at most `planning_range` away. The farthest candidate becomes
//! the end-point, is moved onto a cell that keeps the robot radius clear, and is
//! smoothed over time with a first-order low-pass filter.

mod scenario;

pub use scenario::Scenario;

use std::f64::consts::PI;

use crate::config::PlannerConfig;
use crate::error::{DeadEndKind, Error, Result};
use crate::grid::EsdfGrid;

/// Planar point in world meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Robot state `[x, y, z, yaw]`. `z` is carried but unused.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Heading in `(-π, π]`.
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self {
            x,
            y,
            z,
            yaw: wrap_angle(yaw),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// One revolution of range measurements; `f64::INFINITY` means no return.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanFrame {
    pub ranges: Vec<f64>,
    pub fov_deg: f64,
    pub timestamp: f64,
}

impl ScanFrame {
    pub fn new(ranges: Vec<f64>, fov_deg: f64, timestamp: f64) -> Result<Self> {
        if let Some((i, r)) = ranges
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r > 0.0 || **r == f64::INFINITY))
        {
            return Err(Error::Config(format!("range {i} is {r}, expected > 0 or +inf")));
        }
        Ok(Self {
            ranges,
            fov_deg,
            timestamp,
        })
    }
}

/// Body-frame bearing of raw beam `index` (0-based).
///
/// Beams are laid out so that every sampled beam lands exactly on the sample
/// bearing `k·Ω/N − Ω/2`.
pub fn raw_beam_bearing(index: usize, cfg: &PlannerConfig) -> f64 {
    let step = cfg.fov_rad() / cfg.raw_beams as f64;
    (index + cfg.sample_stride()) as f64 * step - cfg.fov_rad() / 2.0
}

/// Body-frame bearing of sample `k` (1-based).
pub fn sample_bearing(k: usize, cfg: &PlannerConfig) -> f64 {
    let fov = cfg.fov_rad();
    k as f64 * fov / cfg.samples as f64 - fov / 2.0
}

/// An end-point candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    /// Sample index, 1-based.
    pub k: usize,
    /// Index of the raw beam it came from, 1-based.
    pub raw_index: usize,
    /// Clamped range, meters.
    pub range: f64,
    /// Body-frame bearing, radians.
    pub bearing: f64,
}

/// Picks every `raw_beams / samples`-th beam, starting with the first.
pub fn downsample_scan(scan: &ScanFrame, cfg: &PlannerConfig) -> Result<Vec<SamplePoint>> {
    if scan.ranges.len() != cfg.raw_beams || cfg.samples == 0 || !cfg.raw_beams.is_multiple_of(cfg.samples) {
        return Err(Error::MalformedScan {
            expected: cfg.raw_beams,
            actual: scan.ranges.len(),
        });
    }
    let stride = cfg.sample_stride();
    Ok((1..=cfg.samples)
        .map(|k| {
            let raw = (k - 1) * stride;
            let sigma = scan.ranges[raw];
            // Returns past the sensor's saturation range count as no return.
            let sigma = if sigma > cfg.sensor_range { f64::INFINITY } else { sigma };
            SamplePoint {
                k,
                raw_index: raw + 1,
                range: clamp_range(sigma, cfg),
                bearing: sample_bearing(k, cfg),
            }
        })
        .collect())
}

/// Candidate distance for a single beam.
///
/// No return maps to the planning range `l`, returns between `l − 1` and the
/// sensor range map to `l − 1`, anything else passes through.
pub fn clamp_range(sigma: f64, cfg: &PlannerConfig) -> f64 {
    let l = cfg.planning_range;
    if sigma == f64::INFINITY {
        l
    } else if (l - 1.0..=cfg.sensor_range).contains(&sigma) {
        l - 1.0
    } else {
        sigma
    }
}

/// Selected destination for the local planner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndPoint {
    /// Validated position: a cell whose clearance is at least the robot radius.
    pub position: Point,
    /// Sample that produced it, 1-based.
    pub source_k: usize,
    /// Beam tip before validation.
    pub raw: Point,
    /// Low-pass filtered position; equals `position` until filtered.
    pub filtered: Point,
}

/// Index of the winning sample: farthest range, then smallest |bearing|, then smallest k.
pub fn best_sample(samples: &[SamplePoint]) -> Option<&SamplePoint> {
    samples.iter().reduce(|best, s| {
        let better = s.range > best.range
            || (s.range == best.range
                && (s.bearing.abs() < best.bearing.abs()
                    || (s.bearing.abs() == best.bearing.abs() && s.k < best.k)));
        if better {
            s
        } else {
            best
        }
    })
}

/// Longest sample within ±90° of `direction` (body frame), or of all samples
/// when none is.
pub fn forward_range(samples: &[SamplePoint], direction: f64) -> f64 {
    let longest = |ahead_only: bool| {
        samples
            .iter()
            .filter(|s| !ahead_only || wrap_angle(s.bearing - direction).abs() <= std::f64::consts::FRAC_PI_2)
            .map(|s| s.range)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    match longest(true) {
        r if r.is_finite() => r,
        _ => longest(false),
    }
}

/// Chooses the end-point for this tick.
///
/// Fails with [`Error::DeadEnd`] when no window cell is traversable or when the
/// longest forward-facing sample is shorter than `cfg.dead_end_range`.
pub fn select_endpoint(
    pose: &Pose,
    samples: &[SamplePoint],
    esdf: &EsdfGrid,
    cfg: &PlannerConfig,
) -> Result<EndPoint> {
    let best = best_sample(samples).ok_or(Error::MalformedScan {
        expected: cfg.samples,
        actual: 0,
    })?;
    if !esdf.cells().iter().any(|&d| d >= cfg.r_robot) {
        return Err(Error::DeadEnd(DeadEndKind::NoTraversableCell));
    }
    if forward_range(samples, 0.0) < cfg.dead_end_range {
        return Err(Error::DeadEnd(DeadEndKind::ShortRange));
    }

    let heading = pose.yaw + best.bearing;
    let raw = Point::new(
        pose.x + best.range * heading.cos(),
        pose.y + best.range * heading.sin(),
    );
    let position = nearest_clear_point(esdf, raw, cfg.r_robot)
        .ok_or(Error::DeadEnd(DeadEndKind::NoTraversableCell))?;

    Ok(EndPoint {
        position,
        source_k: best.k,
        raw,
        filtered: position,
    })
}

/// `target` itself if its cell has clearance `min_clearance`, otherwise the
/// center of the nearest such cell.
pub fn nearest_clear_point(esdf: &EsdfGrid, target: Point, min_clearance: f64) -> Option<Point> {
    let g = esdf.geometry();
    if let Some(d) = esdf.at_world(target.x, target.y) {
        if d >= min_clearance {
            return Some(target);
        }
    }
    let mut best: Option<(f64, Point)> = None;
    for cell in g.cells() {
        if esdf.get(cell) < min_clearance {
            continue;
        }
        let (x, y) = g.cell_center(cell);
        let d2 = (x - target.x).powi(2) + (y - target.y).powi(2);
        if best.is_none_or(|(bd, _)| d2 < bd) {
            best = Some((d2, Point::new(x, y)));
        }
    }
    best.map(|(_, p)| p)
}

/// Smoothing factor of the discrete first-order low-pass filter.
pub fn lpf_alpha(cfg: &PlannerConfig) -> f64 {
    let wdt = 2.0 * PI * cfg.lpf_cutoff * cfg.replan_period;
    wdt / (1.0 + wdt)
}

/// Low-pass filters the new end-point against the previous filtered output.
/// Without a previous end-point the new one passes through unchanged.
pub fn lpf_endpoint(prev: Option<&EndPoint>, new: EndPoint, cfg: &PlannerConfig) -> EndPoint {
    let Some(prev) = prev else {
        return EndPoint {
            filtered: new.position,
            ..new
        };
    };
    let a = lpf_alpha(cfg);
    EndPoint {
        filtered: Point::new(
            a * new.position.x + (1.0 - a) * prev.filtered.x,
            a * new.position.y + (1.0 - a) * prev.filtered.y,
        ),
        ..new
    }
}
