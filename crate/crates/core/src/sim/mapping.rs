//! Hit/miss occupancy integration with known poses.

use crate::endpoint::{raw_beam_bearing, Pose, ScanFrame};
use crate::grid::{OccupancyGrid, UNKNOWN};

/// Occupancy counting model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HitMiss {
    /// Added to a cell containing a beam end.
    pub hit: u8,
    /// Subtracted from a cell a beam passed through.
    pub miss: u8,
    /// Value an UNKNOWN cell takes on before its first update.
    pub initial: u8,
}

impl Default for HitMiss {
    fn default() -> Self {
        Self {
            hit: 30,
            miss: 10,
            initial: 50,
        }
    }
}

/// Updates `map` with one scan taken at `pose`.
///
/// Every cell crossed by a beam before its end gets a miss; the cell holding
/// the end of a finite beam gets a hit. Beams with no return are traced to
/// `max_range`. Each cell changes at most once per scan and hits win over
/// misses.
pub fn integrate_scan(
    map: &mut OccupancyGrid,
    pose: &Pose,
    scan: &ScanFrame,
    cfg: &crate::config::PlannerConfig,
    model: HitMiss,
) {
    let g = *map.geometry();
    let mut touched: Vec<usize> = Vec::new();
    // 1 = miss, 2 = hit. Sparse so the cost scales with the beams, not the map.
    let mut state = std::collections::HashMap::<usize, u8>::new();

    let max_range = cfg.sensor_range;
    for (i, &range) in scan.ranges.iter().enumerate() {
        let angle = pose.yaw + raw_beam_bearing(i, cfg);
        // Returns are pushed half a cell past the measured range so that noise
        // landing just short of a wall still marks the wall cell.
        let (end, hit) = if range.is_finite() && range <= max_range {
            (range + 0.5 * g.resolution, true)
        } else {
            (max_range, false)
        };
        let ex = pose.x + end * angle.cos();
        let ey = pose.y + end * angle.sin();
        let end_cell = g.world_to_grid(ex, ey);
        traverse(&g, pose.x, pose.y, ex, ey, |row, col| {
            if (row, col) == end_cell {
                return;
            }
            if g.contains(row, col) {
                let idx = row as usize * g.width + col as usize;
                state.entry(idx).or_insert_with(|| {
                    touched.push(idx);
                    1
                });
            }
        });
        if hit && g.contains(end_cell.0, end_cell.1) {
            let idx = end_cell.0 as usize * g.width + end_cell.1 as usize;
            match state.get_mut(&idx) {
                Some(s) => *s = 2,
                None => {
                    state.insert(idx, 2);
                    touched.push(idx);
                }
            }
        }
    }

    touched.sort_unstable();
    for idx in touched {
        let cell = g.cell(idx);
        let old = match map.get(cell) {
            UNKNOWN => model.initial,
            v => v,
        };
        let new = if state[&idx] == 2 {
            old.saturating_add(model.hit).min(crate::grid::MAX_PROBABILITY)
        } else {
            old.saturating_sub(model.miss)
        };
        map.set(cell, new);
    }
}

/// Local ESDF seen by a robot with an empty map after one scan at `pose`:
/// a `window_size` square of `resolution` cells centered on the robot, with
/// unobserved cells free.
pub fn single_scan_esdf(
    pose: &Pose,
    scan: &ScanFrame,
    cfg: &crate::config::PlannerConfig,
    resolution: f64,
) -> crate::error::Result<crate::grid::EsdfGrid> {
    let n = ((cfg.window_size / resolution).round() as usize).max(1);
    let half = (n / 2) as f64 * resolution;
    let origin_x = ((pose.x / resolution).floor() * resolution) - half;
    let origin_y = ((pose.y / resolution).floor() * resolution) - half;
    let g = crate::grid::GridGeometry::new(n, n, resolution, origin_x, origin_y)?;
    let mut map = OccupancyGrid::unknown(g);
    integrate_scan(&mut map, pose, scan, cfg, HitMiss::default());
    let mask = crate::grid::threshold_occupancy(&map, cfg.threshold);
    Ok(crate::grid::signed_distance_transform(&mask))
}

/// Visits the grid cells on the segment from `(x0, y0)` to `(x1, y1)`, in order.
fn traverse(g: &crate::grid::GridGeometry, x0: f64, y0: f64, x1: f64, y1: f64, mut visit: impl FnMut(isize, isize)) {
    let r = g.resolution;
    let (gx0, gy0) = ((x0 - g.origin_x) / r, (y0 - g.origin_y) / r);
    let (gx1, gy1) = ((x1 - g.origin_x) / r, (y1 - g.origin_y) / r);
    let (mut col, mut row) = (gx0.floor() as isize, gy0.floor() as isize);
    let (end_col, end_row) = (gx1.floor() as isize, gy1.floor() as isize);
    let (dx, dy) = (gx1 - gx0, gy1 - gy0);
    let axis = |pos: f64, cell: isize, d: f64| -> (isize, f64, f64) {
        if d > 0.0 {
            (1, ((cell + 1) as f64 - pos) / d, 1.0 / d)
        } else if d < 0.0 {
            (-1, (pos - cell as f64) / -d, -1.0 / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (sc, mut tx, tdx) = axis(gx0, col, dx);
    let (sr, mut ty, tdy) = axis(gy0, row, dy);
    visit(row, col);
    let budget = (end_col - col).unsigned_abs() + (end_row - row).unsigned_abs();
    for _ in 0..budget {
        if tx.min(ty) > 1.0 {
            break;
        }
        if tx < ty {
            col += sc;
            tx += tdx;
        } else {
            row += sr;
            ty += tdy;
        }
        visit(row, col);
    }
}
