//! Planar range sensor over the ground-truth grid.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::World;
use crate::config::PlannerConfig;
use crate::endpoint::{raw_beam_bearing, Pose, ScanFrame};
use crate::error::{Error, Result};
use crate::grid::{BooleanGrid, Cell};

/// Distance from `(x, y)` along `angle` to the boundary of the first occupied
/// cell, or `None` if nothing is hit within `max_range`.
///
/// Grid traversal after Amanatides and Woo: the ray visits every cell it
/// crosses in order, so thin walls and diagonal gaps are handled exactly.
pub fn cast_ray(grid: &BooleanGrid, x: f64, y: f64, angle: f64, max_range: f64) -> Option<f64> {
    let g = grid.geometry();
    let r = g.resolution;
    let (dx, dy) = (angle.cos(), angle.sin());
    // Grid-space coordinates, one unit per cell.
    let gx = (x - g.origin_x) / r;
    let gy = (y - g.origin_y) / r;
    let mut col = gx.floor() as isize;
    let mut row = gy.floor() as isize;
    if !g.contains(row, col) {
        return Some(0.0);
    }
    if grid.is_occupied(Cell::new(row as usize, col as usize)) {
        return Some(0.0);
    }

    let axis = |pos: f64, cell: isize, d: f64| -> (isize, f64, f64) {
        if d > 0.0 {
            (1, ((cell + 1) as f64 - pos) / d, 1.0 / d)
        } else if d < 0.0 {
            (-1, (pos - cell as f64) / -d, -1.0 / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_c, mut t_max_x, t_dx) = axis(gx, col, dx);
    let (step_r, mut t_max_y, t_dy) = axis(gy, row, dy);
    let limit = max_range / r;

    loop {
        let t = if t_max_x < t_max_y {
            col += step_c;
            let t = t_max_x;
            t_max_x += t_dx;
            t
        } else {
            row += step_r;
            let t = t_max_y;
            t_max_y += t_dy;
            t
        };
        if t > limit {
            return None;
        }
        // A closed world never lets a ray leave the grid, but open ones may.
        if !g.contains(row, col) {
            return Some(t * r);
        }
        if grid.is_occupied(Cell::new(row as usize, col as usize)) {
            return Some(t * r);
        }
    }
}

/// Sensor noise settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorNoise {
    /// Standard deviation of additive range noise, meters. Zero disables it.
    pub range_sigma: f64,
}

impl Default for SensorNoise {
    fn default() -> Self {
        Self { range_sigma: 0.01 }
    }
}

/// Simulates one scan of `cfg.raw_beams` beams over the field of view centered
/// on the robot heading. Returns beyond `cfg.sensor_range` read `+∞`.
pub fn raycast_scan<R: Rng + ?Sized>(
    world: &World,
    pose: &Pose,
    cfg: &PlannerConfig,
    noise: SensorNoise,
    rng: &mut R,
    timestamp: f64,
) -> Result<ScanFrame> {
    if !world.is_free_at(pose.x, pose.y) {
        return Err(Error::InvalidPose {
            x: pose.x,
            y: pose.y,
            reason: "sensor inside an obstacle".into(),
        });
    }
    let normal = (noise.range_sigma > 0.0)
        .then(|| Normal::new(0.0, noise.range_sigma).map_err(|e| Error::Config(format!("range noise: {e}"))))
        .transpose()?;
    let floor = world.resolution() * 1e-3;
    let ranges = (0..cfg.raw_beams)
        .map(|i| {
            let angle = pose.yaw + raw_beam_bearing(i, cfg);
            match cast_ray(world.truth(), pose.x, pose.y, angle, cfg.sensor_range) {
                None => f64::INFINITY,
                Some(d) => match &normal {
                    Some(n) => (d + n.sample(rng)).max(floor),
                    None => d.max(floor),
                },
            }
        })
        .collect();
    ScanFrame::new(ranges, cfg.fov_deg, timestamp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridGeometry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn room(side_cells: usize) -> World {
        let mid = side_cells as f64 * 0.05;
        let g = GridGeometry::new(side_cells, side_cells, 0.1, 0.0, 0.0).unwrap();
        let cells = g
            .cells()
            .map(|c| c.row == 0 || c.col == 0 || c.row == side_cells - 1 || c.col == side_cells - 1)
            .collect();
        let truth = BooleanGrid::from_cells(g, cells).unwrap();
        World::new("room", truth, Pose::new(mid, mid, 0.0, 0.0)).unwrap()
    }

    /// Point-sampled ray march at 1 mm steps.
    fn march(grid: &BooleanGrid, x: f64, y: f64, angle: f64, max_range: f64) -> Option<f64> {
        let g = grid.geometry();
        let steps = (max_range / 1e-3) as usize;
        for i in 0..=steps {
            let t = i as f64 * 1e-3;
            match g.world_to_cell(x + t * angle.cos(), y + t * angle.sin()) {
                Some(c) if !grid.is_occupied(c) => {}
                _ => return Some(t),
            }
        }
        None
    }

    #[test]
    fn wall_five_meters_ahead() {
        // Interior spans x in [0.1, 9.9]; a robot at x = 4.9 sees the east wall at 5.0.
        let world = room(100);
        let pose = Pose::new(4.9, 5.05, 0.0, 0.0);
        let cfg = PlannerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let scan = raycast_scan(&world, &pose, &cfg, SensorNoise::default(), &mut rng, 0.0).unwrap();
        // Sample k = 24 sits at bearing 0.
        let center = scan.ranges[23 * cfg.sample_stride()];
        assert!((center - 5.0).abs() < 0.05, "{center}");
        let exact = raycast_scan(&world, &pose, &cfg, SensorNoise { range_sigma: 0.0 }, &mut rng, 0.0).unwrap();
        assert!((exact.ranges[23 * cfg.sample_stride()] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn long_corridor_saturates() {
        let world = World::builtin("corridor").unwrap();
        let cfg = PlannerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let scan = raycast_scan(&world, &world.start, &cfg, SensorNoise::default(), &mut rng, 0.0).unwrap();
        assert_eq!(scan.ranges[23 * cfg.sample_stride()], f64::INFINITY);
    }

    #[test]
    fn pose_in_obstacle_is_rejected() {
        let world = room(20);
        let cfg = PlannerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = raycast_scan(&world, &Pose::new(0.05, 0.05, 0.0, 0.0), &cfg, SensorNoise::default(), &mut rng, 0.0);
        assert!(matches!(err, Err(Error::InvalidPose { .. })));
    }

    #[test]
    fn all_beams_match_fine_ray_march() {
        let cfg = PlannerConfig::default();
        for name in ["junction", "pillars"] {
            let world = World::builtin(name).unwrap();
            let pose = Pose::new(world.start.x + 0.037, world.start.y - 0.021, 0.0, 0.3);
            let diag = world.resolution() * std::f64::consts::SQRT_2;
            for i in 0..cfg.raw_beams {
                let angle = pose.yaw + raw_beam_bearing(i, &cfg);
                let fast = cast_ray(world.truth(), pose.x, pose.y, angle, cfg.sensor_range);
                let slow = march(world.truth(), pose.x, pose.y, angle, cfg.sensor_range);
                match (fast, slow) {
                    (Some(a), Some(b)) => assert!((a - b).abs() <= diag, "{name} beam {i}: {a} vs {b}"),
                    (None, None) => {}
                    // Hits right at the range limit can land on either side.
                    (a, b) => {
                        let d = a.or(b).unwrap();
                        assert!(d > cfg.sensor_range - diag, "{name} beam {i}: {a:?} vs {b:?}");
                    }
                }
            }
        }
    }
}
