//! Method comparison over maps and seeds, and the map-size timing probe.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{median, table_header, table_row, RunConfig, Stats};
use crate::endpoint::Pose;
use crate::error::Result;
use crate::grid::{io, BooleanGrid, Cell, GridGeometry};
use crate::sim::{run_episode, EpisodeLog, Method, SimConfig, World};

/// Per-episode metrics. Everything here is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub map: String,
    pub method: Method,
    pub seed: u64,
    pub outcome: String,
    pub ticks: usize,
    pub exploration_time: f64,
    pub mission_time: f64,
    pub distance: f64,
    pub coverage: f64,
    pub home_error: f64,
    /// Smallest ground-truth clearance of the robot over the episode.
    pub min_true_clearance: f64,
    /// Smallest local-map clearance along any planned path.
    pub min_path_clearance: f64,
    pub mean_path_length: f64,
    pub violations: usize,
}

impl BenchRow {
    fn from_log(log: &EpisodeLog) -> Self {
        let s = &log.summary;
        let planned: Vec<_> = log.records.iter().filter(|r| r.path_cells > 0).collect();
        let mean_path_length = if planned.is_empty() {
            0.0
        } else {
            planned.iter().map(|r| r.path_length).sum::<f64>() / planned.len() as f64
        };
        Self {
            map: log.map.clone(),
            method: log.method,
            seed: log.seed,
            outcome: s.outcome.to_string(),
            ticks: s.ticks,
            exploration_time: s.exploration_time,
            mission_time: s.mission_time,
            distance: s.distance,
            coverage: s.coverage,
            home_error: s.home_error,
            min_true_clearance: s.min_true_clearance,
            min_path_clearance: planned.iter().map(|r| r.min_clearance).fold(f64::INFINITY, f64::min),
            mean_path_length,
            violations: s.violations,
        }
    }
}

/// Plan times of the same planner on a small world and on a large world
/// that embeds it, in seconds per tick.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scaling {
    pub small: Vec<f64>,
    pub large: Vec<f64>,
}

impl Scaling {
    pub fn ratio(&self) -> f64 {
        median(&self.large).unwrap_or(f64::NAN) / median(&self.small).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Full logs in row order.
    pub logs: Vec<EpisodeLog>,
    pub scaling: Option<Scaling>,
}

const METHODS: [Method; 2] = [Method::Proposed, Method::Baseline];

/// Runs both methods on every world and seed. When `scaling_ticks` is set the
/// map-size probe runs afterwards, alone, so timings are not disturbed by the
/// parallel episodes.
pub fn run_bench(cfg: &RunConfig, worlds: &[World], scaling_ticks: Option<usize>) -> Result<BenchReport> {
    let jobs: Vec<(&World, Method, u64)> = worlds
        .iter()
        .flat_map(|w| METHODS.iter().flat_map(move |&m| cfg.seeds.iter().map(move |&s| (w, m, s))))
        .collect();
    let logs = jobs
        .par_iter()
        .map(|&(world, method, seed)| {
            let sim = SimConfig {
                method,
                ..cfg.sim.clone()
            };
            run_episode(world, &sim, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    let scaling = scaling_ticks.map(|n| measure_scaling(&cfg.sim, n)).transpose()?;
    Ok(BenchReport {
        rows: logs.iter().map(BenchRow::from_log).collect(),
        logs,
        scaling,
    })
}

impl BenchReport {
    pub const CSV_HEADER: &'static str = "map,method,seed,outcome,ticks,exploration_time,mission_time,distance,coverage,home_error,min_true_clearance,min_path_clearance,mean_path_length,violations";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.1},{:.1},{:.6},{:.4},{:.6},{:.6},{:.6},{:.6},{}",
                r.map,
                r.method.as_str(),
                r.seed,
                r.outcome,
                r.ticks,
                r.exploration_time,
                r.mission_time,
                r.distance,
                r.coverage,
                r.home_error,
                r.min_true_clearance,
                r.min_path_clearance,
                r.mean_path_length,
                r.violations
            );
        }
        out
    }

    /// Wall-clock plan times, one row per episode, in milliseconds.
    pub fn timing_csv(&self) -> String {
        let mut out = String::from("map,method,seed,ticks,plan_median_ms,plan_mean_ms,plan_max_ms\n");
        for log in &self.logs {
            let t: Vec<f64> = log.records.iter().map(|r| r.plan_time * 1e3).collect();
            let s = Stats::of(&t);
            let _ = writeln!(
                out,
                "{},{},{},{},{:.4},{:.4},{:.4}",
                log.map,
                log.method.as_str(),
                log.seed,
                t.len(),
                median(&t).unwrap_or(0.0),
                s.map_or(0.0, |s| s.avg),
                s.map_or(0.0, |s| s.max)
            );
        }
        out
    }

    /// Plan-time table and the map-size probe result.
    pub fn timing_text(&self) -> String {
        let mut out = format!(
            "{:<12} {:<9} {:>7} {:>10} {:>10} {:>10}\n",
            "map", "method", "ticks", "median ms", "mean ms", "max ms"
        );
        for group in self.groups() {
            let t: Vec<f64> = group.iter().flat_map(|l| l.records.iter().map(|r| r.plan_time * 1e3)).collect();
            let s = Stats::of(&t);
            let _ = writeln!(
                out,
                "{:<12} {:<9} {:>7} {:>10.3} {:>10.3} {:>10.3}",
                group[0].map,
                group[0].method.as_str(),
                t.len(),
                median(&t).unwrap_or(0.0),
                s.map_or(0.0, |s| s.avg),
                s.map_or(0.0, |s| s.max)
            );
        }
        if let Some(sc) = &self.scaling {
            let _ = writeln!(
                out,
                "\nplan time vs map size: 100x100 median {:.3} ms over {} ticks, 2000x2000 median {:.3} ms over {} ticks, ratio {:.3}",
                median(&sc.small).unwrap_or(0.0) * 1e3,
                sc.small.len(),
                median(&sc.large).unwrap_or(0.0) * 1e3,
                sc.large.len(),
                sc.ratio()
            );
        }
        out
    }

    /// Logs grouped by map and method, in run order.
    pub fn groups(&self) -> Vec<&[EpisodeLog]> {
        self.logs
            .chunk_by(|a, b| a.map == b.map && a.method == b.method)
            .collect()
    }

    /// Writes the tables plus every episode log under `logs/`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for log in &self.logs {
            let file = dir.join("logs").join(format!("{}.csv", super::episode_stem(log)));
            io::write_file(&file, log.to_csv().as_bytes())?;
        }
        io::write_file(&dir.join("bench.csv"), self.to_csv().as_bytes())?;
        io::write_file(&dir.join("bench.txt"), bench_table(self).as_bytes())?;
        io::write_file(&dir.join("bench_timing.csv"), self.timing_csv().as_bytes())?;
        io::write_file(&dir.join("bench_timing.txt"), self.timing_text().as_bytes())
    }
}

/// Summary table with one row per map and method.
pub fn bench_table(report: &BenchReport) -> String {
    let mut out = table_header();
    for group in report.groups() {
        out.push_str(&table_row(group));
    }
    out
}

const PATCH: usize = 100;
const LARGE: usize = 2000;
const WALL: usize = 3;

fn patch_occupied(row: usize, col: usize) -> bool {
    let edge = row < WALL || col < WALL || row >= PATCH - WALL || col >= PATCH - WALL;
    let pillar = [(25, 25), (25, 69), (69, 25), (69, 69)]
        .iter()
        .any(|&(r, c)| (r..r + 6).contains(&row) && (c..c + 6).contains(&col));
    edge || pillar
}

/// A walled 10 m room with four pillars, and the same room embedded in the
/// middle of a cluttered 200 m world. Both use 0.1 m cells.
pub fn timing_worlds() -> Result<(World, World)> {
    let res = 0.1;
    let small_geom = GridGeometry::new(PATCH, PATCH, res, 0.0, 0.0)?;
    let small_cells = small_geom.cells().map(|c| patch_occupied(c.row, c.col)).collect();
    let start = Pose::new(5.05, 5.05, 0.0, 0.0);
    let small = World::new("room_100", BooleanGrid::from_cells(small_geom, small_cells)?, start)?;

    let geom = GridGeometry::new(LARGE, LARGE, res, 0.0, 0.0)?;
    let mut large = BooleanGrid::free(geom);
    let off = (LARGE - PATCH) / 2;
    let margin = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4000 {
        let (h, w) = (rng.gen_range(2..20), rng.gen_range(2..20));
        let (r0, c0) = (rng.gen_range(0..LARGE - h), rng.gen_range(0..LARGE - w));
        let near = |a: usize, len: usize| a + len + margin > off && a < off + PATCH + margin;
        if near(r0, h) && near(c0, w) {
            continue;
        }
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                large.set(Cell::new(r, c), true);
            }
        }
    }
    for i in 0..LARGE {
        for c in [Cell::new(0, i), Cell::new(LARGE - 1, i), Cell::new(i, 0), Cell::new(i, LARGE - 1)] {
            large.set(c, true);
        }
    }
    for r in 0..PATCH {
        for c in 0..PATCH {
            large.set(Cell::new(off + r, off + c), patch_occupied(r, c));
        }
    }
    let shift = off as f64 * res;
    let large_start = Pose::new(start.x + shift, start.y + shift, 0.0, 0.0);
    Ok((small, World::new("room_in_2000", large, large_start)?))
}

/// Alternates short episodes on the two timing worlds until each has at
/// least `min_ticks` plan-time samples.
pub fn measure_scaling(base: &SimConfig, min_ticks: usize) -> Result<Scaling> {
    let (small, large) = timing_worlds()?;
    small.truth_esdf();
    large.truth_esdf();
    let cfg = SimConfig {
        max_ticks: 100,
        time_limit: f64::MAX,
        ..base.clone()
    };
    let mut out = Scaling::default();
    let mut seed = 0;
    while out.small.len() < min_ticks || out.large.len() < min_ticks {
        for (world, sink) in [(&small, &mut out.small), (&large, &mut out.large)] {
            let log = run_episode(world, &cfg, seed)?;
            sink.extend(log.records.iter().map(|r| r.plan_time));
        }
        seed += 1;
    }
    Ok(out)
}
