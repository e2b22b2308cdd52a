//! Run configuration, batch execution, metrics and file output for the CLI.

mod bench;
mod render;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use bench::{bench_table, measure_scaling, run_bench, timing_worlds, BenchReport, BenchRow, Scaling};
pub use render::{draw_points, esdf_overlay, parse_trajectory, world_image, write_image_pgm, PATH_GRAY, START_GRAY};

use crate::config::{parse_value, KeyValues};
use crate::endpoint::Pose;
use crate::error::{Error, Result};
use crate::grid::{io, threshold_occupancy, BooleanGrid};
use crate::sim::{parse_ascii_grid, run_episode, EpisodeLog, Outcome, SimConfig, World, BUILTIN_MAPS};

/// Exit status for success.
pub const EXIT_OK: u8 = 0;
/// Exit status when a mission did not finish or a goal was unreachable.
pub const EXIT_MISSION: u8 = 1;
/// Exit status for configuration, parse and I/O errors.
pub const EXIT_CONFIG: u8 = 2;

/// Everything an `explore` or `bench` run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sim: SimConfig,
    /// Map specs: `builtin:<name>` or a file path.
    pub maps: Vec<String>,
    pub seeds: Vec<u64>,
    pub output: PathBuf,
    /// Overrides the map's start. Required for PGM worlds.
    pub start: Option<Pose>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            maps: vec!["builtin:corridor".into()],
            seeds: vec![0, 1, 2, 3, 4],
            output: PathBuf::from("out"),
            start: None,
        }
    }
}

/// Parses `0,1,2`, `0..5` (end exclusive) or a mix of both.
pub fn parse_seeds(value: &str) -> std::result::Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u64 = parse_value("seeds", a)?;
                let b: u64 = parse_value("seeds", b)?;
                seeds.extend(a..b);
            }
            None => seeds.push(parse_value("seeds", part)?),
        }
    }
    Ok(seeds)
}

/// Parses `x,y` or `x,y,yaw_deg`.
pub fn parse_pose(value: &str) -> std::result::Result<Pose, String> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| parse_value("pose", p))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [x, y] => Ok(Pose::new(x, y, 0.0, 0.0)),
        [x, y, yaw] => Ok(Pose::new(x, y, 0.0, yaw.to_radians())),
        _ => Err(format!("expected x,y or x,y,yaw_deg, got {value:?}")),
    }
}

impl RunConfig {
    /// Sets one key, planner keys included. Returns `Ok(false)` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        let sim = &mut self.sim;
        match key {
            "map" => self.maps = vec![value.trim().to_string()],
            "maps" => {
                self.maps = value
                    .split(',')
                    .map(|m| m.trim().to_string())
                    .filter(|m| !m.is_empty())
                    .collect()
            }
            "seeds" => self.seeds = parse_seeds(value)?,
            "output" => self.output = PathBuf::from(value.trim()),
            "start" => self.start = Some(parse_pose(value)?),
            "method" => sim.method = value.trim().parse()?,
            "time_limit" => sim.time_limit = parse_value(key, value)?,
            "home_tolerance" => sim.home_tolerance = parse_value(key, value)?,
            "max_ticks" => sim.max_ticks = parse_value(key, value)?,
            "range_noise" => sim.sensor.range_sigma = parse_value(key, value)?,
            "pose_noise" => sim.pose_noise = parse_value(key, value)?,
            "hit" => sim.hit_miss.hit = parse_value(key, value)?,
            "miss" => sim.hit_miss.miss = parse_value(key, value)?,
            "stuck_distance" => sim.stuck_distance = parse_value(key, value)?,
            "stuck_ticks" => sim.stuck_ticks = parse_value(key, value)?,
            _ => return sim.planner.set(key, value),
        }
        Ok(true)
    }

    /// Applies every entry of a parsed file on top of `self`.
    pub fn apply(&mut self, kv: &KeyValues) -> Result<()> {
        for (key, value, line) in &kv.entries {
            match self.set(key, value) {
                Ok(true) => {}
                Ok(false) => return Err(Error::parse(&kv.source, *line, format!("unknown key {key:?}"))),
                Err(msg) => return Err(Error::parse(&kv.source, *line, msg)),
            }
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply(&KeyValues::read(path)?)?;
        Ok(cfg)
    }

    /// Full configuration in the file format, readable by [`RunConfig::read`].
    pub fn to_key_values(&self) -> String {
        let s = &self.sim;
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let mut out = self.sim.planner.to_key_values();
        let _ = writeln!(out, "maps = {}", self.maps.join(","));
        let _ = writeln!(out, "seeds = {}", seeds.join(","));
        let _ = writeln!(out, "output = {}", self.output.display());
        if let Some(p) = self.start {
            let _ = writeln!(out, "start = {},{},{}", p.x, p.y, p.yaw.to_degrees());
        }
        let _ = writeln!(out, "method = {}", s.method.as_str());
        let _ = writeln!(out, "time_limit = {}", s.time_limit);
        let _ = writeln!(out, "home_tolerance = {}", s.home_tolerance);
        let _ = writeln!(out, "max_ticks = {}", s.max_ticks);
        let _ = writeln!(out, "range_noise = {}", s.sensor.range_sigma);
        let _ = writeln!(out, "pose_noise = {}", s.pose_noise);
        let _ = writeln!(out, "hit = {}", s.hit_miss.hit);
        let _ = writeln!(out, "miss = {}", s.hit_miss.miss);
        let _ = writeln!(out, "stuck_distance = {}", s.stuck_distance);
        let _ = writeln!(out, "stuck_ticks = {}", s.stuck_ticks);
        out
    }

    /// Checks everything that can be checked without running an episode,
    /// including that every map file exists.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        self.sim.planner.validate()?;
        let s = &self.sim;
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        if self.maps.is_empty() {
            return Err(Error::Config("no map given".into()));
        }
        if !(s.time_limit > 0.0) || !(s.home_tolerance > 0.0) || s.max_ticks == 0 {
            return Err(Error::Config("time_limit, home_tolerance and max_ticks must be positive".into()));
        }
        if !(s.sensor.range_sigma >= 0.0) || !(s.pose_noise >= 0.0) {
            return Err(Error::Config("noise levels must be non-negative".into()));
        }
        if s.stuck_ticks == 0 || !(s.stuck_distance >= 0.0) {
            return Err(Error::Config("stuck_ticks must be positive and stuck_distance non-negative".into()));
        }
        for map in &self.maps {
            match map.strip_prefix("builtin:") {
                Some(name) if !BUILTIN_MAPS.contains(&name) => {
                    return Err(Error::Config(format!(
                        "unknown builtin map {name:?}, expected one of {BUILTIN_MAPS:?}"
                    )))
                }
                Some(_) => {}
                None if !Path::new(map).is_file() => {
                    return Err(Error::Config(format!("map file {map:?} does not exist")))
                }
                None => {}
            }
        }
        Ok(())
    }

    pub fn load_worlds(&self) -> Result<Vec<World>> {
        self.maps.iter().map(|m| World::load(m, self.start)).collect()
    }
}

/// Loads an obstacle mask for the single-shot commands. Unlike [`World`], the
/// map need not be closed or have a start. PGM maps are thresholded.
pub fn load_grid(spec: &str, threshold: f64) -> Result<(String, BooleanGrid)> {
    if spec.starts_with("builtin:") {
        let world = World::load(spec, None)?;
        return Ok((world.name.clone(), world.truth().clone()));
    }
    let path = Path::new(spec);
    let name = path
        .file_stem()
        .map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        let grid = io::read_occupancy_pgm(path)?;
        return Ok((name, threshold_occupancy(&grid, threshold)));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok((name, parse_ascii_grid(spec, &text)?.grid))
}

/// Sample statistics in the layout of the exploration-time table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub n: usize,
    pub avg: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
    pub max: f64,
    pub min: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let avg = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Some(Self {
            n,
            avg,
            std: var.sqrt(),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
        })
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Runs one episode per seed, in parallel. Results come back in seed order.
pub fn run_seeds(world: &World, cfg: &SimConfig, seeds: &[u64]) -> Result<Vec<EpisodeLog>> {
    seeds.par_iter().map(|&seed| run_episode(world, cfg, seed)).collect()
}

pub fn all_done(logs: &[EpisodeLog]) -> bool {
    logs.iter().all(|l| l.summary.outcome == Outcome::Done)
}

/// Header of the exploration summary table.
pub fn table_header() -> String {
    format!(
        "{:<12} {:<9} {:>5} | {:^31} | {:>8} {:>7} {:>8} {:>8} | {}\n{:<12} {:<9} {:>5} | {:>7} {:>7} {:>7} {:>7} | {:>8} {:>7} {:>8} {:>8} |\n",
        "",
        "",
        "",
        "Exploration Time (s)",
        "dist (m)",
        "cov (%)",
        "home (m)",
        "clr (m)",
        "outcomes",
        "map",
        "method",
        "seeds",
        "Avg",
        "Std",
        "Max",
        "Min",
        "avg",
        "avg",
        "max",
        "min",
    )
}

/// One summary row over the episodes of a single map and method.
pub fn table_row(logs: &[EpisodeLog]) -> String {
    let Some(first) = logs.first() else {
        return String::new();
    };
    let collect = |f: fn(&EpisodeLog) -> f64| logs.iter().map(f).collect::<Vec<f64>>();
    let time = Stats::of(&collect(|l| l.summary.exploration_time)).unwrap();
    let dist = Stats::of(&collect(|l| l.summary.distance)).unwrap();
    let cov = Stats::of(&collect(|l| l.summary.coverage)).unwrap();
    let home = Stats::of(&collect(|l| l.summary.home_error)).unwrap();
    let clr = Stats::of(&collect(|l| l.summary.min_true_clearance)).unwrap();
    let done = logs.iter().filter(|l| l.summary.outcome == Outcome::Done).count();
    let mut outcomes = format!("{done}/{} DONE", logs.len());
    for l in logs.iter().filter(|l| l.summary.outcome != Outcome::Done) {
        let _ = write!(outcomes, ", seed {}: {}", l.seed, l.summary.outcome);
    }
    format!(
        "{:<12} {:<9} {:>5} | {:>7.1} {:>7.2} {:>7.1} {:>7.1} | {:>8.1} {:>7.1} {:>8.3} {:>8.3} | {}\n",
        first.map,
        first.method.as_str(),
        logs.len(),
        time.avg,
        time.std,
        time.max,
        time.min,
        dist.avg,
        cov.avg,
        home.max,
        clr.min,
        outcomes
    )
}

fn episode_stem(log: &EpisodeLog) -> String {
    format!("{}_{}_seed{}", log.map, log.method.as_str(), log.seed)
}

/// Writes per-seed logs, timings and summaries plus `summary.txt` and the
/// effective configuration.
pub fn write_explore_outputs(dir: &Path, cfg: &RunConfig, logs: &[EpisodeLog]) -> Result<()> {
    for log in logs {
        let stem = episode_stem(log);
        io::write_file(&dir.join(format!("{stem}.csv")), log.to_csv().as_bytes())?;
        io::write_file(&dir.join(format!("{stem}_timing.csv")), log.timing_csv().as_bytes())?;
        io::write_file(&dir.join(format!("{stem}_summary.txt")), log.summary_text().as_bytes())?;
    }
    let mut table = table_header();
    table.push_str(&table_row(logs));
    io::write_file(&dir.join("summary.txt"), table.as_bytes())?;
    io::write_file(&dir.join("config.txt"), cfg.to_key_values().as_bytes())
}
