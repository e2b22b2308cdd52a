use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use esdf_explore::config::KeyValues;
use esdf_explore::endpoint::Point;
use esdf_explore::grid::{io, signed_distance_transform};
use esdf_explore::harness::{
    self, all_done, esdf_overlay, load_grid, parse_trajectory, run_bench, run_seeds, world_image,
    write_explore_outputs, write_image_pgm, RunConfig, EXIT_CONFIG, EXIT_MISSION, EXIT_OK, START_GRAY,
};
use esdf_explore::planner::{parse_path_csv, path_to_csv, plan, CostModel};
use esdf_explore::sim::{Method, World, BUILTIN_MAPS};
use esdf_explore::{Error, PlannerConfig};

/// ESDF-weighted local planning and closed-loop exploration on 2D grids.
///
/// Maps are ASCII files (`#` occupied, `.` free, `S` start), PGM images with
/// a `.meta` sidecar, or `builtin:NAME`.
#[derive(Parser)]
#[command(name = "esdf-explore", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signed distance field of a map, as CSV and PGM.
    Edt {
        map: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        planner: PlannerArgs,
    },
    /// One search over the whole map.
    Plan {
        map: String,
        /// Start as `x,y` in meters.
        #[arg(long, value_parser = parse_point)]
        start: Point,
        #[arg(long, value_parser = parse_point)]
        goal: Point,
        /// Plain A* with the same robot radius instead of the weighted search.
        #[arg(long)]
        baseline: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        planner: PlannerArgs,
    },
    /// Closed-loop episodes on one or more maps.
    Explore {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Proposed against baseline on every map and seed, plus the map-size timing probe.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Minimum plan-time samples per timing world.
        #[arg(long, default_value_t = 200)]
        scaling_ticks: usize,
        #[arg(long)]
        no_scaling: bool,
    },
    /// Renders a map, optionally with an episode trajectory, or its distance field with a path.
    Render {
        map: String,
        #[arg(long)]
        out: PathBuf,
        /// Episode CSV whose trajectory is drawn on the map.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Render the distance field instead of the obstacles.
        #[arg(long)]
        esdf: bool,
        /// Path CSV drawn on top.
        #[arg(long)]
        path: Option<PathBuf>,
        #[command(flatten)]
        planner: PlannerArgs,
    },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let p = harness::parse_pose(s)?;
    Ok(Point::new(p.x, p.y))
}

/// Planner parameters. Every flag also accepts the underscore spelling used
/// in configuration files.
#[derive(Args, Default)]
struct PlannerArgs {
    #[arg(long, alias = "threshold")]
    threshold: Option<f64>,
    #[arg(long, alias = "planning_range")]
    planning_range: Option<f64>,
    #[arg(long, alias = "sensor_range")]
    sensor_range: Option<f64>,
    #[arg(long, alias = "fov_deg")]
    fov_deg: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, alias = "raw_beams")]
    raw_beams: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, alias = "d_safe")]
    d_safe: Option<f64>,
    #[arg(long, alias = "lambda_dist", visible_alias = "lambda")]
    lambda_dist: Option<f64>,
    #[arg(long, alias = "r_robot")]
    r_robot: Option<f64>,
    #[arg(long, alias = "replan_period")]
    replan_period: Option<f64>,
    #[arg(long, alias = "v_max")]
    v_max: Option<f64>,
    #[arg(long, alias = "lpf_cutoff")]
    lpf_cutoff: Option<f64>,
    #[arg(long, alias = "window_size")]
    window_size: Option<f64>,
    #[arg(long, alias = "window_height")]
    window_height: Option<f64>,
    #[arg(long, alias = "dead_end_range")]
    dead_end_range: Option<f64>,
}

impl PlannerArgs {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let f = |k: &'static str, v: Option<f64>| v.map(|v| (k, v.to_string()));
        let u = |k: &'static str, v: Option<usize>| v.map(|v| (k, v.to_string()));
        [
            f("threshold", self.threshold),
            f("planning_range", self.planning_range),
            f("sensor_range", self.sensor_range),
            f("fov_deg", self.fov_deg),
            u("samples", self.samples),
            u("raw_beams", self.raw_beams),
            f("epsilon", self.epsilon),
            f("d_safe", self.d_safe),
            f("lambda_dist", self.lambda_dist),
            f("r_robot", self.r_robot),
            f("replan_period", self.replan_period),
            f("v_max", self.v_max),
            f("lpf_cutoff", self.lpf_cutoff),
            f("window_size", self.window_size),
            f("window_height", self.window_height),
            f("dead_end_range", self.dead_end_range),
        ]
        .into_iter()
        .flatten()
        .collect()
    }

    fn config(&self) -> Result<PlannerConfig, Error> {
        let mut cfg = PlannerConfig::default();
        for (k, v) in self.pairs() {
            cfg.set(k, &v).map_err(Error::Config)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Key-value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single map.
    #[arg(long)]
    map: Option<String>,
    /// Comma-separated maps.
    #[arg(long)]
    maps: Option<String>,
    /// `0,1,2` or `0..5`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, alias = "time_limit")]
    time_limit: Option<f64>,
    #[arg(long, alias = "home_tolerance")]
    home_tolerance: Option<f64>,
    #[arg(long, alias = "max_ticks")]
    max_ticks: Option<usize>,
    #[arg(long, alias = "range_noise")]
    range_noise: Option<f64>,
    #[arg(long, alias = "pose_noise")]
    pose_noise: Option<f64>,
    /// Start override `x,y[,yaw_deg]`, required for PGM worlds.
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    method: Option<Method>,
    /// Shorthand for `--method baseline`.
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    planner: PlannerArgs,
}

impl RunArgs {
    fn config(&self, mut cfg: RunConfig) -> Result<RunConfig, Error> {
        if let Some(path) = &self.config {
            cfg.apply(&KeyValues::read(path)?)?;
        }
        let mut pairs: Vec<(String, String)> = self
            .planner
            .pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                pairs.push((k.to_string(), v));
            }
        };
        push("map", self.map.clone());
        push("maps", self.maps.clone());
        push("seeds", self.seeds.clone());
        push("time_limit", self.time_limit.map(|v| v.to_string()));
        push("home_tolerance", self.home_tolerance.map(|v| v.to_string()));
        push("max_ticks", self.max_ticks.map(|v| v.to_string()));
        push("range_noise", self.range_noise.map(|v| v.to_string()));
        push("pose_noise", self.pose_noise.map(|v| v.to_string()));
        push("start", self.start.clone());
        push("method", self.method.map(|m| m.as_str().to_string()));
        push("method", self.baseline.then(|| "baseline".to_string()));
        push("output", self.out.as_ref().map(|p| p.display().to_string()));
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        for (k, v) in pairs {
            match cfg.set(&k, &v) {
                Ok(true) => {}
                Ok(false) => return Err(Error::Config(format!("unknown key {k:?}"))),
                Err(msg) => return Err(Error::Config(msg)),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Edt { map, out, planner } => {
            let cfg = planner.config()?;
            let (name, grid) = load_grid(&map, cfg.threshold)?;
            let esdf = signed_distance_transform(&grid);
            let csv = out.join(format!("{name}_esdf.csv"));
            io::write_esdf_csv(&esdf, &csv)?;
            io::write_esdf_pgm(&esdf, cfg.d_safe, &out.join(format!("{name}_esdf.pgm")))?;
            let g = esdf.geometry();
            let max = esdf.cells().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            println!("{name}: {}x{} cells, max clearance {max:.3} m -> {}", g.width, g.height, csv.display());
            Ok(EXIT_OK)
        }
        Command::Plan {
            map,
            start,
            goal,
            baseline,
            out,
            planner,
        } => {
            let cfg = planner.config()?;
            let (name, grid) = load_grid(&map, cfg.threshold)?;
            let esdf = signed_distance_transform(&grid);
            let model = if baseline {
                CostModel::plain(cfg.r_robot)
            } else {
                CostModel::from_config(&cfg)
            };
            let path = plan(start, goal, &esdf, &model)?;
            let stem = if baseline { format!("{name}_baseline") } else { name };
            let csv = out.join(format!("{stem}_path.csv"));
            write_file(&csv, path_to_csv(&path).as_bytes())?;
            let image = esdf_overlay(&esdf, cfg.d_safe, &path.waypoints());
            write_image_pgm(esdf.geometry(), &image, &out.join(format!("{stem}_path.pgm")))?;
            println!(
                "cost {:.6}  length {:.3} m  min clearance {:.3} m  cells {}  expanded {}  surrogate {}",
                path.total_cost,
                path.length(),
                path.min_clearance(&esdf),
                path.nodes.len(),
                path.expanded,
                path.surrogate
            );
            if path.surrogate {
                eprintln!("goal unreachable; wrote the path to the closest reachable cell");
                return Ok(EXIT_MISSION);
            }
            Ok(EXIT_OK)
        }
        Command::Explore { run } => {
            let cfg = run.config(RunConfig::default())?;
            let worlds = cfg.load_worlds()?;
            print!("{}", harness::table_header());
            let mut ok = true;
            for world in &worlds {
                let logs = run_seeds(world, &cfg.sim, &cfg.seeds)?;
                let dir = if worlds.len() == 1 { cfg.output.clone() } else { cfg.output.join(&world.name) };
                write_explore_outputs(&dir, &cfg, &logs)?;
                print!("{}", harness::table_row(&logs));
                ok &= all_done(&logs);
            }
            Ok(if ok { EXIT_OK } else { EXIT_MISSION })
        }
        Command::Bench {
            run,
            scaling_ticks,
            no_scaling,
        } => {
            let defaults = RunConfig {
                maps: BUILTIN_MAPS.iter().map(|m| format!("builtin:{m}")).collect(),
                ..RunConfig::default()
            };
            let cfg = run.config(defaults)?;
            let worlds = cfg.load_worlds()?;
            let report = run_bench(&cfg, &worlds, (!no_scaling).then_some(scaling_ticks))?;
            report.write(&cfg.output)?;
            write_file(&cfg.output.join("config.txt"), cfg.to_key_values().as_bytes())?;
            print!("{}", harness::bench_table(&report));
            println!();
            print!("{}", report.timing_text());
            Ok(if all_done(&report.logs) { EXIT_OK } else { EXIT_MISSION })
        }
        Command::Render {
            map,
            out,
            log,
            esdf,
            path,
            planner,
        } => {
            let cfg = planner.config()?;
            let (_, grid) = load_grid(&map, cfg.threshold)?;
            let geometry = *grid.geometry();
            let mut image = if esdf {
                io::esdf_to_image(&signed_distance_transform(&grid), cfg.d_safe)
            } else {
                world_image(&grid)
            };
            if let Some(file) = &path {
                let text = read_text(file)?;
                let rows = parse_path_csv(&file.display().to_string(), &text)?.rows;
                let points: Vec<Point> = rows.iter().map(|r| Point::new(r.x, r.y)).collect();
                harness::draw_points(&mut image, &geometry, &points, harness::PATH_GRAY);
            }
            if let Some(file) = &log {
                let points = parse_trajectory(&file.display().to_string(), &read_text(file)?)?;
                harness::draw_points(&mut image, &geometry, &points, harness::PATH_GRAY);
                if let Ok(world) = World::load(&map, None) {
                    let s = world.start.position();
                    harness::draw_points(&mut image, &geometry, &[s], START_GRAY);
                }
            }
            write_image_pgm(&geometry, &image, &out)?;
            println!("wrote {}", out.display());
            Ok(EXIT_OK)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
