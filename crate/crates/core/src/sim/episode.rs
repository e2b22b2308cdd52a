//! Closed-loop exploration episodes.
//!
//! Each tick scans the world, updates the occupancy map, extracts the local
//! window around the robot, computes its ESDF, picks a goal (the filtered
//! end-point while exploring, a point on the breadcrumb trail while returning)
//! and moves the robot `v_max · replan_period` meters along the planned path.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{integrate_scan, raycast_scan, HitMiss, SensorNoise, World};
use crate::config::PlannerConfig;
use crate::endpoint::{downsample_scan, forward_range, lpf_endpoint, select_endpoint, wrap_angle, EndPoint, Point, Pose};
use crate::error::{DeadEndKind, Error, Result};
use crate::grid::{extract_local_window, signed_distance_transform, threshold_occupancy, Cell, EsdfGrid, OccupancyGrid};
use crate::planner::{search, CostModel, GridPath};

/// Which planner drives the robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Clearance-weighted search with the decaying heuristic weight.
    #[default]
    Proposed,
    /// Plain A* with the same traversability rule.
    Baseline,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Baseline => "baseline",
        }
    }

    pub fn cost_model(self, cfg: &PlannerConfig) -> CostModel {
        match self {
            Method::Proposed => CostModel::from_config(cfg),
            Method::Baseline => CostModel::plain(cfg.r_robot),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "proposed" => Ok(Method::Proposed),
            "baseline" => Ok(Method::Baseline),
            _ => Err(format!("unknown method {s:?}, expected proposed or baseline")),
        }
    }
}

/// Mission parameters on top of the planner configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub planner: PlannerConfig,
    pub method: Method,
    /// Exploration stops on the first tick that starts after this many seconds.
    pub time_limit: f64,
    /// Distance to home at which a return counts as done, meters.
    pub home_tolerance: f64,
    pub max_ticks: usize,
    pub sensor: SensorNoise,
    /// Standard deviation of the per-tick pose drift, meters. Zero disables it.
    pub pose_noise: f64,
    pub hit_miss: HitMiss,
    /// Net displacement below which the robot counts as not moving.
    pub stuck_distance: f64,
    /// Window, in ticks, for the no-progress check.
    pub stuck_ticks: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            planner: PlannerConfig::default(),
            method: Method::Proposed,
            time_limit: 120.0,
            home_tolerance: 0.2,
            max_ticks: 3000,
            sensor: SensorNoise::default(),
            pose_noise: 0.0,
            hit_miss: HitMiss::default(),
            stuck_distance: 0.05,
            stuck_ticks: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Explore,
    ReturnHome,
    Done,
    Stuck,
}

impl Mode {
    pub fn is_terminal(self) -> bool {
        matches!(self, Mode::Done | Mode::Stuck)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Explore => "EXPLORE",
            Mode::ReturnHome => "RETURN_HOME",
            Mode::Done => "DONE",
            Mode::Stuck => "STUCK",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "EXPLORE" => Mode::Explore,
            "RETURN_HOME" => Mode::ReturnHome,
            "DONE" => Mode::Done,
            "STUCK" => Mode::Stuck,
            _ => return Err(format!("unknown mode {s:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    /// Ground-truth pose.
    pub pose: Pose,
    /// Speed over the last tick, meters/second.
    pub velocity: f64,
    pub home: Pose,
    /// Simulated seconds since the start.
    pub elapsed: f64,
    pub mode: Mode,
}

/// Why the mode changed during a tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    TimeLimit,
    DeadEnd,
    NoTraversable,
    Home,
    NoProgress,
    /// The robot's cell was not traversable and planning started from a neighbor.
    StartNudged,
}

impl Event {
    pub fn as_str(self) -> &'static str {
        match self {
            Event::TimeLimit => "time_limit",
            Event::DeadEnd => "dead_end",
            Event::NoTraversable => "no_traversable",
            Event::Home => "home",
            Event::NoProgress => "no_progress",
            Event::StartNudged => "start_nudged",
        }
    }
}

/// One row of the episode log.
#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub tick: usize,
    /// Simulated time at the start of the tick.
    pub time: f64,
    /// Mode used for planning this tick.
    pub mode: Mode,
    /// Ground-truth pose after moving.
    pub pose: Pose,
    /// Filtered end-point, exploring only.
    pub endpoint: Option<Point>,
    pub goal: Option<Point>,
    pub path_cells: usize,
    pub path_length: f64,
    /// Smallest local-map clearance along the path.
    pub min_clearance: f64,
    /// Ground-truth clearance at the new position.
    pub true_clearance: f64,
    pub displacement: f64,
    pub surrogate: bool,
    pub event: Option<Event>,
    /// Wall time spent on window extraction, ESDF, end-point and search.
    /// Not part of the serialized log, which must be reproducible.
    pub plan_time: f64,
}

/// How an episode ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Done,
    Stuck,
    /// `max_ticks` elapsed before a terminal mode.
    TickLimit,
    Failed(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Done => f.write_str("DONE"),
            Outcome::Stuck => f.write_str("STUCK"),
            Outcome::TickLimit => f.write_str("TICK_LIMIT"),
            Outcome::Failed(msg) => write!(f, "FAILED: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub outcome: Outcome,
    pub ticks: usize,
    /// Simulated seconds from start to the end of the episode.
    pub mission_time: f64,
    /// Simulated seconds spent in EXPLORE.
    pub exploration_time: f64,
    /// First tick planned in RETURN_HOME.
    pub return_tick: Option<usize>,
    /// Odometer, meters.
    pub distance: f64,
    /// Share of free ground-truth cells that the map observed, percent.
    pub coverage: f64,
    pub home_error: f64,
    pub min_true_clearance: f64,
    /// Ticks whose ground-truth clearance was below the robot radius.
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub map: String,
    pub method: Method,
    pub seed: u64,
    pub records: Vec<TickRecord>,
    pub summary: Summary,
}

fn opt(p: Option<Point>) -> (String, String) {
    match p {
        Some(p) => (format!("{:.6}", p.x), format!("{:.6}", p.y)),
        None => (String::new(), String::new()),
    }
}

impl EpisodeLog {
    pub const CSV_HEADER: &'static str = "tick,time,mode,x,y,yaw,endpoint_x,endpoint_y,goal_x,goal_y,path_cells,path_length,min_clearance,true_clearance,displacement,surrogate,event";

    /// Per-tick log. Holds no wall-clock data, so equal seeds give equal bytes.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# map={} method={} seed={}\n{}\n", self.map, self.method.as_str(), self.seed, Self::CSV_HEADER);
        for r in &self.records {
            let (ex, ey) = opt(r.endpoint);
            let (gx, gy) = opt(r.goal);
            let _ = writeln!(
                out,
                "{},{:.1},{},{:.6},{:.6},{:.6},{ex},{ey},{gx},{gy},{},{:.6},{:.6},{:.6},{:.6},{},{}",
                r.tick,
                r.time,
                r.mode,
                r.pose.x,
                r.pose.y,
                r.pose.yaw,
                r.path_cells,
                r.path_length,
                r.min_clearance,
                r.true_clearance,
                r.displacement,
                u8::from(r.surrogate),
                r.event.map_or("", Event::as_str),
            );
        }
        out
    }

    /// Plan times in seconds, one per tick, as `tick,plan_time_s` lines.
    pub fn timing_csv(&self) -> String {
        let mut out = String::from("tick,plan_time_s\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{:.9}", r.tick, r.plan_time);
        }
        out
    }

    pub fn summary_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "map = {}", self.map);
        let _ = writeln!(out, "method = {}", self.method.as_str());
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "outcome = {}", s.outcome);
        let _ = writeln!(out, "ticks = {}", s.ticks);
        let _ = writeln!(out, "mission_time_s = {:.1}", s.mission_time);
        let _ = writeln!(out, "exploration_time_s = {:.1}", s.exploration_time);
        let _ = writeln!(out, "return_tick = {}", s.return_tick.map_or("none".to_string(), |t| t.to_string()));
        let _ = writeln!(out, "distance_m = {:.3}", s.distance);
        let _ = writeln!(out, "coverage_pct = {:.2}", s.coverage);
        let _ = writeln!(out, "home_error_m = {:.3}", s.home_error);
        let _ = writeln!(out, "min_true_clearance_m = {:.3}", s.min_true_clearance);
        let _ = writeln!(out, "violations = {}", s.violations);
        out
    }
}

/// Mutable episode state, advanced one tick at a time.
pub struct Simulation<'w> {
    world: &'w World,
    cfg: SimConfig,
    model: CostModel,
    pub state: RobotState,
    pub map: OccupancyGrid,
    /// Previous filtered end-point.
    pub filter: Option<EndPoint>,
    /// Estimated positions visited while exploring, home first.
    trail: Vec<Point>,
    /// Trail index the return leg has reached.
    trail_cursor: usize,
    recent: VecDeque<Point>,
    drift: Point,
    rng: ChaCha8Rng,
    pose_normal: Option<Normal<f64>>,
    tick: usize,
}

impl<'w> Simulation<'w> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(world: &'w World, cfg: SimConfig, seed: u64) -> Result<Self> {
        cfg.planner.validate()?;
        if !(cfg.home_tolerance > 0.0) || cfg.stuck_ticks == 0 {
            return Err(Error::Config("home_tolerance and stuck_ticks must be positive".into()));
        }
        let pose_normal = (cfg.pose_noise > 0.0)
            .then(|| Normal::new(0.0, cfg.pose_noise).map_err(|e| Error::Config(format!("pose noise: {e}"))))
            .transpose()?;
        let home = world.start;
        Ok(Self {
            world,
            model: cfg.method.cost_model(&cfg.planner),
            map: OccupancyGrid::unknown(*world.geometry()),
            state: RobotState {
                pose: home,
                velocity: 0.0,
                home,
                elapsed: 0.0,
                mode: Mode::Explore,
            },
            filter: None,
            trail: vec![home.position()],
            trail_cursor: 0,
            recent: VecDeque::from([home.position()]),
            drift: Point::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            pose_normal,
            tick: 0,
            cfg,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn ticks(&self) -> usize {
        self.tick
    }

    fn estimated_pose(&self) -> Pose {
        Pose {
            x: self.state.pose.x + self.drift.x,
            y: self.state.pose.y + self.drift.y,
            ..self.state.pose
        }
    }

    fn set_mode(&mut self, mode: Mode) {
        if mode == Mode::ReturnHome && self.state.mode != Mode::ReturnHome {
            self.filter = None;
            self.trail_cursor = self.trail.len() - 1;
            // A turn-around passes back over recent positions; start the
            // progress window afresh.
            self.recent.clear();
        }
        self.state.mode = mode;
    }

    /// Runs one planning cycle.
    pub fn tick(&mut self) -> Result<TickRecord> {
        if self.state.mode.is_terminal() {
            return Err(Error::Config(format!("episode already ended in {}", self.state.mode)));
        }
        let pc = self.cfg.planner.clone();
        let dt = pc.replan_period;
        let time = self.tick as f64 * dt;
        let mut event = None;
        if self.state.mode == Mode::Explore && time > self.cfg.time_limit {
            self.set_mode(Mode::ReturnHome);
            event = Some(Event::TimeLimit);
        }

        let est = self.estimated_pose();
        let scan = raycast_scan(self.world, &self.state.pose, &pc, self.cfg.sensor, &mut self.rng, time)?;
        integrate_scan(&mut self.map, &est, &scan, &pc, self.cfg.hit_miss);

        let started = Instant::now();
        let mut window = extract_local_window(&self.map, &est, pc.window_size, pc.window_size)?;
        window.side_height = pc.window_height;
        let mut mask = threshold_occupancy(&window.view, pc.threshold);
        // Nothing lies beyond the map edge of a closed world.
        let parent = *self.map.geometry();
        let wg = *window.geometry();
        for cell in wg.cells() {
            if window.to_parent(cell, &parent).is_none() {
                mask.set(cell, true);
            }
        }
        let esdf = signed_distance_transform(&mask);

        let mut endpoint = None;
        let goal = match self.state.mode {
            Mode::Explore => {
                let samples = downsample_scan(&scan, &pc)?;
                // The yaw swings when the robot side-steps near a wall, so the
                // dead-end test looks along the recent direction of travel.
                let travel = self.travel_heading(est.position()).map_or(0.0, |h| wrap_angle(h - est.yaw));
                let selected = if forward_range(&samples, travel) < pc.dead_end_range {
                    Err(Error::DeadEnd(DeadEndKind::ShortRange))
                } else {
                    select_endpoint(&est, &samples, &esdf, &pc)
                };
                match selected {
                    Ok(ep) => {
                        let ep = lpf_endpoint(self.filter.as_ref(), ep, &pc);
                        self.filter = Some(ep);
                        endpoint = Some(ep.filtered);
                        Some(within(est.position(), ep.filtered, pc.planning_range))
                    }
                    Err(Error::DeadEnd(DeadEndKind::ShortRange)) => {
                        self.set_mode(Mode::ReturnHome);
                        event = Some(Event::DeadEnd);
                        Some(self.return_target(est.position()))
                    }
                    Err(Error::DeadEnd(DeadEndKind::NoTraversableCell)) => None,
                    Err(e) => return Err(e),
                }
            }
            _ => Some(self.return_target(est.position())),
        };
        let planned_mode = self.state.mode;

        let Some(goal) = goal else {
            let plan_time = started.elapsed().as_secs_f64();
            self.set_mode(Mode::Stuck);
            return Ok(self.finish_tick(time, planned_mode, None, None, None, &esdf, 0.0, Some(Event::NoTraversable), plan_time));
        };

        let planned = self.plan(est.position(), goal, &esdf);
        let plan_time = started.elapsed().as_secs_f64();
        let (path, nudged) = match planned {
            Ok(p) => p,
            Err(Error::DeadEnd(DeadEndKind::NoTraversableCell)) => {
                self.set_mode(Mode::Stuck);
                return Ok(self.finish_tick(time, planned_mode, endpoint, Some(goal), None, &esdf, 0.0, Some(Event::NoTraversable), plan_time));
            }
            Err(e) => return Err(e),
        };
        if nudged && event.is_none() {
            event = Some(Event::StartNudged);
        }

        let step = pc.v_max * dt;
        let (next, heading) = follow_path(est.position(), &path, goal, step);
        let moved = Point::new(next.x - est.x, next.y - est.y);
        let mut pose = self.state.pose;
        pose.x += moved.x;
        pose.y += moved.y;
        if let Some(h) = heading {
            pose.yaw = h;
        }
        if let Some(n) = self.pose_normal {
            self.drift.x += n.sample(&mut self.rng);
            self.drift.y += n.sample(&mut self.rng);
        }
        let displacement = moved.x.hypot(moved.y);
        self.state.pose = Pose::new(pose.x, pose.y, pose.z, pose.yaw);
        self.state.velocity = displacement / dt;

        let est_after = self.estimated_pose().position();
        match self.state.mode {
            Mode::Explore => {
                let res = self.map.geometry().resolution;
                if est_after.distance(self.trail.last().unwrap()) >= 0.5 * res {
                    // Cut loops so the way home never retraces back-and-forth
                    // motion. The radius is too small to reach across a wall
                    // with the robot radius kept clear on both sides.
                    let radius = pc.r_robot + res;
                    if let Some(i) = self.trail.iter().position(|p| p.distance(&est_after) < radius) {
                        self.trail.truncate(i + 1);
                    }
                    self.trail.push(est_after);
                }
            }
            Mode::ReturnHome
                if est_after.distance(&self.state.home.position()) <= self.cfg.home_tolerance => {
                    self.state.mode = Mode::Done;
                    event = Some(Event::Home);
                }
            _ => {}
        }
        Ok(self.finish_tick(time, planned_mode, endpoint, Some(goal), Some(&path), &esdf, displacement, event, plan_time))
    }

    #[allow(clippy::too_many_arguments)]
    fn finish_tick(
        &mut self,
        time: f64,
        mode: Mode,
        endpoint: Option<Point>,
        goal: Option<Point>,
        path: Option<&GridPath>,
        esdf: &EsdfGrid,
        displacement: f64,
        mut event: Option<Event>,
        plan_time: f64,
    ) -> TickRecord {
        let tick = self.tick;
        self.tick += 1;
        self.state.elapsed = self.tick as f64 * self.cfg.planner.replan_period;

        let here = self.state.pose.position();
        self.recent.push_back(here);
        if self.recent.len() > self.cfg.stuck_ticks + 1 {
            self.recent.pop_front();
        }
        if !self.state.mode.is_terminal()
            && self.recent.len() == self.cfg.stuck_ticks + 1
            && self.recent.front().unwrap().distance(&here) < self.cfg.stuck_distance
        {
            self.state.mode = Mode::Stuck;
            event = Some(Event::NoProgress);
        }

        let true_clearance = self.world.truth_esdf().at_world(here.x, here.y).unwrap_or(f64::NEG_INFINITY);
        TickRecord {
            tick,
            time,
            mode,
            pose: self.state.pose,
            endpoint,
            goal,
            path_cells: path.map_or(0, |p| p.nodes.len()),
            path_length: path.map_or(0.0, GridPath::length),
            min_clearance: path.map_or(0.0, |p| p.min_clearance(esdf)),
            true_clearance,
            displacement,
            surrogate: path.is_some_and(|p| p.surrogate),
            event,
            plan_time,
        }
    }

    /// Searches from the robot's cell, or from the nearest traversable cell
    /// within two cells when the robot's own cell is too close to an obstacle.
    fn plan(&self, start: Point, goal: Point, esdf: &EsdfGrid) -> Result<(GridPath, bool)> {
        let g = *esdf.geometry();
        let locate = |p: Point| {
            g.world_to_cell(p.x, p.y).ok_or_else(|| Error::InvalidPose {
                x: p.x,
                y: p.y,
                reason: "outside the local window".into(),
            })
        };
        let start_cell = locate(start)?;
        let goal_cell = locate(goal)?;
        match search(start_cell, goal_cell, esdf, &self.model) {
            Err(Error::InvalidStart { .. }) => {
                let reach = 2.0 * g.resolution + 1e-9;
                let alt = g
                    .cells()
                    .filter(|&c| esdf.get(c) >= self.model.r_robot && g.cell_distance(c, start_cell) <= reach)
                    .min_by(|&a, &b| {
                        g.cell_distance(a, start_cell)
                            .total_cmp(&g.cell_distance(b, start_cell))
                            .then(a.cmp(&b))
                    });
                match alt {
                    Some(cell) => Ok((search(cell, goal_cell, esdf, &self.model)?, true)),
                    None => Err(Error::InvalidStart {
                        row: start_cell.row,
                        col: start_cell.col,
                    }),
                }
            }
            other => other.map(|p| (p, false)),
        }
    }

    /// Direction from the newest trail point at least one meter away to `here`.
    fn travel_heading(&self, here: Point) -> Option<f64> {
        self.trail
            .iter()
            .rev()
            .find(|p| p.distance(&here) >= 1.0)
            .map(|p| (here.y - p.y).atan2(here.x - p.x))
    }

    /// Next point on the way home: the oldest trail point still within
    /// planning range both in straight line and along the trail.
    fn return_target(&mut self, here: Point) -> Point {
        let reach = self.cfg.planner.planning_range;
        let mut k = self.trail_cursor;
        let mut arc = 0.0;
        while k > 0 {
            let step = self.trail[k].distance(&self.trail[k - 1]);
            if arc + step > 1.5 * reach || self.trail[k - 1].distance(&here) > reach {
                break;
            }
            arc += step;
            k -= 1;
        }
        // Move the cursor to the trail point closest to the robot, never forward.
        self.trail_cursor = (k..=self.trail_cursor)
            .min_by(|&a, &b| self.trail[a].distance(&here).total_cmp(&self.trail[b].distance(&here)).then(a.cmp(&b)))
            .unwrap_or(k);
        if k == 0 {
            self.state.home.position()
        } else {
            self.trail[k]
        }
    }

    pub fn summary(&self, records: &[TickRecord], outcome: Outcome) -> Summary {
        let truth = self.world.truth();
        let observed_free = truth
            .geometry()
            .cells()
            .filter(|&c| !truth.is_occupied(c) && self.map.is_known(c))
            .count();
        let free = self.world.free_cell_count().max(1);
        let r = self.cfg.planner.r_robot;
        let return_tick = records.iter().find(|t| t.mode == Mode::ReturnHome).map(|t| t.tick);
        Summary {
            outcome,
            ticks: records.len(),
            mission_time: self.state.elapsed,
            exploration_time: return_tick.map_or(self.state.elapsed, |t| t as f64 * self.cfg.planner.replan_period),
            return_tick,
            distance: records.iter().map(|t| t.displacement).sum(),
            coverage: 100.0 * observed_free as f64 / free as f64,
            home_error: self.state.pose.position().distance(&self.state.home.position()),
            min_true_clearance: records.iter().map(|t| t.true_clearance).fold(f64::INFINITY, f64::min),
            violations: records.iter().filter(|t| t.true_clearance < r).count(),
        }
    }
}

/// `goal` pulled back onto the disc of radius `reach` around `from`.
fn within(from: Point, goal: Point, reach: f64) -> Point {
    let d = from.distance(&goal);
    if d <= reach {
        goal
    } else {
        let s = reach / d;
        Point::new(from.x + (goal.x - from.x) * s, from.y + (goal.y - from.y) * s)
    }
}

/// True when the segment `a → b` only crosses cells `from` and `to`.
fn segment_stays_in(g: &crate::grid::GridGeometry, a: Point, b: Point, from: Cell, to: Cell) -> bool {
    let n = ((a.distance(&b) / (0.05 * g.resolution)).ceil() as usize).max(1);
    (0..=n).all(|i| {
        let t = i as f64 / n as f64;
        match g.world_to_cell(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t) {
            Some(c) => c == from || c == to,
            None => false,
        }
    })
}

/// Moves `step` meters from `pos` along the path's cell centers and returns
/// the new position and the heading of the last motion segment.
///
/// The robot first returns to the center of its own cell unless the straight
/// line to the next cell center stays inside those two cells. When the search
/// reached the goal cell, the exact goal point is the final waypoint.
fn follow_path(pos: Point, path: &GridPath, goal: Point, step: f64) -> (Point, Option<f64>) {
    let g = &path.geometry;
    let centers = path.waypoints();
    let mut points: Vec<Point> = Vec::with_capacity(centers.len() + 1);
    let here = g.world_to_cell(pos.x, pos.y);
    let skip_first = centers.len() >= 2
        && here == Some(path.nodes[0].cell)
        && segment_stays_in(g, pos, centers[1], path.nodes[0].cell, path.nodes[1].cell);
    points.extend_from_slice(if skip_first { &centers[1..] } else { &centers[..] });
    if !path.surrogate && g.world_to_cell(goal.x, goal.y) == Some(path.goal()) {
        points.push(goal);
    }

    let mut cur = pos;
    let mut left = step;
    let mut heading = None;
    for p in points {
        let d = cur.distance(&p);
        if d < 1e-12 {
            continue;
        }
        heading = Some((p.y - cur.y).atan2(p.x - cur.x));
        if d >= left {
            let s = left / d;
            cur = Point::new(cur.x + (p.x - cur.x) * s, cur.y + (p.y - cur.y) * s);
            left = 0.0;
            break;
        }
        cur = p;
        left -= d;
    }
    let _ = left;
    (cur, heading)
}

/// Runs ticks until the robot is done, stuck, fails or hits `max_ticks`.
pub fn run_episode(world: &World, cfg: &SimConfig, seed: u64) -> Result<EpisodeLog> {
    let mut sim = Simulation::new(world, cfg.clone(), seed)?;
    let mut records = Vec::new();
    let outcome = loop {
        if sim.state.mode == Mode::Done {
            break Outcome::Done;
        }
        if sim.state.mode == Mode::Stuck {
            break Outcome::Stuck;
        }
        if records.len() >= cfg.max_ticks {
            break Outcome::TickLimit;
        }
        match sim.tick() {
            Ok(r) => records.push(r),
            Err(e) => break Outcome::Failed(e.to_string()),
        }
    };
    let summary = sim.summary(&records, outcome);
    Ok(EpisodeLog {
        map: world.name.clone(),
        method: cfg.method,
        seed,
        records,
        summary,
    })
}
