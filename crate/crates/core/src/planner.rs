//! Clearance-aware best-first grid search inside the local window.
//!
//! Nodes are ranked by
//!
//! ```text
//! f_total(n) = g(n) + (1 + ε·ω(η(n)))·h(n) + f_dist(n)
//! ω(η)       = 1 − η/N_est  for η ≤ N_est, 0 otherwise
//! ```
//!
//! where `g` accumulates Euclidean step lengths plus `f_dist` of every cell
//! entered, `h` is the straight-line distance to the goal, `η` the search depth
//! and `N_est` the straight-line step estimate from the start. `f_dist` is a
//! linear penalty that vanishes at `d_safe` clearance; cells with less than
//! `r_robot` clearance are never expanded.
//!
//! The inflation decays with depth, so the search is greedy near the start and
//! behaves like plain A* beyond `N_est` steps. Expanded nodes are reopened when
//! a cheaper route is found, which keeps the `(1 + ε)` cost bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::config::PlannerConfig;
use crate::endpoint::Point;
use crate::error::{DeadEndKind, Error, Result};
use crate::grid::{signed_distance_transform, BooleanGrid, Cell, EsdfGrid, GridGeometry};

/// Cost parameters of the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub epsilon: f64,
    /// Estimated path length in grid steps; derived from the start–goal
    /// distance when `None`.
    pub n_est: Option<usize>,
    pub d_safe: f64,
    pub lambda_dist: f64,
    pub r_robot: f64,
}

impl CostModel {
    pub fn from_config(cfg: &PlannerConfig) -> Self {
        Self {
            epsilon: cfg.epsilon,
            n_est: None,
            d_safe: cfg.d_safe,
            lambda_dist: cfg.lambda_dist,
            r_robot: cfg.r_robot,
        }
    }

    /// Unweighted, obstacle-agnostic A* with the same traversability rule.
    pub fn plain(r_robot: f64) -> Self {
        Self {
            epsilon: 0.0,
            n_est: None,
            d_safe: r_robot,
            lambda_dist: 0.0,
            r_robot,
        }
    }
}

/// Heuristic inflation schedule: `1 − depth/n_est` until `n_est`, then 0.
pub fn omega(depth: usize, n_est: usize) -> f64 {
    let n = n_est.max(1);
    if depth <= n {
        1.0 - depth as f64 / n as f64
    } else {
        0.0
    }
}

/// Obstacle-proximity cost of a cell with clearance `d`.
///
/// `None` means the cell is closer than `r_robot` to an obstacle.
pub fn f_dist(d: f64, model: &CostModel) -> Option<f64> {
    if d < model.r_robot {
        None
    } else if d < model.d_safe {
        Some(model.lambda_dist * (model.d_safe - d))
    } else {
        Some(0.0)
    }
}

/// Search bookkeeping for a node on the returned path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchNode {
    pub cell: Cell,
    /// Accumulated cost from the start.
    pub g: f64,
    /// Straight-line distance to the goal, meters.
    pub h: f64,
    /// Inflated heuristic term `(1 + ε·ω(η))·h`.
    pub h_weighted: f64,
    pub f_dist: f64,
    /// Steps from the start along the parent chain.
    pub depth: usize,
    pub parent: Option<Cell>,
}

/// Result of a search, start cell first.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub geometry: GridGeometry,
    pub nodes: Vec<SearchNode>,
    /// `g` of the final node.
    pub total_cost: f64,
    /// Set when the goal was unreachable and the path ends at the reachable
    /// cell closest to it.
    pub surrogate: bool,
    pub n_est: usize,
    /// Number of node expansions.
    pub expanded: usize,
}

impl GridPath {
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.nodes.iter().map(|n| n.cell)
    }

    pub fn waypoints(&self) -> Vec<Point> {
        self.cells()
            .map(|c| {
                let (x, y) = self.geometry.cell_center(c);
                Point::new(x, y)
            })
            .collect()
    }

    /// Count of axis-aligned and diagonal steps.
    pub fn step_counts(&self) -> (usize, usize) {
        self.nodes.windows(2).fold((0, 0), |(s, d), w| {
            if w[0].cell.row != w[1].cell.row && w[0].cell.col != w[1].cell.col {
                (s, d + 1)
            } else {
                (s + 1, d)
            }
        })
    }

    /// Geometric length, meters.
    pub fn length(&self) -> f64 {
        let (s, d) = self.step_counts();
        self.geometry.resolution * (s as f64 + d as f64 * std::f64::consts::SQRT_2)
    }

    /// Smallest clearance along the path according to `esdf`, which must
    /// share the path's geometry.
    pub fn min_clearance(&self, esdf: &EsdfGrid) -> f64 {
        self.cells().map(|c| esdf.get(c)).fold(f64::INFINITY, f64::min)
    }

    pub fn goal(&self) -> Cell {
        self.nodes.last().expect("paths are never empty").cell
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    f: f64,
    h: f64,
    g: f64,
    index: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Max-heap: the smallest (f, h, index) must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.index.cmp(&self.index))
    }
}

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Plans from `start` to `goal` over the traversable cells of `esdf`.
pub fn plan(start: Point, goal: Point, esdf: &EsdfGrid, model: &CostModel) -> Result<GridPath> {
    let g = *esdf.geometry();
    let locate = |p: Point, what: &str| {
        g.world_to_cell(p.x, p.y).ok_or_else(|| Error::InvalidPose {
            x: p.x,
            y: p.y,
            reason: format!("{what} outside the planning grid"),
        })
    };
    let start_cell = locate(start, "start")?;
    let goal_cell = locate(goal, "goal")?;
    search(start_cell, goal_cell, esdf, model)
}

/// Textbook A* on an obstacle mask, inflated by `r_robot`.
pub fn plan_baseline_astar(start: Point, goal: Point, grid: &BooleanGrid, r_robot: f64) -> Result<GridPath> {
    plan(start, goal, &signed_distance_transform(grid), &CostModel::plain(r_robot))
}

/// Grid-level entry point used by [`plan`].
pub fn search(start: Cell, goal: Cell, esdf: &EsdfGrid, model: &CostModel) -> Result<GridPath> {
    let geom = *esdf.geometry();
    let n = geom.len();
    let r = geom.resolution;

    let cost: Vec<Option<f64>> = esdf.cells().iter().map(|&d| f_dist(d, model)).collect();
    if cost.iter().all(Option::is_none) {
        return Err(Error::DeadEnd(DeadEndKind::NoTraversableCell));
    }
    let start_idx = geom.index(start);
    let goal_idx = geom.index(goal);
    if cost[start_idx].is_none() {
        return Err(Error::InvalidStart {
            row: start.row,
            col: start.col,
        });
    }

    let heuristic = |idx: usize| geom.cell_distance(geom.cell(idx), goal);
    let n_est = model
        .n_est
        .unwrap_or_else(|| (heuristic(start_idx) / r - 1e-9).ceil().max(1.0) as usize)
        .max(1);
    let weight = |depth: usize| 1.0 + model.epsilon * omega(depth, n_est);
    let priority = |g: f64, h: f64, depth: usize, fd: f64| g + weight(depth) * h + fd;

    let mut g_score = vec![f64::INFINITY; n];
    let mut depth = vec![0usize; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();

    g_score[start_idx] = 0.0;
    let h0 = heuristic(start_idx);
    let fd0 = cost[start_idx].unwrap_or(0.0);
    heap.push(Entry {
        f: priority(0.0, h0, 0, fd0),
        h: h0,
        g: 0.0,
        index: start_idx,
    });

    let diag = r * std::f64::consts::SQRT_2;
    let mut expanded = 0;
    let mut reached_goal = false;

    while let Some(Entry { g, index, .. }) = heap.pop() {
        if g.to_bits() != g_score[index].to_bits() {
            continue;
        }
        expanded += 1;
        if index == goal_idx {
            reached_goal = true;
            break;
        }
        let cell = geom.cell(index);
        for (dr, dc) in NEIGHBORS {
            let row = cell.row as isize + dr;
            let col = cell.col as isize + dc;
            if !geom.contains(row, col) {
                continue;
            }
            let next = row as usize * geom.width + col as usize;
            let Some(fd) = cost[next] else { continue };
            let step = if dr != 0 && dc != 0 { diag } else { r };
            let tentative = g + step + fd;
            if tentative < g_score[next] {
                g_score[next] = tentative;
                depth[next] = depth[index] + 1;
                parent[next] = index;
                let h = heuristic(next);
                heap.push(Entry {
                    f: priority(tentative, h, depth[next], fd),
                    h,
                    g: tentative,
                    index: next,
                });
            }
        }
    }

    let end = if reached_goal {
        goal_idx
    } else {
        // Reachable cell nearest the goal; row-major order breaks ties.
        (0..n)
            .filter(|&i| g_score[i].is_finite())
            .min_by(|&a, &b| heuristic(a).total_cmp(&heuristic(b)).then(a.cmp(&b)))
            .expect("start is always reachable")
    };

    let mut chain = vec![end];
    while let Some(&last) = chain.last() {
        if parent[last] == usize::MAX {
            break;
        }
        chain.push(parent[last]);
    }
    chain.reverse();

    let nodes = chain
        .iter()
        .map(|&i| {
            let h = heuristic(i);
            SearchNode {
                cell: geom.cell(i),
                g: g_score[i],
                h,
                h_weighted: weight(depth[i]) * h,
                f_dist: cost[i].unwrap_or(0.0),
                depth: depth[i],
                parent: (parent[i] != usize::MAX).then(|| geom.cell(parent[i])),
            }
        })
        .collect();

    Ok(GridPath {
        geometry: geom,
        nodes,
        total_cost: g_score[end],
        surrogate: !reached_goal,
        n_est,
        expanded,
    })
}

/// Path CSV: a `#` metadata line, a header, then one row per node.
pub fn path_to_csv(path: &GridPath) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# surrogate={} total_cost={} n_est={} resolution={}",
        path.surrogate, path.total_cost, path.n_est, path.geometry.resolution
    );
    out.push_str("index,row,col,x,y,g,h_weighted,f_dist\n");
    for (i, node) in path.nodes.iter().enumerate() {
        let (x, y) = path.geometry.cell_center(node.cell);
        let _ = writeln!(
            out,
            "{i},{},{},{x},{y},{},{},{}",
            node.cell.row, node.cell.col, node.g, node.h_weighted, node.f_dist
        );
    }
    out
}

pub fn write_path_csv(path: &GridPath, file: &Path) -> Result<()> {
    let mut f = std::fs::File::create(file).map_err(|e| Error::io(file, e))?;
    f.write_all(path_to_csv(path).as_bytes()).map_err(|e| Error::io(file, e))
}

/// One row of a path CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRow {
    pub row: usize,
    pub col: usize,
    pub x: f64,
    pub y: f64,
    pub g: f64,
    pub h_weighted: f64,
    pub f_dist: f64,
}

/// Parsed path CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCsv {
    pub surrogate: bool,
    pub total_cost: f64,
    pub rows: Vec<PathRow>,
}

pub fn parse_path_csv(source: &str, text: &str) -> Result<PathCsv> {
    let mut surrogate = None;
    let mut total_cost = None;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(meta) = line.strip_prefix('#') {
            for pair in meta.split_whitespace() {
                match pair.split_once('=') {
                    Some(("surrogate", v)) => surrogate = v.parse().ok(),
                    Some(("total_cost", v)) => total_cost = v.parse().ok(),
                    _ => {}
                }
            }
            continue;
        }
        if line.starts_with("index,") || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::parse(source, line_no, format!("expected 8 fields, got {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(source, line_no, format!("bad number {:?}", fields[i])))
        };
        let int = |i: usize| -> Result<usize> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(source, line_no, format!("bad index {:?}", fields[i])))
        };
        rows.push(PathRow {
            row: int(1)?,
            col: int(2)?,
            x: num(3)?,
            y: num(4)?,
            g: num(5)?,
            h_weighted: num(6)?,
            f_dist: num(7)?,
        });
    }
    Ok(PathCsv {
        surrogate: surrogate.ok_or_else(|| Error::parse(source, 1, "missing surrogate flag"))?,
        total_cost: total_cost.ok_or_else(|| Error::parse(source, 1, "missing total_cost"))?,
        rows,
    })
}
