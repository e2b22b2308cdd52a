//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use esdf_explore::endpoint::{Point, Pose};
use esdf_explore::grid::{BooleanGrid, Cell, EsdfGrid, GridGeometry};
use esdf_explore::sim::World;
use rand::Rng;

/// Signed distance by exhaustive nearest-opposite-cell search.
pub fn brute_force_esdf(grid: &BooleanGrid) -> Vec<f64> {
    let g = *grid.geometry();
    let occupied: Vec<(i64, i64)> = g
        .cells()
        .filter(|&c| grid.is_occupied(c))
        .map(|c| (c.row as i64, c.col as i64))
        .collect();
    let free: Vec<(i64, i64)> = g
        .cells()
        .filter(|&c| !grid.is_occupied(c))
        .map(|c| (c.row as i64, c.col as i64))
        .collect();
    g.cells()
        .map(|c| {
            let occ = grid.is_occupied(c);
            let others = if occ { &free } else { &occupied };
            let (r, k) = (c.row as i64, c.col as i64);
            let best = others.iter().map(|&(a, b)| (a - r).pow(2) + (b - k).pow(2)).min();
            let d = best.map_or(g.diagonal(), |sq| (sq as f64).sqrt() * g.resolution);
            if occ {
                -d
            } else {
                d
            }
        })
        .collect()
}

pub fn random_grid<R: Rng>(rng: &mut R, w: usize, h: usize, p_occupied: f64, res: f64) -> BooleanGrid {
    let g = GridGeometry::new(w, h, res, 0.0, 0.0).unwrap();
    let cells = (0..w * h).map(|_| rng.gen_bool(p_occupied)).collect();
    BooleanGrid::from_cells(g, cells).unwrap()
}

/// Cluttered window: random solid rectangles on a free background.
pub fn random_window<R: Rng>(rng: &mut R, n: usize, res: f64) -> BooleanGrid {
    let g = GridGeometry::new(n, n, res, 0.0, 0.0).unwrap();
    let mut grid = BooleanGrid::free(g);
    for _ in 0..rng.gen_range(4..12) {
        let (h, w) = (rng.gen_range(1..n / 4), rng.gen_range(1..n / 4));
        let (r0, c0) = (rng.gen_range(0..n - h), rng.gen_range(0..n - w));
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                grid.set(Cell::new(r, c), true);
            }
        }
    }
    grid
}

/// Exact `a + b·√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Z2 {
    pub a: i64,
    pub b: i64,
}

impl Z2 {
    pub const ZERO: Z2 = Z2 { a: 0, b: 0 };

    pub fn add(self, o: Z2) -> Z2 {
        Z2 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }

    pub fn sub(self, o: Z2) -> Z2 {
        Z2 {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }

    pub fn signum(self) -> Ordering {
        let (x, y) = (self.a, self.b);
        match (x.cmp(&0), y.cmp(&0)) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (Ordering::Greater, Ordering::Less) => (x * x).cmp(&(2 * y * y)),
            (Ordering::Less, Ordering::Greater) => (2 * y * y).cmp(&(x * x)),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }
}

impl PartialOrd for Z2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Z2 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(*other).signum()
    }
}

/// Exact 8-connected shortest path lengths, in cells, over cells with
/// clearance `>= r_robot`. `None` marks unreachable cells.
pub fn dijkstra(esdf: &EsdfGrid, r_robot: f64, start: Cell) -> Vec<Option<Z2>> {
    let g = *esdf.geometry();
    let ok = |c: Cell| esdf.get(c) >= r_robot;
    let mut dist: Vec<Option<Z2>> = vec![None; g.len()];
    let mut heap = BinaryHeap::new();
    if !ok(start) {
        return dist;
    }
    dist[g.index(start)] = Some(Z2::ZERO);
    heap.push(std::cmp::Reverse((Z2::ZERO, g.index(start))));
    while let Some(std::cmp::Reverse((d, i))) = heap.pop() {
        if dist[i] != Some(d) {
            continue;
        }
        let c = g.cell(i);
        for dr in -1isize..=1 {
            for dc in -1isize..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (r, k) = (c.row as isize + dr, c.col as isize + dc);
                if !g.contains(r, k) {
                    continue;
                }
                let n = Cell::new(r as usize, k as usize);
                if !ok(n) {
                    continue;
                }
                let step = if dr != 0 && dc != 0 { Z2 { a: 0, b: 1 } } else { Z2 { a: 1, b: 0 } };
                let nd = d.add(step);
                let j = g.index(n);
                if dist[j].is_none_or(|old| nd < old) {
                    dist[j] = Some(nd);
                    heap.push(std::cmp::Reverse((nd, j)));
                }
            }
        }
    }
    dist
}

/// Builds a closed world from free rectangles `(x0, y0, x1, y1)` in meters.
pub fn rect_world(name: &str, width_m: f64, height_m: f64, res: f64, free: &[(f64, f64, f64, f64)], start: Pose) -> World {
    let w = (width_m / res).round() as usize;
    let h = (height_m / res).round() as usize;
    let g = GridGeometry::new(w, h, res, 0.0, 0.0).unwrap();
    let cells = g
        .cells()
        .map(|c| {
            if c.row == 0 || c.col == 0 || c.row == h - 1 || c.col == w - 1 {
                return true;
            }
            let (x, y) = g.cell_center(c);
            !free.iter().any(|&(x0, y0, x1, y1)| x >= x0 && x <= x1 && y >= y0 && y <= y1)
        })
        .collect();
    World::new(name, BooleanGrid::from_cells(g, cells).unwrap(), start).unwrap()
}

/// Layout behind one golden end-point scenario.
pub struct ScenarioSetup {
    pub name: &'static str,
    pub world: World,
    pub pose: Pose,
    /// Hand-annotated open region the end-point must land in.
    pub expect_min: Point,
    pub expect_max: Point,
}

/// Straight corridor, corridor turning into open space on the right, and a
/// four-way junction. The robot faces east in every layout.
pub fn scenario_setups() -> Vec<ScenarioSetup> {
    let pose = Pose::new(10.05, 20.05, 0.0, 0.0);
    let corridor = (1.0, 18.55, 39.0, 21.55);
    vec![
        ScenarioSetup {
            name: "straight",
            world: rect_world("straight", 40.0, 40.0, 0.1, &[corridor], pose),
            pose,
            expect_min: Point::new(13.5, 19.0),
            expect_max: Point::new(15.5, 21.1),
        },
        ScenarioSetup {
            name: "right_open",
            // The corridor ends in a wall 6 m ahead; a large room opens on
            // the right from 1 m ahead onwards.
            world: rect_world(
                "right_open",
                40.0,
                40.0,
                0.1,
                &[(1.0, 18.55, 16.0, 21.55), (11.0, 1.0, 39.0, 18.6)],
                pose,
            ),
            pose,
            expect_min: Point::new(11.0, 14.5),
            expect_max: Point::new(16.0, 19.6),
        },
        ScenarioSetup {
            name: "four_way_junction",
            world: rect_world(
                "four_way_junction",
                40.0,
                40.0,
                0.1,
                &[corridor, (11.55, 1.0, 14.55, 39.0)],
                Pose::new(13.05, 20.05, 0.0, 0.0),
            ),
            pose: Pose::new(13.05, 20.05, 0.0, 0.0),
            expect_min: Point::new(16.5, 19.0),
            expect_max: Point::new(18.5, 21.1),
        },
    ]
}

/// Landmarks of the bundled fork map, in map meters.
pub mod fork {
    /// Where the right stub and the left branch split.
    pub const FORK: (f64, f64) = (24.928, 11.019);
    /// Blocked end of the right stub.
    pub const RIGHT_END: (f64, f64) = (31.928, 11.019);
    /// Where the left branch starts to bend.
    pub const LEFT_BEND: (f64, f64) = (34.928, 28.340);
}
