//! Occupancy grids, their boolean thresholding, local-map windows and the
//! Euclidean signed distance transform.
//!
//! All grids share a [`GridGeometry`]: cell `(row, col)` covers the square
//! `[origin_x + col·r, origin_x + (col+1)·r) × [origin_y + row·r, origin_y + (row+1)·r)`,
//! so row 0 is the southern edge and rows grow with `y`. File loaders flip
//! image rows accordingly.

mod edt;
pub mod io;
mod window;

pub use edt::signed_distance_transform;
pub use window::{extract_local_window, LocalMapWindow};

use crate::error::{Error, Result};

/// Occupancy value marking a cell that has never been observed.
pub const UNKNOWN: u8 = u8::MAX;

/// Highest occupancy probability.
pub const MAX_PROBABILITY: u8 = 100;

/// Grid cell index. Ordering is row-major, which the planner uses as its final tie-break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Dimensions and placement of a grid in the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub width: usize,
    pub height: usize,
    /// Meters per cell.
    pub resolution: f64,
    /// World x of the outer corner of cell (0, 0).
    pub origin_x: f64,
    /// World y of the outer corner of cell (0, 0).
    pub origin_y: f64,
}

impl GridGeometry {
    pub fn new(width: usize, height: usize, resolution: f64, origin_x: f64, origin_y: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!("dimensions must be positive, got {width}x{height}")));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidGrid(format!("resolution must be positive, got {resolution}")));
        }
        if !origin_x.is_finite() || !origin_y.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin_x,
            origin_y,
        })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.width + cell.col
    }

    #[inline]
    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index / self.width, index % self.width)
    }

    #[inline]
    pub fn contains(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.height && (col as usize) < self.width
    }

    /// Signed cell coordinates of a world point; may lie outside the grid.
    #[inline]
    pub fn world_to_grid(&self, x: f64, y: f64) -> (isize, isize) {
        let row = ((y - self.origin_y) / self.resolution).floor() as isize;
        let col = ((x - self.origin_x) / self.resolution).floor() as isize;
        (row, col)
    }

    pub fn world_to_cell(&self, x: f64, y: f64) -> Option<Cell> {
        let (row, col) = self.world_to_grid(x, y);
        self.contains(row, col).then(|| Cell::new(row as usize, col as usize))
    }

    /// World coordinates of a cell center.
    #[inline]
    pub fn cell_center(&self, cell: Cell) -> (f64, f64) {
        (
            self.origin_x + (cell.col as f64 + 0.5) * self.resolution,
            self.origin_y + (cell.row as f64 + 0.5) * self.resolution,
        )
    }

    /// Length of the grid diagonal, meters.
    pub fn diagonal(&self) -> f64 {
        ((self.width * self.width + self.height * self.height) as f64).sqrt() * self.resolution
    }

    /// Euclidean center-to-center distance between two cells, meters.
    pub fn cell_distance(&self, a: Cell, b: Cell) -> f64 {
        let dr = a.row.abs_diff(b.row);
        let dc = a.col.abs_diff(b.col);
        ((dr * dr + dc * dc) as f64).sqrt() * self.resolution
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |row| (0..self.width).map(move |col| Cell::new(row, col)))
    }
}

/// Per-cell occupancy probability in `[0, 100]`, or [`UNKNOWN`].
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    geometry: GridGeometry,
    cells: Vec<u8>,
}

impl OccupancyGrid {
    /// A grid with every cell unobserved.
    pub fn unknown(geometry: GridGeometry) -> Self {
        Self {
            cells: vec![UNKNOWN; geometry.len()],
            geometry,
        }
    }

    pub fn from_cells(geometry: GridGeometry, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != geometry.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells, got {}",
                geometry.len(),
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&v| v != UNKNOWN && v > MAX_PROBABILITY) {
            return Err(Error::InvalidGrid(format!("occupancy value {bad} outside [0, 100]")));
        }
        Ok(Self { geometry, cells })
    }

    /// Known grid with probability 100 on occupied cells and 0 elsewhere.
    pub fn from_boolean(grid: &BooleanGrid) -> Self {
        Self {
            geometry: grid.geometry,
            cells: grid
                .cells()
                .iter()
                .map(|&occ| if occ { MAX_PROBABILITY } else { 0 })
                .collect(),
        }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, cell: Cell) -> u8 {
        self.cells[self.geometry.index(cell)]
    }

    /// Probability of a known cell, `None` if unobserved.
    pub fn probability(&self, cell: Cell) -> Option<u8> {
        let v = self.get(cell);
        (v != UNKNOWN).then_some(v)
    }

    pub fn is_known(&self, cell: Cell) -> bool {
        self.get(cell) != UNKNOWN
    }

    pub fn set(&mut self, cell: Cell, value: u8) {
        assert!(value == UNKNOWN || value <= MAX_PROBABILITY, "occupancy {value} outside [0, 100]");
        let idx = self.geometry.index(cell);
        self.cells[idx] = value;
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|&&v| v != UNKNOWN).count()
    }
}

/// Obstacle mask: `true` marks an occupied cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanGrid {
    geometry: GridGeometry,
    cells: Vec<bool>,
}

impl BooleanGrid {
    pub fn free(geometry: GridGeometry) -> Self {
        Self {
            cells: vec![false; geometry.len()],
            geometry,
        }
    }

    pub fn from_cells(geometry: GridGeometry, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != geometry.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells, got {}",
                geometry.len(),
                cells.len()
            )));
        }
        Ok(Self { geometry, cells })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn is_occupied(&self, cell: Cell) -> bool {
        self.cells[self.geometry.index(cell)]
    }

    pub fn set(&mut self, cell: Cell, occupied: bool) {
        let idx = self.geometry.index(cell);
        self.cells[idx] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Signed distance to the nearest cell of the opposite class, meters.
///
/// Free cells hold positive distances to the nearest occupied cell center,
/// occupied cells hold the negated distance to the nearest free cell center.
/// When one class is absent every cell holds `±geometry.diagonal()`.
#[derive(Debug, Clone, PartialEq)]
pub struct EsdfGrid {
    geometry: GridGeometry,
    cells: Vec<f64>,
}

impl EsdfGrid {
    pub fn from_cells(geometry: GridGeometry, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != geometry.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells, got {}",
                geometry.len(),
                cells.len()
            )));
        }
        Ok(Self { geometry, cells })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, cell: Cell) -> f64 {
        self.cells[self.geometry.index(cell)]
    }

    /// Distance at a world point, `None` outside the grid.
    pub fn at_world(&self, x: f64, y: f64) -> Option<f64> {
        self.geometry.world_to_cell(x, y).map(|c| self.get(c))
    }

    /// Distance reported when the grid contains no obstacle.
    pub fn free_sentinel(&self) -> f64 {
        self.geometry.diagonal()
    }
}

/// Marks cells whose probability is strictly above `threshold` as occupied.
/// Unobserved cells are free, so planning may extend into unmapped space.
pub fn threshold_occupancy(grid: &OccupancyGrid, threshold: f64) -> BooleanGrid {
    BooleanGrid {
        geometry: grid.geometry,
        cells: grid
            .cells
            .iter()
            .map(|&v| v != UNKNOWN && f64::from(v) > threshold)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geom(w: usize, h: usize) -> GridGeometry {
        GridGeometry::new(w, h, 0.1, 0.0, 0.0).unwrap()
    }

    #[test]
    fn threshold_is_strict() {
        let mut grid = OccupancyGrid::unknown(geom(3, 1));
        grid.set(Cell::new(0, 0), 71);
        grid.set(Cell::new(0, 1), 70);
        let b = threshold_occupancy(&grid, 70.0);
        assert!(b.is_occupied(Cell::new(0, 0)));
        assert!(!b.is_occupied(Cell::new(0, 1)));
        assert!(!b.is_occupied(Cell::new(0, 2)));
    }

    #[test]
    fn unknown_grid_thresholds_to_free() {
        let grid = OccupancyGrid::unknown(geom(10, 10));
        let b = threshold_occupancy(&grid, 70.0);
        assert_eq!(b.occupied_count(), 0);
        assert_eq!(b.geometry(), grid.geometry());
    }

    #[test]
    fn rejects_bad_geometry_and_values() {
        assert!(GridGeometry::new(0, 4, 0.1, 0.0, 0.0).is_err());
        assert!(GridGeometry::new(4, 4, 0.0, 0.0, 0.0).is_err());
        assert!(OccupancyGrid::from_cells(geom(2, 1), vec![0, 101]).is_err());
        assert!(OccupancyGrid::from_cells(geom(2, 1), vec![0]).is_err());
        assert!(OccupancyGrid::from_cells(geom(2, 1), vec![UNKNOWN, 100]).is_ok());
    }

    proptest! {
        #[test]
        fn world_cell_round_trip(
            w in 1usize..200, h in 1usize..200,
            res in 0.01f64..2.0,
            ox in -50.0f64..50.0, oy in -50.0f64..50.0,
            fr in 0.0f64..1.0, fc in 0.0f64..1.0,
        ) {
            let g = GridGeometry::new(w, h, res, ox, oy).unwrap();
            let cell = Cell::new(((h as f64) * fr) as usize % h, ((w as f64) * fc) as usize % w);
            let (x, y) = g.cell_center(cell);
            prop_assert_eq!(g.world_to_cell(x, y), Some(cell));
            let (cx, cy) = g.cell_center(g.world_to_cell(x, y).unwrap());
            prop_assert!((cx - x).abs() < res / 2.0 && (cy - y).abs() < res / 2.0);
        }
    }
}
