use super::{Cell, GridGeometry, OccupancyGrid, UNKNOWN};
use crate::endpoint::Pose;
use crate::error::{Error, Result};

/// Fixed-size square of the occupancy map around the robot.
///
/// The window keeps the parent's resolution and cell alignment. Cells that fall
/// outside the parent are [`UNKNOWN`], so the cell count only depends on the
/// requested side lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMapWindow {
    /// Extent along x, meters.
    pub side_length: f64,
    /// Extent along y, meters.
    pub side_width: f64,
    /// Vertical extent, meters. Not used by the planar planner.
    pub side_height: f64,
    pub center: Pose,
    /// Parent cell coordinates of the window's cell (0, 0).
    pub row_offset: isize,
    pub col_offset: isize,
    pub view: OccupancyGrid,
}

impl LocalMapWindow {
    pub fn geometry(&self) -> &GridGeometry {
        self.view.geometry()
    }

    /// Parent cell under a window cell, `None` if it lies outside the parent.
    pub fn to_parent(&self, cell: Cell, parent: &GridGeometry) -> Option<Cell> {
        let row = cell.row as isize + self.row_offset;
        let col = cell.col as isize + self.col_offset;
        parent.contains(row, col).then(|| Cell::new(row as usize, col as usize))
    }

    /// Window cell under a parent cell, `None` if outside the window.
    pub fn from_parent(&self, cell: Cell) -> Option<Cell> {
        let row = cell.row as isize - self.row_offset;
        let col = cell.col as isize - self.col_offset;
        self.geometry().contains(row, col).then(|| Cell::new(row as usize, col as usize))
    }
}

/// Copies the `side_length × side_width` meter rectangle centred on `center` out of `grid`.
pub fn extract_local_window(
    grid: &OccupancyGrid,
    center: &Pose,
    side_length: f64,
    side_width: f64,
) -> Result<LocalMapWindow> {
    if !(side_length > 0.0 && side_width > 0.0) {
        return Err(Error::Config(format!(
            "window sides must be positive, got {side_length} x {side_width}"
        )));
    }
    let parent = grid.geometry();
    let center_cell = parent.world_to_cell(center.x, center.y).ok_or_else(|| Error::InvalidPose {
        x: center.x,
        y: center.y,
        reason: "outside the map".into(),
    })?;

    let r = parent.resolution;
    let cols = ((side_length / r).round() as usize).max(1);
    let rows = ((side_width / r).round() as usize).max(1);
    let row_offset = center_cell.row as isize - (rows / 2) as isize;
    let col_offset = center_cell.col as isize - (cols / 2) as isize;

    let geometry = GridGeometry::new(
        cols,
        rows,
        r,
        parent.origin_x + col_offset as f64 * r,
        parent.origin_y + row_offset as f64 * r,
    )?;

    let mut cells = vec![UNKNOWN; rows * cols];
    // Column span shared by every row that intersects the parent.
    let c_lo = col_offset.max(0);
    let c_hi = (col_offset + cols as isize).min(parent.width as isize);
    if c_lo < c_hi {
        let src = grid.cells();
        for wr in 0..rows {
            let pr = row_offset + wr as isize;
            if pr < 0 || pr >= parent.height as isize {
                continue;
            }
            let src_start = pr as usize * parent.width + c_lo as usize;
            let len = (c_hi - c_lo) as usize;
            let dst_start = wr * cols + (c_lo - col_offset) as usize;
            cells[dst_start..dst_start + len].copy_from_slice(&src[src_start..src_start + len]);
        }
    }

    Ok(LocalMapWindow {
        side_length,
        side_width,
        side_height: 0.0,
        center: *center,
        row_offset,
        col_offset,
        view: OccupancyGrid::from_cells(geometry, cells)?,
    })
}
