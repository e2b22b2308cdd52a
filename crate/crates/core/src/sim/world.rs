//! Ground-truth worlds.
//!
//! ASCII maps use one character per cell: `#` occupied, `.` free and `S` the
//! free start cell. The first map line is the northern (highest) row. Lines
//! starting with `;` are comments, and `; key = value` comments set
//! `resolution` (meters) and `start_yaw_deg`.

use std::path::Path;
use std::sync::OnceLock;

use crate::endpoint::Pose;
use crate::error::{Error, Result};
use crate::grid::{io, signed_distance_transform, BooleanGrid, Cell, EsdfGrid, GridGeometry};

/// Closed world with a known start pose.
#[derive(Debug)]
pub struct World {
    pub name: String,
    truth: BooleanGrid,
    pub start: Pose,
    truth_esdf: OnceLock<EsdfGrid>,
}

impl Clone for World {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            truth: self.truth.clone(),
            start: self.start,
            truth_esdf: self.truth_esdf.clone(),
        }
    }
}

pub const BUILTIN_MAPS: [&str; 5] = ["corridor", "dead_end", "junction", "pillars", "tunnel_fork"];

fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "corridor" => include_str!("../../maps/corridor.txt"),
        "dead_end" => include_str!("../../maps/dead_end.txt"),
        "junction" => include_str!("../../maps/junction.txt"),
        "pillars" => include_str!("../../maps/pillars.txt"),
        "tunnel_fork" => include_str!("../../maps/tunnel_fork.txt"),
        _ => return None,
    })
}

impl World {
    /// Wraps an obstacle mask. Cells on the grid border must be occupied.
    pub fn new(name: impl Into<String>, truth: BooleanGrid, start: Pose) -> Result<Self> {
        let g = *truth.geometry();
        let border = (0..g.width)
            .flat_map(|c| [Cell::new(0, c), Cell::new(g.height - 1, c)])
            .chain((0..g.height).flat_map(|r| [Cell::new(r, 0), Cell::new(r, g.width - 1)]));
        for cell in border {
            if !truth.is_occupied(cell) {
                return Err(Error::InvalidGrid(format!(
                    "world is not closed: border cell ({}, {}) is free",
                    cell.row, cell.col
                )));
            }
        }
        match g.world_to_cell(start.x, start.y) {
            Some(c) if !truth.is_occupied(c) => {}
            _ => {
                return Err(Error::InvalidPose {
                    x: start.x,
                    y: start.y,
                    reason: "start is not in free space".into(),
                })
            }
        }
        Ok(Self {
            name: name.into(),
            truth,
            start,
            truth_esdf: OnceLock::new(),
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let text = builtin_text(name).ok_or_else(|| {
            Error::Config(format!("unknown builtin map {name:?}, expected one of {BUILTIN_MAPS:?}"))
        })?;
        Self::parse_ascii(name, text)
    }

    /// Loads `builtin:<name>`, an ASCII map or a PGM world (with sidecar).
    /// PGM worlds treat unknown and >50 % cells as occupied and take their
    /// start from the caller; for ASCII maps a given start overrides `S`.
    pub fn load(spec: &str, pgm_start: Option<Pose>) -> Result<Self> {
        if let Some(name) = spec.strip_prefix("builtin:") {
            return Self::builtin(name);
        }
        let path = Path::new(spec);
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
            let grid = io::read_occupancy_pgm(path)?;
            let cells = grid.cells().iter().map(|&v| v == crate::grid::UNKNOWN || v > 50).collect();
            let truth = BooleanGrid::from_cells(*grid.geometry(), cells)?;
            let start = pgm_start.ok_or_else(|| Error::Config(format!("{spec}: PGM worlds need an explicit start")))?;
            return Self::new(name, truth, start);
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let map = parse_ascii_grid(spec, &text)?;
        let start = pgm_start
            .or(map.start)
            .ok_or_else(|| Error::parse(spec, map.last_line, "no start cell `S`"))?;
        Self::new(name, map.grid, start)
    }

    pub fn parse_ascii(source: &str, text: &str) -> Result<Self> {
        let map = parse_ascii_grid(source, text)?;
        let start = map
            .start
            .ok_or_else(|| Error::parse(source, map.last_line, "no start cell `S`"))?;
        let name = Path::new(source)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::new(name, map.grid, start)
    }

    pub fn to_ascii(&self) -> String {
        let g = self.geometry();
        let start = g.world_to_cell(self.start.x, self.start.y);
        let mut out = format!(
            "; resolution = {}\n; start_yaw_deg = {}\n",
            g.resolution,
            self.start.yaw.to_degrees()
        );
        for row in (0..g.height).rev() {
            for col in 0..g.width {
                let cell = Cell::new(row, col);
                out.push(if Some(cell) == start {
                    'S'
                } else if self.truth.is_occupied(cell) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }

    pub fn truth(&self) -> &BooleanGrid {
        &self.truth
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.truth.geometry()
    }

    pub fn resolution(&self) -> f64 {
        self.geometry().resolution
    }

    /// Signed distance field of the true obstacles, computed on first use.
    pub fn truth_esdf(&self) -> &EsdfGrid {
        self.truth_esdf.get_or_init(|| signed_distance_transform(&self.truth))
    }

    pub fn is_free_at(&self, x: f64, y: f64) -> bool {
        self.geometry()
            .world_to_cell(x, y)
            .is_some_and(|c| !self.truth.is_occupied(c))
    }

    pub fn free_cell_count(&self) -> usize {
        self.geometry().len() - self.truth.occupied_count()
    }
}

/// Obstacle mask and optional start of an ASCII map, before the closed-world
/// checks of [`World::new`].
#[derive(Debug, Clone)]
pub struct AsciiMap {
    pub grid: BooleanGrid,
    pub start: Option<Pose>,
    last_line: usize,
}

pub fn parse_ascii_grid(source: &str, text: &str) -> Result<AsciiMap> {
    let mut resolution = 0.1;
    let mut yaw_deg = 0.0;
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some(comment) = line.strip_prefix(';') {
            if let Some((k, v)) = comment.split_once('=') {
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(source, idx + 1, format!("bad number {:?}", v.trim())))
                };
                match k.trim() {
                    "resolution" => resolution = parse(v)?,
                    "start_yaw_deg" => yaw_deg = parse(v)?,
                    _ => {}
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        rows.push((idx + 1, line));
    }
    let (first_line, first) = *rows.first().ok_or_else(|| Error::parse(source, 1, "map has no rows"))?;
    let width = first.chars().count();
    let height = rows.len();
    let geometry = GridGeometry::new(width, height, resolution, 0.0, 0.0)?;
    let mut cells = vec![true; width * height];
    let mut start = None;
    for (i, &(line_no, line)) in rows.iter().enumerate() {
        if line.chars().count() != width {
            return Err(Error::parse(
                source,
                line_no,
                format!("row has {} cells, expected {width} (from line {first_line})", line.chars().count()),
            ));
        }
        let row = height - 1 - i;
        for (col, ch) in line.chars().enumerate() {
            cells[row * width + col] = match ch {
                '#' => true,
                '.' => false,
                'S' => {
                    if start.replace(Cell::new(row, col)).is_some() {
                        return Err(Error::parse(source, line_no, "more than one start cell"));
                    }
                    false
                }
                other => {
                    return Err(Error::parse(
                        source,
                        line_no,
                        format!("unexpected character {other:?} at column {}", col + 1),
                    ))
                }
            };
        }
    }
    let start = start.map(|c| {
        let (x, y) = geometry.cell_center(c);
        Pose::new(x, y, 0.0, yaw_deg.to_radians())
    });
    Ok(AsciiMap {
        grid: BooleanGrid::from_cells(geometry, cells)?,
        start,
        last_line: rows.last().map_or(1, |r| r.0),
    })
}
