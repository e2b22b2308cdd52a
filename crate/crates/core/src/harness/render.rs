//! Grayscale PGM renders of maps, trajectories and distance fields.

use std::path::Path;

use crate::endpoint::Point;
use crate::error::{Error, Result};
use crate::grid::{io, BooleanGrid, EsdfGrid, GridGeometry};
use crate::sim::EpisodeLog;

/// Gray level of drawn paths and trajectories.
pub const PATH_GRAY: u8 = 128;
/// Gray level of the start marker.
pub const START_GRAY: u8 = 64;

/// Top-down image, free cells white and obstacles black.
pub fn world_image(grid: &BooleanGrid) -> Vec<u8> {
    let g = grid.geometry();
    let bottom_up = grid.cells().iter().map(|&occ| if occ { 0 } else { 255 }).collect();
    io::flip_rows(g.width, g.height, bottom_up)
}

/// Draws a polyline into a top-down image. Segments are sampled at half a
/// cell so consecutive points connect.
pub fn draw_points(image: &mut [u8], geometry: &GridGeometry, points: &[Point], gray: u8) {
    let mut plot = |x: f64, y: f64| {
        if let Some(c) = geometry.world_to_cell(x, y) {
            image[(geometry.height - 1 - c.row) * geometry.width + c.col] = gray;
        }
    };
    for w in points.windows(2) {
        let steps = (w[0].distance(&w[1]) / (0.5 * geometry.resolution)).ceil().max(1.0) as usize;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            plot(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y));
        }
    }
    if let [p] = points {
        plot(p.x, p.y);
    }
}

/// Distance field render with a path drawn on top.
pub fn esdf_overlay(esdf: &EsdfGrid, d_safe: f64, path: &[Point]) -> Vec<u8> {
    let mut image = io::esdf_to_image(esdf, d_safe);
    draw_points(&mut image, esdf.geometry(), path, PATH_GRAY);
    image
}

/// Robot positions from an episode CSV.
pub fn parse_trajectory(source: &str, text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.starts_with("tick,") || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != EpisodeLog::CSV_HEADER.split(',').count() {
            return Err(Error::parse(source, idx + 1, format!("expected episode row, got {} fields", fields.len())));
        }
        let num = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad number {:?}", fields[i])))
        };
        out.push(Point::new(num(3)?, num(4)?));
    }
    Ok(out)
}

/// Writes a top-down image with the occupancy sidecar, so renders of maps
/// load back as maps.
pub fn write_image_pgm(geometry: &GridGeometry, top_down: &[u8], path: &Path) -> Result<()> {
    io::write_file(path, &io::encode_pgm(geometry.width, geometry.height, top_down))?;
    let meta = format!(
        "resolution = {}\norigin_x = {}\norigin_y = {}\n",
        geometry.resolution, geometry.origin_x, geometry.origin_y
    );
    io::write_file(&io::sidecar_path(path), meta.as_bytes())
}
