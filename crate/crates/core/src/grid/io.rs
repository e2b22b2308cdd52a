//! Map and distance-field files.
//!
//! Occupancy maps are binary PGM (`P5`, maxval 255) with the usual map-server
//! shading: 0 is certainly occupied, 255 certainly free and 205 unknown. Other
//! gray levels map linearly onto `[0, 100]`. Resolution and origin live in a
//! sidecar `key = value` file next to the image (`map.pgm` → `map.meta`).
//! Images are stored top row first, i.e. the highest grid row first.

use std::path::{Path, PathBuf};

use super::{EsdfGrid, GridGeometry, OccupancyGrid, UNKNOWN};
use crate::config::KeyValues;
use crate::error::{Error, Result};

/// Gray level used for unknown cells.
pub const PGM_UNKNOWN: u8 = 205;

pub fn probability_to_gray(value: u8) -> u8 {
    if value == UNKNOWN {
        PGM_UNKNOWN
    } else {
        255 - ((f64::from(value) * 2.55).round() as u8)
    }
}

pub fn gray_to_probability(gray: u8) -> u8 {
    if gray == PGM_UNKNOWN {
        UNKNOWN
    } else {
        (f64::from(255 - gray) / 2.55).round() as u8
    }
}

/// Encodes a grayscale image given in top-down row order.
pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Decodes a binary PGM, returning `(width, height, top-down pixels)`.
pub fn decode_pgm(source: &str, bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut pos = 0;
    let mut line = 1;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        // Skip whitespace and comments.
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b'\n' => {
                    line += 1;
                    pos += 1;
                }
                b if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::parse(source, line, format!("truncated header at byte {pos}")));
        }
        tokens.push((String::from_utf8_lossy(&bytes[start..pos]).into_owned(), line));
    }
    if tokens[0].0 != "P5" {
        return Err(Error::parse(source, 1, format!("expected magic P5, got {:?}", tokens[0].0)));
    }
    let num = |i: usize| -> Result<usize> {
        tokens[i]
            .0
            .parse()
            .map_err(|_| Error::parse(source, tokens[i].1, format!("bad header field {:?}", tokens[i].0)))
    };
    let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
    if maxval != 255 {
        return Err(Error::parse(source, tokens[3].1, format!("maxval must be 255, got {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::parse(source, tokens[1].1, "zero image dimension"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = width * height;
    let data = bytes.get(pos..).unwrap_or(&[]);
    if data.len() < need {
        return Err(Error::parse(
            source,
            line,
            format!("raster truncated at byte {}: need {need} bytes, have {}", bytes.len(), data.len()),
        ));
    }
    Ok((width, height, data[..need].to_vec()))
}

pub fn sidecar_path(image: &Path) -> PathBuf {
    image.with_extension("meta")
}

/// Reads an occupancy PGM and its sidecar.
pub fn read_occupancy_pgm(path: &Path) -> Result<OccupancyGrid> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let (width, height, pixels) = decode_pgm(&path.display().to_string(), &bytes)?;
    let meta = KeyValues::read(&sidecar_path(path))?;
    let field = |key: &str, default: Option<f64>| -> Result<f64> {
        match meta.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::parse(&meta.source, 0, format!("bad value for {key}: {v:?}"))),
            None => default.ok_or_else(|| Error::parse(&meta.source, 0, format!("missing {key}"))),
        }
    };
    let geometry = GridGeometry::new(
        width,
        height,
        field("resolution", None)?,
        field("origin_x", Some(0.0))?,
        field("origin_y", Some(0.0))?,
    )?;
    occupancy_from_image(geometry, &pixels)
}

pub fn occupancy_from_image(geometry: GridGeometry, top_down: &[u8]) -> Result<OccupancyGrid> {
    let (w, h) = (geometry.width, geometry.height);
    let mut cells = vec![UNKNOWN; w * h];
    for (img_row, chunk) in top_down.chunks_exact(w).enumerate() {
        let row = h - 1 - img_row;
        for (col, &gray) in chunk.iter().enumerate() {
            cells[row * w + col] = gray_to_probability(gray);
        }
    }
    OccupancyGrid::from_cells(geometry, cells)
}

/// Top-down grayscale rendering of an occupancy grid.
pub fn occupancy_to_image(grid: &OccupancyGrid) -> Vec<u8> {
    let g = grid.geometry();
    flip_rows(g.width, g.height, grid.cells().iter().map(|&v| probability_to_gray(v)).collect())
}

pub fn write_occupancy_pgm(grid: &OccupancyGrid, path: &Path) -> Result<()> {
    let g = grid.geometry();
    write_file(path, &encode_pgm(g.width, g.height, &occupancy_to_image(grid)))?;
    let meta = format!(
        "resolution = {}\norigin_x = {}\norigin_y = {}\n",
        g.resolution, g.origin_x, g.origin_y
    );
    write_file(&sidecar_path(path), meta.as_bytes())
}

/// Maps signed distance onto gray levels: `-d_safe` and below is black,
/// `2·d_safe` and above is white.
pub fn esdf_to_image(esdf: &EsdfGrid, d_safe: f64) -> Vec<u8> {
    let g = esdf.geometry();
    let (lo, hi) = (-d_safe, 2.0 * d_safe);
    let pixels = esdf
        .cells()
        .iter()
        .map(|&d| ((d.clamp(lo, hi) - lo) / (hi - lo) * 255.0).round() as u8)
        .collect();
    flip_rows(g.width, g.height, pixels)
}

pub fn write_esdf_pgm(esdf: &EsdfGrid, d_safe: f64, path: &Path) -> Result<()> {
    let g = esdf.geometry();
    write_file(path, &encode_pgm(g.width, g.height, &esdf_to_image(esdf, d_safe)))
}

/// Distance CSV: a `#` metadata line, then one line per grid row, row 0 first.
pub fn esdf_to_csv(esdf: &EsdfGrid) -> String {
    let g = esdf.geometry();
    let mut out = format!(
        "# esdf width={} height={} resolution={} origin_x={} origin_y={}\n",
        g.width, g.height, g.resolution, g.origin_x, g.origin_y
    );
    for row in esdf.cells().chunks_exact(g.width) {
        let line: Vec<String> = row.iter().map(|d| format!("{d}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_esdf_csv(source: &str, text: &str) -> Result<EsdfGrid> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(source, 1, "empty file"))?;
    let header = header
        .strip_prefix("# esdf")
        .ok_or_else(|| Error::parse(source, 1, "missing `# esdf` header"))?;
    let mut meta = std::collections::HashMap::new();
    for pair in header.split_whitespace() {
        if let Some((k, v)) = pair.split_once('=') {
            meta.insert(k, v);
        }
    }
    let get = |k: &str| -> Result<&str> {
        meta.get(k)
            .copied()
            .ok_or_else(|| Error::parse(source, 1, format!("header lacks {k}")))
    };
    let bad = |k: &str| Error::parse(source, 1, format!("bad header value for {k}"));
    let geometry = GridGeometry::new(
        get("width")?.parse().map_err(|_| bad("width"))?,
        get("height")?.parse().map_err(|_| bad("height"))?,
        get("resolution")?.parse().map_err(|_| bad("resolution"))?,
        get("origin_x")?.parse().map_err(|_| bad("origin_x"))?,
        get("origin_y")?.parse().map_err(|_| bad("origin_y"))?,
    )?;

    let mut cells = Vec::with_capacity(geometry.len());
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let before = cells.len();
        for tok in line.split(',') {
            cells.push(
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(source, idx + 1, format!("bad distance {tok:?}")))?,
            );
        }
        if cells.len() - before != geometry.width {
            return Err(Error::parse(
                source,
                idx + 1,
                format!("expected {} values, got {}", geometry.width, cells.len() - before),
            ));
        }
    }
    EsdfGrid::from_cells(geometry, cells)
}

pub fn write_esdf_csv(esdf: &EsdfGrid, path: &Path) -> Result<()> {
    write_file(path, esdf_to_csv(esdf).as_bytes())
}

pub fn read_esdf_csv(path: &Path) -> Result<EsdfGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_esdf_csv(&path.display().to_string(), &text)
}

pub(crate) fn flip_rows(width: usize, height: usize, bottom_up: Vec<u8>) -> Vec<u8> {
    let mut out = Vec::with_capacity(bottom_up.len());
    for row in (0..height).rev() {
        out.extend_from_slice(&bottom_up[row * width..(row + 1) * width]);
    }
    out
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
