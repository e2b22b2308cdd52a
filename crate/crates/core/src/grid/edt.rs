//! Exact Euclidean signed distance transform.
//!
//! Two passes of the lower-envelope-of-parabolas squared distance transform
//! (columns, then rows) run once for each class of cell. Squared distances are
//! kept as exact integers in cell units and only scaled to meters at the end,
//! so results are bit-identical to a brute-force nearest-cell search.

use super::{BooleanGrid, EsdfGrid, GridGeometry};

/// Squared distance marker for "no feature in reach".
const INF: i64 = i64::MAX / 4;

/// Computes the signed distance field of an obstacle mask.
///
/// Free cells receive the distance to the nearest occupied cell center;
/// occupied cells receive the negated distance to the nearest free cell center.
/// If a class is missing entirely, distances saturate at `±diagonal`.
pub fn signed_distance_transform(grid: &BooleanGrid) -> EsdfGrid {
    let geometry = *grid.geometry();
    let to_occupied = squared_edt(&geometry, grid.cells(), true);
    let to_free = squared_edt(&geometry, grid.cells(), false);
    let sentinel = geometry.diagonal();
    let r = geometry.resolution;

    let cells = grid
        .cells()
        .iter()
        .enumerate()
        .map(|(i, &occupied)| {
            if occupied {
                match to_free[i] {
                    INF => -sentinel,
                    sq => -(sq as f64).sqrt() * r,
                }
            } else {
                match to_occupied[i] {
                    INF => sentinel,
                    sq => (sq as f64).sqrt() * r,
                }
            }
        })
        .collect();

    EsdfGrid { geometry, cells }
}

/// Squared distance, in cells², from every cell to the nearest cell whose value equals `target`.
fn squared_edt(geometry: &GridGeometry, cells: &[bool], target: bool) -> Vec<i64> {
    let (w, h) = (geometry.width, geometry.height);
    let mut dist: Vec<i64> = cells.iter().map(|&c| if c == target { 0 } else { INF }).collect();

    let n = w.max(h);
    let mut f = vec![0i64; n];
    let mut out = vec![0i64; n];
    let mut env = Envelope::with_capacity(n);

    for col in 0..w {
        for row in 0..h {
            f[row] = dist[row * w + col];
        }
        env.transform(&f[..h], &mut out[..h]);
        for row in 0..h {
            dist[row * w + col] = out[row];
        }
    }
    for row in 0..h {
        f[..w].copy_from_slice(&dist[row * w..(row + 1) * w]);
        env.transform(&f[..w], &mut out[..w]);
        dist[row * w..(row + 1) * w].copy_from_slice(&out[..w]);
    }
    dist
}

struct Envelope {
    /// Abscissae of the parabolas in the envelope.
    v: Vec<usize>,
    /// Boundaries between consecutive parabolas.
    z: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            v: Vec::with_capacity(n),
            z: Vec::with_capacity(n + 1),
        }
    }

    /// One-dimensional squared distance transform `out[q] = min_p f[p] + (q - p)²`.
    /// Sites with `f[p] == INF` are skipped; if all are, `out` is filled with `INF`.
    #[allow(clippy::needless_range_loop)]
    fn transform(&mut self, f: &[i64], out: &mut [i64]) {
        self.v.clear();
        self.z.clear();

        let parabola = |p: usize| f[p] + (p * p) as i64;
        for q in 0..f.len() {
            if f[q] >= INF {
                continue;
            }
            if self.v.is_empty() {
                self.v.push(q);
                self.z.push(f64::NEG_INFINITY);
                continue;
            }
            loop {
                let p = *self.v.last().unwrap();
                let s = (parabola(q) - parabola(p)) as f64 / (2 * (q - p)) as f64;
                if s <= *self.z.last().unwrap() {
                    self.v.pop();
                    self.z.pop();
                    if self.v.is_empty() {
                        break;
                    }
                } else {
                    self.z.push(s);
                    break;
                }
            }
            if self.v.is_empty() {
                self.z.push(f64::NEG_INFINITY);
            }
            self.v.push(q);
        }

        if self.v.is_empty() {
            out.fill(INF);
            return;
        }

        let mut k = 0;
        for (q, slot) in out.iter_mut().enumerate() {
            while k + 1 < self.v.len() && self.z[k + 1] < q as f64 {
                k += 1;
            }
            let p = self.v[k];
            let d = q.abs_diff(p) as i64;
            *slot = f[p] + d * d;
        }
    }
}
