use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::solv::piece_length;
use crate::{Error, Result};

/// Axis-aligned box for the grid oracle, in developed coordinates.
#[derive(Debug, Clone, Copy)]
pub struct OracleBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl OracleBox {
    /// Smallest box containing all the given points, padded on every side.
    pub fn around(points: &[[f64; 3]], pad_xy: f64, pad_z: f64) -> OracleBox {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        OracleBox {
            x: (lo[0] - pad_xy, hi[0] + pad_xy),
            y: (lo[1] - pad_xy, hi[1] + pad_xy),
            z: (lo[2] - pad_z, hi[2] + pad_z),
        }
    }

    fn contains(&self, p: [f64; 3]) -> bool {
        p[0] >= self.x.0
            && p[0] <= self.x.1
            && p[1] >= self.y.0
            && p[1] <= self.y.1
            && p[2] >= self.z.0
            && p[2] <= self.z.1
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other.cost.partial_cmp(&self.cost).unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest grid-path length between `p` and `q` in the solv metric
/// `k^{2z} dx^2 + k^{-2z} dy^2 + (log k)^2 dz^2`, over the 26-neighbor grid
/// graph on `bx` at the given resolution. Edge weights are the exact metric
/// lengths of the straight edges (Gauss-Legendre), so refining the grid can
/// only shorten paths; the value upper-bounds the continuum distance and
/// converges to it from above.
pub fn solv_distance_oracle(
    p: [f64; 3],
    q: [f64; 3],
    bx: &OracleBox,
    resolution: f64,
    k: f64,
) -> Result<f64> {
    if !(resolution > 0.0 && resolution <= 0.35) {
        return Err(Error::InvalidInput(format!(
            "oracle resolution {resolution} out of range (0, 0.35]"
        )));
    }
    if !bx.contains(p) || !bx.contains(q) {
        return Err(Error::OutsideBox);
    }
    let nx = (((bx.x.1 - bx.x.0) / resolution).ceil() as usize).max(1) + 1;
    let ny = (((bx.y.1 - bx.y.0) / resolution).ceil() as usize).max(1) + 1;
    let nz = (((bx.z.1 - bx.z.0) / resolution).ceil() as usize).max(1) + 1;
    let total = nx
        .checked_mul(ny)
        .and_then(|t| t.checked_mul(nz))
        .filter(|t| *t <= 40_000_000)
        .ok_or_else(|| Error::InvalidInput("oracle grid too large".into()))?;
    let idx = |i: usize, j: usize, l: usize| -> u32 { ((l * ny + j) * nx + i) as u32 };
    let snap = |p: [f64; 3]| -> (usize, usize, usize) {
        let i = (((p[0] - bx.x.0) / resolution).round() as usize).min(nx - 1);
        let j = (((p[1] - bx.y.0) / resolution).round() as usize).min(ny - 1);
        let l = (((p[2] - bx.z.0) / resolution).round() as usize).min(nz - 1);
        (i, j, l)
    };
    // edge-weight table: per z-layer, per (|di|, |dj|, dl) type
    // type id: (di2) + 2*(dj2) + 4*(dl+1), dl in {-1,0,1}
    let mut weights = vec![0.0f64; nz * 12];
    for l in 0..nz {
        let z0 = bx.z.0 + l as f64 * resolution;
        for di2 in 0..2usize {
            for dj2 in 0..2usize {
                for (dl_i, dl) in [(-1i64, 0usize), (0, 1), (1, 2)] {
                    if di2 == 0 && dj2 == 0 && dl_i == 0 {
                        continue;
                    }
                    let l2 = l as i64 + dl_i;
                    if l2 < 0 || l2 >= nz as i64 {
                        continue;
                    }
                    let w = piece_length(
                        di2 as f64 * resolution,
                        dj2 as f64 * resolution,
                        z0,
                        z0 + dl_i as f64 * resolution,
                        k,
                    );
                    weights[l * 12 + di2 + 2 * dj2 + 4 * dl] = w;
                }
            }
        }
    }
    let (pi, pj, pl) = snap(p);
    let (qi, qj, ql) = snap(q);
    let source = idx(pi, pj, pl);
    let target = idx(qi, qj, ql);
    let mut dist = vec![f64::INFINITY; total];
    let mut prev = vec![u32::MAX; total];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(HeapEntry { cost: 0.0, node: source });
    while let Some(HeapEntry { cost, node }) = heap.pop() {
        if cost > dist[node as usize] {
            continue;
        }
        if node == target {
            break;
        }
        let i = (node as usize) % nx;
        let j = ((node as usize) / nx) % ny;
        let l = (node as usize) / (nx * ny);
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                for dl in -1i64..=1 {
                    if di == 0 && dj == 0 && dl == 0 {
                        continue;
                    }
                    let (i2, j2, l2) = (i as i64 + di, j as i64 + dj, l as i64 + dl);
                    if i2 < 0
                        || i2 >= nx as i64
                        || j2 < 0
                        || j2 >= ny as i64
                        || l2 < 0
                        || l2 >= nz as i64
                    {
                        continue;
                    }
                    let w = weights
                        [l * 12 + (di * di) as usize + 2 * (dj * dj) as usize + 4 * (dl + 1) as usize];
                    let next = idx(i2 as usize, j2 as usize, l2 as usize);
                    let nd = cost + w;
                    if nd < dist[next as usize] {
                        dist[next as usize] = nd;
                        prev[next as usize] = node;
                        heap.push(HeapEntry { cost: nd, node: next });
                    }
                }
            }
        }
    }
    let d = dist[target as usize];
    if !d.is_finite() {
        return Err(Error::BoxTooSmall);
    }
    // a shortest path hugging the box boundary means the box clipped it
    let mut node = target;
    while node != source {
        let i = (node as usize) % nx;
        let j = ((node as usize) / nx) % ny;
        let l = (node as usize) / (nx * ny);
        if i == 0 || i == nx - 1 || j == 0 || j == ny - 1 || l == 0 || l == nz - 1 {
            return Err(Error::BoxTooSmall);
        }
        node = prev[node as usize];
        if node == u32::MAX {
            break;
        }
    }
    Ok(d)
}
