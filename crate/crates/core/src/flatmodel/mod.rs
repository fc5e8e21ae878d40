//! The concrete pseudo-Anosov arena: a square-tiled genus-2 translation
//! surface with an affine pseudo-Anosov, the Cannon-Thurston (singular solv)
//! metric on its universal cover times R, rectangles and optimal heights,
//! McMullen optimal-height paths, and a brute-force grid oracle for solv
//! distances.
//!
//! Transverse measures are the square-axis coordinates of the developed
//! image: `dx` accumulates horizontal displacement, `dy` vertical. The metric
//! is `ds^2 = k^{2z} dx^2 + k^{-2z} dy^2 + (log k)^2 dz^2` with `k` the
//! stretch factor of the pseudo-Anosov.

mod oracle;
mod solv;
mod trace;

pub use oracle::{solv_distance_oracle, OracleBox};
pub use solv::{
    connection_height, default_z_clamp, fit_ratio, QgFit,
    bottleneck_bound, ct_length, ladder_gap, mcmullen_path, monodromy_shift, optimal_height,
    straight_chain, suspension_scale, vertical_shift, Rectangle, SolvPath,
};
pub use trace::{cylinder_period, flat_geodesic, saddle_connections, FlatSegment, FlatTrace};

use crate::{Error, Result};

/// A square-tiled translation surface: `n` unit squares with right- and
/// up-neighbor permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationSurface {
    n: usize,
    right: Vec<usize>,
    up: Vec<usize>,
    right_inv: Vec<usize>,
    up_inv: Vec<usize>,
    /// cone classes: cycle length of the corner cycle, cone angle `2 pi m`
    cone_cycles: Vec<usize>,
}

/// A point on the surface in local square coordinates, `x, y in [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub square: usize,
    pub x: f64,
    pub y: f64,
}

impl TranslationSurface {
    pub fn new(right: Vec<usize>, up: Vec<usize>) -> Result<Self> {
        let n = right.len();
        if n == 0 || up.len() != n {
            return Err(Error::InvalidInput("permutation size mismatch".into()));
        }
        let right_inv = invert_permutation(&right)?;
        let up_inv = invert_permutation(&up)?;
        // connectivity
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(s) = stack.pop() {
            for t in [right[s], up[s], right_inv[s], up_inv[s]] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        if !seen.iter().all(|s| *s) {
            return Err(Error::InvalidInput("surface is not connected".into()));
        }
        // vertex classes <-> cycles of the commutator r u r^-1 u^-1
        let comm: Vec<usize> = (0..n)
            .map(|s| up_inv[right_inv[up[right[s]]]])
            .collect();
        let mut cone_cycles = Vec::new();
        let mut visited = vec![false; n];
        for s in 0..n {
            if visited[s] {
                continue;
            }
            let mut len = 0;
            let mut t = s;
            while !visited[t] {
                visited[t] = true;
                len += 1;
                t = comm[t];
            }
            cone_cycles.push(len);
        }
        Ok(TranslationSurface { n, right, up, right_inv, up_inv, cone_cycles })
    }

    pub fn num_squares(&self) -> usize {
        self.n
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn up(&self) -> &[usize] {
        &self.up
    }

    pub(crate) fn right_inv(&self) -> &[usize] {
        &self.right_inv
    }

    pub(crate) fn up_inv(&self) -> &[usize] {
        &self.up_inv
    }

    /// Cone angles in multiples of `2 pi` (one entry per vertex class).
    pub fn cone_multiplicities(&self) -> &[usize] {
        &self.cone_cycles
    }

    /// Genus from the vertex count: `chi = V - E + F = V - n`.
    pub fn genus(&self) -> i64 {
        let v = self.cone_cycles.len() as i64;
        let chi = v - (self.n as i64);
        (2 - chi) / 2
    }

    /// True when every vertex class is singular (cone angle > 2 pi).
    pub fn all_vertices_singular(&self) -> bool {
        self.cone_cycles.iter().all(|m| *m > 1)
    }

    /// Serialize in the plain-text exchange format.
    pub fn describe(&self, pa: &PseudoAnosov) -> String {
        let fmt = |p: &[usize]| {
            p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let d = pa.derivative;
        format!(
            "squares: {}\nright: {}\nup: {}\npa: {} {} {} {}\n",
            self.n,
            fmt(&self.right),
            fmt(&self.up),
            d[0][0],
            d[0][1],
            d[1][0],
            d[1][1]
        )
    }
}

fn invert_permutation(p: &[usize]) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; p.len()];
    for (i, &j) in p.iter().enumerate() {
        if j >= p.len() || inv[j] != usize::MAX {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        inv[j] = i;
    }
    Ok(inv)
}

/// An affine pseudo-Anosov on a square-tiled surface, stored by its integer
/// derivative; `k` is the larger eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoAnosov {
    pub derivative: [[i64; 2]; 2],
    pub k: f64,
}

impl PseudoAnosov {
    pub fn new(derivative: [[i64; 2]; 2]) -> Result<Self> {
        let tr = derivative[0][0] + derivative[1][1];
        let det = derivative[0][0] * derivative[1][1] - derivative[0][1] * derivative[1][0];
        if det != 1 || tr.abs() <= 2 {
            return Err(Error::InvalidInput(format!(
                "derivative must be hyperbolic with det 1 (trace {tr}, det {det})"
            )));
        }
        let t = tr.abs() as f64;
        let k = 0.5 * (t + (t * t - 4.0).sqrt());
        Ok(PseudoAnosov { derivative, k })
    }
}

/// Parse the plain-text surface description:
/// `squares: n`, `right: <perm>`, `up: <perm>`, `pa: <4 ints>`, in any line
/// order, whitespace-insensitive.
pub fn parse_surface(text: &str) -> Result<(TranslationSurface, PseudoAnosov)> {
    let mut n: Option<usize> = None;
    let mut right: Option<Vec<usize>> = None;
    let mut up: Option<Vec<usize>> = None;
    let mut pa: Option<Vec<i64>> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("bad line {line:?}")))?;
        match key.trim() {
            "squares" => {
                n = Some(rest.trim().parse().map_err(|e| {
                    Error::InvalidInput(format!("bad square count: {e}"))
                })?)
            }
            "right" => right = Some(parse_usizes(rest)?),
            "up" => up = Some(parse_usizes(rest)?),
            "pa" => {
                let v: Vec<i64> = rest
                    .split_whitespace()
                    .map(|t| t.parse::<i64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidInput(format!("bad pa entry: {e}")))?;
                if v.len() != 4 {
                    return Err(Error::InvalidInput("pa needs 4 integers".into()));
                }
                pa = Some(v);
            }
            other => return Err(Error::InvalidInput(format!("unknown key {other:?}"))),
        }
    }
    let (n, right, up, pa) = match (n, right, up, pa) {
        (Some(n), Some(r), Some(u), Some(p)) => (n, r, u, p),
        _ => return Err(Error::InvalidInput("missing squares/right/up/pa line".into())),
    };
    if right.len() != n || up.len() != n {
        return Err(Error::InvalidInput("permutation length != squares".into()));
    }
    let surface = TranslationSurface::new(right, up)?;
    let pa = PseudoAnosov::new([[pa[0], pa[1]], [pa[2], pa[3]]])?;
    Ok((surface, pa))
}

fn parse_usizes(s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::InvalidInput(format!("bad permutation entry: {e}")))
        })
        .collect()
}

/// The shipped example: the 3-square L origami (genus 2, one cone point of
/// angle `6 pi`) with the affine pseudo-Anosov of derivative
/// `[[1,2],[0,1]] * [[1,0],[2,1]] = [[5,2],[2,1]]`; `k = 3 + 2 sqrt 2`.
///
/// Square layout: 0 at the origin, 1 to its right, 2 above 0. The derivative
/// is realized as a horizontal multitwist followed by a vertical one (full
/// Dehn twists in every cylinder).
pub fn build_canonical_surface() -> (TranslationSurface, PseudoAnosov) {
    let surface = TranslationSurface::new(vec![1, 0, 2], vec![2, 1, 0]).expect("canonical surface");
    assert_eq!(surface.genus(), 2);
    assert_eq!(surface.cone_multiplicities(), &[3]); // one 6 pi cone point
    let pa = PseudoAnosov::new([[5, 2], [2, 1]]).expect("canonical derivative");
    assert!((pa.k - (3.0 + 2.0 * std::f64::consts::SQRT_2)).abs() < 1e-12);
    (surface, pa)
}

/// Global planar coordinates of the canonical L layout.
fn canonical_global(p: SurfacePoint) -> (f64, f64) {
    match p.square {
        0 => (p.x, p.y),
        1 => (p.x + 1.0, p.y),
        2 => (p.x, p.y + 1.0),
        _ => panic!("canonical surface has 3 squares"),
    }
}

fn canonical_local(x: f64, y: f64) -> SurfacePoint {
    // fold global L coordinates back to a square
    let (x, y) = (x.rem_euclid(2.0), y.rem_euclid(2.0));
    if y < 1.0 {
        if x < 1.0 {
            SurfacePoint { square: 0, x, y }
        } else {
            SurfacePoint { square: 1, x: x - 1.0, y }
        }
    } else if x < 1.0 {
        SurfacePoint { square: 2, x, y: y - 1.0 }
    } else {
        unreachable!("global coordinates ({x}, {y}) fall off the L")
    }
}

/// The canonical affine pseudo-Anosov as a point map: a vertical multitwist
/// (one full twist per vertical cylinder) followed by a horizontal one.
/// Its derivative away from cylinder boundaries is `[[5,2],[2,1]]`.
pub fn canonical_affine_map(p: SurfacePoint) -> SurfacePoint {
    let (x, y) = canonical_global(p);
    // vertical twist: left column (x in [0,1)) has circumference 2, right
    // column (x in [1,2)) circumference 1; derivative [[1,0],[2,1]]
    let (x, y) = if x < 1.0 {
        (x, (y + 2.0 * x).rem_euclid(2.0))
    } else {
        (x, (y + 2.0 * x).rem_euclid(1.0))
    };
    let p = canonical_local(x, y);
    let (x, y) = canonical_global(p);
    // horizontal twist: bottom row (y in [0,1)) circumference 2, top row
    // (y in [1,2)) circumference 1; derivative [[1,2],[0,1]]
    let (x, y) = if y < 1.0 {
        ((x + 2.0 * y).rem_euclid(2.0), y)
    } else {
        ((x + 2.0 * y).rem_euclid(1.0) + 0.0, y)
    };
    canonical_local(x, y)
}

/// Combinatorial affinity check for the canonical map: short straight
/// segments map to straight segments with displacement `D * h`, across
/// square gluings.
pub fn verify_canonical_affine(samples: usize, seed: u64) -> Result<()> {
    use rand::{Rng, SeedableRng};
    let (surface, pa) = build_canonical_surface();
    let d = pa.derivative;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    while checked < samples {
        let p = SurfacePoint {
            square: rng.gen_range(0..3),
            x: rng.gen_range(0.05..0.95),
            y: rng.gen_range(0.05..0.95),
        };
        let h: (f64, f64) = (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        // move from p by h on the surface (may cross gluings)
        let len = (h.0 * h.0 + h.1 * h.1).sqrt();
        if len < 1e-3 {
            continue;
        }
        let tr = match flat_geodesic(&surface, p, (h.0 / len, h.1 / len), len) {
            Ok(t) => t,
            Err(_) => continue, // cone-point grazing: resample
        };
        let q = tr.end;
        // image displacement D * h
        let hh = (
            d[0][0] as f64 * h.0 + d[0][1] as f64 * h.1,
            d[1][0] as f64 * h.0 + d[1][1] as f64 * h.1,
        );
        let fp = canonical_affine_map(p);
        let fq_expect = canonical_affine_map(q);
        let hlen = (hh.0 * hh.0 + hh.1 * hh.1).sqrt();
        let tr2 = match flat_geodesic(&surface, fp, (hh.0 / hlen, hh.1 / hlen), hlen) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let fq = tr2.end;
        // same surface point (allowing for the cylinder-boundary cut locus)
        let close = fq.square == fq_expect.square
            && (fq.x - fq_expect.x).abs() < 1e-7
            && (fq.y - fq_expect.y).abs() < 1e-7;
        if !close {
            // points on cylinder boundaries may disagree; tolerate only there
            let on_cut = |pt: SurfacePoint| {
                let (x, y) = canonical_global(pt);
                x.fract().min(1.0 - x.fract()) < 1e-6 || y.fract().min(1.0 - y.fract()) < 1e-6
            };
            if !(on_cut(p) || on_cut(q) || on_cut(fp)) {
                return Err(Error::InvalidInput(format!(
                    "affine check failed at {p:?} + {h:?}: got {fq:?}, expected {fq_expect:?}"
                )));
            }
            continue;
        }
        checked += 1;
    }
    Ok(())
}
