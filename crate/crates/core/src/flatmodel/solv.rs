use crate::{Error, Result};

/// A piecewise-linear path in developed coordinates `(x, y, z)`, measured in
/// `ds^2 = k^{2z} dx^2 + k^{-2z} dy^2 + (log k)^2 dz^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvPath {
    pub vertices: Vec<[f64; 3]>,
}

impl SolvPath {
    pub fn new(vertices: Vec<[f64; 3]>) -> Self {
        SolvPath { vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 2
    }
}

/// 16-point Gauss-Legendre nodes/weights on [0, 1].
const GL16: [(f64, f64); 16] = [
    (0.005299532504175031, 0.013576229705877047),
    (0.027712488463383712, 0.031126761969323946),
    (0.06718439880608412, 0.04757925584124639),
    (0.12229779582249845, 0.06231448562776694),
    (0.19106187779867811, 0.07479799440828837),
    (0.27099161117138637, 0.08457825969750127),
    (0.35919822461037054, 0.09130170752246179),
    (0.4524937450811813, 0.09472530522753425),
    (0.5475062549188188, 0.09472530522753425),
    (0.6408017753896295, 0.09130170752246179),
    (0.7290083888286136, 0.08457825969750127),
    (0.8089381222013219, 0.07479799440828837),
    (0.8777022041775016, 0.06231448562776694),
    (0.9328156011939159, 0.04757925584124639),
    (0.9722875115366163, 0.031126761969323946),
    (0.994700467495825, 0.013576229705877047),
];

/// Exact-or-quadrature length of one straight piece.
pub(crate) fn piece_length(dx: f64, dy: f64, z0: f64, z1: f64, k: f64) -> f64 {
    let log_k = k.ln();
    let dz = z1 - z0;
    if dx == 0.0 && dy == 0.0 {
        return dz.abs() * log_k;
    }
    if dz == 0.0 {
        let ex = k.powf(2.0 * z0);
        return (ex * dx * dx + dy * dy / ex).sqrt();
    }
    // subdivide so the exponent varies mildly per chunk, then Gauss-Legendre
    let chunks = (dz.abs() * log_k / 0.75).ceil().max(1.0) as usize;
    let mut total = 0.0;
    for c in 0..chunks {
        let s0 = c as f64 / chunks as f64;
        let s1 = (c + 1) as f64 / chunks as f64;
        let (cdx, cdy, cz0, cz1) = (dx / chunks as f64, dy / chunks as f64, z0 + s0 * dz, z0 + s1 * dz);
        let cdz = cz1 - cz0;
        let mut acc = 0.0;
        for (node, weight) in GL16 {
            let z = cz0 + node * cdz;
            let ex = k.powf(2.0 * z);
            acc += weight
                * (ex * cdx * cdx + cdy * cdy / ex + log_k * log_k * cdz * cdz).sqrt();
        }
        total += acc;
    }
    total
}

/// Length of a path in the Cannon-Thurston metric. Additive under
/// concatenation and invariant under reparametrization by construction.
pub fn ct_length(path: &SolvPath, k: f64) -> f64 {
    let mut total = 0.0;
    for w in path.vertices.windows(2) {
        let (p, q) = (w[0], w[1]);
        total += piece_length(q[0] - p[0], q[1] - p[1], p[2], q[2], k);
    }
    total
}

/// Measures of a segment transported by the suspension flow to height `z`:
/// `(k^z dx, k^{-z} dy)`.
pub fn suspension_scale(dx: f64, dy: f64, z: f64, k: f64) -> (f64, f64) {
    (k.powf(z) * dx, k.powf(-z) * dy)
}

/// The suspension flow `F_t` on a path: vertical translation of every vertex.
pub fn vertical_shift(path: &SolvPath, t: f64) -> SolvPath {
    SolvPath::new(path.vertices.iter().map(|v| [v[0], v[1], v[2] + t]).collect())
}

/// The monodromy composed with unit suspension flow, `f o F_1`, in developed
/// coordinates: `(x, y, z) -> (x / k, k y, z + 1)`. An isometry of the metric.
pub fn monodromy_shift(path: &SolvPath, k: f64) -> SolvPath {
    SolvPath::new(
        path.vertices
            .iter()
            .map(|v| [v[0] / k, v[1] * k, v[2] + 1.0])
            .collect(),
    )
}

/// A rectangle with side measures `a = dx(R)`, `b = dy(R)` and a corner
/// anchored in developed coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub a: f64,
    pub b: f64,
    pub corner: (f64, f64),
}

impl Rectangle {
    pub fn measure(&self) -> f64 {
        self.a * self.b
    }
}

/// Height at which the sides of a rectangle have equal measure:
/// `z* = (1/2) log_k (b / a)`; each side measures `sqrt(ab)` there.
pub fn optimal_height(rect: &Rectangle, k: f64) -> Result<f64> {
    if rect.a <= 0.0 || rect.b <= 0.0 {
        return Err(Error::Degenerate(
            "innermost rectangle: a zero-measure side has no optimal height".into(),
        ));
    }
    Ok(0.5 * (rect.b / rect.a).ln() / k.ln())
}

/// Minimized ladder separation `min_z (k^z a + k^{-z} b) = 2 sqrt(ab)`.
pub fn ladder_gap(a: f64, b: f64) -> f64 {
    2.0 * (a * b).sqrt()
}

/// Lower bound for the distance between suspension flow sets over opposite
/// quadrants of a rectangle: `k^{-sqrt(ab/2)} * 2 sqrt(ab)`.
pub fn bottleneck_bound(rect: &Rectangle, k: f64) -> f64 {
    let ab = rect.measure();
    k.powf(-(ab / 2.0).sqrt()) * 2.0 * ab.sqrt()
}

/// Optimal height of a single saddle connection with holonomy `(dx, dy)`,
/// clamped to `+-z_max` for axis-parallel connections.
pub fn connection_height(dx: f64, dy: f64, k: f64, z_max: f64) -> f64 {
    if dx.abs() < 1e-300 {
        return z_max;
    }
    if dy.abs() < 1e-300 {
        return -z_max;
    }
    (0.5 * (dy / dx).abs().ln() / k.ln()).clamp(-z_max, z_max)
}

/// Default clamp for axis-parallel connection heights.
pub fn default_z_clamp(k: f64) -> f64 {
    5.0 * 10f64.ln() / k.ln()
}

/// McMullen optimal-height path over a chain of saddle connections sharing
/// endpoint cone points: each connection is placed (as a straight segment) at
/// its optimal height, with vertical joints between consecutive heights.
pub fn mcmullen_path(chain: &[(i64, i64)], k: f64, z_clamp: f64) -> Result<SolvPath> {
    if chain.is_empty() {
        return Err(Error::InvalidInput("empty saddle-connection chain".into()));
    }
    let mut vertices: Vec<[f64; 3]> = Vec::with_capacity(2 * chain.len() + 1);
    let mut pos = (0.0f64, 0.0f64);
    let mut z = connection_height(chain[0].0 as f64, chain[0].1 as f64, k, z_clamp);
    vertices.push([pos.0, pos.1, z]);
    for (idx, &(p, q)) in chain.iter().enumerate() {
        let z_here = connection_height(p as f64, q as f64, k, z_clamp);
        if (z_here - z).abs() > 1e-15 {
            vertices.push([pos.0, pos.1, z_here]);
            z = z_here;
        }
        pos = (pos.0 + p as f64, pos.1 + q as f64);
        vertices.push([pos.0, pos.1, z]);
        let _ = idx;
    }
    Ok(SolvPath::new(vertices))
}

/// Staircase chain of saddle connections approximating the straight line in
/// direction `angle`: each step picks the available holonomy that keeps the
/// developed path closest to the target line while moving forward.
pub fn straight_chain(
    connections: &[(i64, i64)],
    angle: f64,
    steps: usize,
) -> Vec<(i64, i64)> {
    let u = (angle.cos(), angle.sin());
    let mut pos = (0.0f64, 0.0f64);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut best: Option<((i64, i64), f64)> = None;
        for &(p, q) in connections {
            let (px, py) = (pos.0 + p as f64, pos.1 + q as f64);
            let forward = px * u.0 + py * u.1;
            if forward <= pos.0 * u.0 + pos.1 * u.1 + 0.25 {
                continue; // must make progress along the line
            }
            let perp = (px * u.1 - py * u.0).abs();
            let score = perp + 0.05 * ((p * p + q * q) as f64).sqrt();
            if best.map_or(true, |(_, s)| score < s) {
                best = Some(((p, q), score));
            }
        }
        match best {
            Some((h, _)) => {
                pos = (pos.0 + h.0 as f64, pos.1 + h.1 as f64);
                out.push(h);
            }
            None => break,
        }
    }
    out
}

/// A quasigeodesic fit: pairs of (distance, arclength/distance ratio), the
/// mean ratio, and the least-squares slope of ratio against distance.
#[derive(Debug, Clone)]
pub struct QgFit {
    pub pairs: Vec<(f64, f64)>,
    pub mean_ratio: f64,
    pub slope: f64,
}

pub fn fit_ratio(pairs: Vec<(f64, f64)>) -> QgFit {
    let mean_ratio = if pairs.is_empty() {
        f64::NAN
    } else {
        pairs.iter().map(|p| p.1).sum::<f64>() / pairs.len() as f64
    };
    let (slope, _) = crate::randwalk::linear_fit(&pairs);
    QgFit { pairs, mean_ratio, slope }
}
