use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Leaf;
use crate::flatmodel::SolvPath;
use crate::hyp2::{angle_distance, HPoint};
use crate::surface::FuchsianGroup;

/// Per-radius fraction of a path near the base fiber `z = 0`.
#[derive(Debug, Clone)]
pub struct FiberStats {
    pub rs: Vec<f64>,
    /// fraction of arclength with `|z| <= R`
    pub by_arclength: Vec<f64>,
    /// fraction of parameter (vertex-uniform) with `|z| <= R`
    pub by_parameter: Vec<f64>,
    pub total_arclength: f64,
}

/// Occupation statistics of `N_R(S_0)` along a path: both arclength-weighted
/// and parameter-weighted fractions. Pieces crossing the slab boundary are
/// split by linear interpolation in `z`.
pub fn fiber_stats(path: &SolvPath, k: f64, rs: &[f64]) -> FiberStats {
    let mut total = 0.0f64;
    let mut inside_arc = vec![0.0f64; rs.len()];
    let mut inside_par = vec![0usize; rs.len()];
    let mut count = 0usize;
    for w in path.vertices.windows(2) {
        let (p, q) = (w[0], w[1]);
        let len = crate::flatmodel::ct_length(&SolvPath::new(vec![p, q]), k);
        total += len;
        count += 1;
        for (i, r) in rs.iter().enumerate() {
            inside_arc[i] += len * slab_fraction(p[2], q[2], *r);
            if p[2].abs() <= *r {
                inside_par[i] += 1;
            }
        }
    }
    FiberStats {
        rs: rs.to_vec(),
        by_arclength: inside_arc
            .iter()
            .map(|a| if total > 0.0 { a / total } else { 0.0 })
            .collect(),
        by_parameter: inside_par
            .iter()
            .map(|c| *c as f64 / count.max(1) as f64)
            .collect(),
        total_arclength: total,
    }
}

/// Fraction of the segment `z0 -> z1` (linear) with `|z| <= r`.
fn slab_fraction(z0: f64, z1: f64, r: f64) -> f64 {
    if z0 == z1 {
        return if z0.abs() <= r { 1.0 } else { 0.0 };
    }
    let (lo, hi) = (z0.min(z1), z0.max(z1));
    let clipped = (hi.min(r) - lo.max(-r)).max(0.0);
    clipped / (hi - lo)
}

/// Monte-Carlo area of the `r`-neighborhood of a leaf set within the
/// fundamental octagon, per radius: uniform hyperbolic-area sampling with a
/// domain-membership rejection step.
pub fn birman_series_area(
    group: &FuchsianGroup,
    leaves: &[Leaf],
    rs: &[f64],
    samples: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    use rayon::prelude::*;
    let r_max = crate::surface::octagon_circumradius();
    let total_area = 4.0 * std::f64::consts::PI;
    let chunk = 20_000usize;
    let chunks: Vec<u64> = (0..((samples + chunk - 1) / chunk) as u64).collect();
    let counts: Vec<(usize, Vec<usize>)> = chunks
        .par_iter()
        .map(|&c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (c.wrapping_mul(0x9e37_79b9)));
            let mut inside = vec![0usize; rs.len()];
            let mut accepted = 0usize;
            for _ in 0..chunk {
                // uniform w.r.t. hyperbolic area on the disk of radius r_max
                let u: f64 = rng.gen();
                let rh = (1.0 + u * ((r_max.cosh()) - 1.0)).acosh();
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let w = num_complex::Complex64::from_polar((rh / 2.0).tanh(), phi);
                let p = HPoint::from_disk(w);
                if !group.in_domain(p, 0.0) {
                    continue;
                }
                accepted += 1;
                let d = leaves
                    .iter()
                    .map(|l| l.h2_dist(p))
                    .fold(f64::INFINITY, f64::min);
                for (i, r) in rs.iter().enumerate() {
                    if d <= *r {
                        inside[i] += 1;
                    }
                }
            }
            (accepted, inside)
        })
        .collect();
    let accepted: usize = counts.iter().map(|c| c.0).sum();
    let mut inside = vec![0usize; rs.len()];
    for (_, v) in &counts {
        for (i, x) in v.iter().enumerate() {
            inside[i] += x;
        }
    }
    rs.iter()
        .enumerate()
        .map(|(i, r)| (*r, total_area * inside[i] as f64 / accepted.max(1) as f64))
        .collect()
}

/// Fraction of walk endpoint pairs within `r` of some leaf endpoint pair in
/// the product visual metric, per radius, with a log-log power fit.
#[derive(Debug, Clone)]
pub struct EndpointMeasure {
    pub rs: Vec<f64>,
    pub fractions: Vec<f64>,
    pub alpha: f64,
    pub r_squared: f64,
}

pub fn endpoint_neighborhood_measure(
    pairs: &[(f64, f64)],
    leaves: &[Leaf],
    rs: &[f64],
) -> EndpointMeasure {
    let leaf_pairs: Vec<(f64, f64)> = leaves
        .iter()
        .map(|l| (l.geodesic.neg.to_angle(), l.geodesic.pos.to_angle()))
        .collect();
    let mut fractions = Vec::with_capacity(rs.len());
    // precompute per walk pair the minimal product-metric distance to the
    // leaf-endpoint set (both orientations)
    let dists: Vec<f64> = pairs
        .iter()
        .map(|&(x, y)| {
            let mut best = f64::INFINITY;
            for &(u, v) in &leaf_pairs {
                let d1 = angle_distance(x, u).max(angle_distance(y, v));
                let d2 = angle_distance(x, v).max(angle_distance(y, u));
                best = best.min(d1).min(d2);
            }
            best
        })
        .collect();
    for r in rs {
        let c = dists.iter().filter(|d| **d <= *r).count();
        fractions.push(c as f64 / dists.len().max(1) as f64);
    }
    let pts: Vec<(f64, f64)> = rs
        .iter()
        .zip(&fractions)
        .filter(|(_, f)| **f > 0.0 && **f < 1.0)
        .map(|(r, f)| (r.ln(), f.ln()))
        .collect();
    let (alpha, r_squared) = crate::randwalk::linear_fit(&pts);
    EndpointMeasure { rs: rs.to_vec(), fractions, alpha, r_squared }
}
