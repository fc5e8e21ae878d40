//! The height function and its consumers: finite lamination approximations by
//! iterated curves, radius functions along geodesics, test paths, corner and
//! straight segment classification, fiber statistics, thin-neighborhood area
//! estimates, and endpoint-measure tables.
//!
//! The invariant laminations of the surface automorphism are approximated at
//! depth `n` by the closed geodesics of `f^{+-n}(c)` for the generator curve
//! `c = a`, lifted to the ball with all deck translates. Convergence in n and
//! leaf disjointness are measured properties, not assumptions.

mod profile;
mod stats;

pub use profile::{
    classify_segments, flat_inclusion, floor_clamp, height_of_frame, profile_flow,
    profile_geodesic, test_path, CrossingRecord, HeightConfig, HeightProfile, SegmentKind,
};
pub use stats::{birman_series_area, endpoint_neighborhood_measure, fiber_stats, FiberStats};

use crate::hyp2::{dist_h2, Boundary, Frame, Geodesic, HPoint};
use crate::surface::{FuchsianGroup, GroupWord};
use crate::{Error, Result};

/// Oriented axis of a hyperbolic isometry, from repelling to attracting
/// fixed point.
pub fn axis_of(f: &Frame) -> Result<Geodesic> {
    axis_from_entries(f.entries())
}

/// Axis from raw matrix entries of any positive multiple of a determinant-1
/// matrix. Uses the cancellation-free discriminant `(a-d)^2 + 4bc`, so it is
/// stable for the huge entries of long word products.
pub fn axis_from_entries(m: [f64; 4]) -> Result<Geodesic> {
    let [a, b, c, d] = if m[0] + m[3] >= 0.0 {
        m
    } else {
        [-m[0], -m[1], -m[2], -m[3]]
    };
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
    if scale == 0.0 {
        return Err(Error::Degenerate("zero matrix".into()));
    }
    let disc = (a - d) * (a - d) + 4.0 * b * c;
    if disc <= 1e-12 * scale * scale {
        return Err(Error::Degenerate("axis of a non-hyperbolic element".into()));
    }
    let s = disc.sqrt();
    if c.abs() < 1e-14 * scale {
        // fixed points: infinity and b/(d-a)
        if (d - a).abs() < 1e-14 * scale {
            return Err(Error::Degenerate("parabolic-like element".into()));
        }
        let x = b / (d - a);
        // with trace >= 0, infinity attracts exactly when a > d
        return Ok(if a > d {
            Geodesic::new(Boundary::Real(x), Boundary::Infinity)
        } else {
            Geodesic::new(Boundary::Infinity, Boundary::Real(x))
        });
    }
    // with trace >= 0 the dominant eigenvalue takes the + branch
    let attracting = ((a - d) + s) / (2.0 * c);
    let repelling = ((a - d) - s) / (2.0 * c);
    if attracting == repelling {
        return Err(Error::Degenerate("coincident fixed points".into()));
    }
    Ok(Geodesic::new(Boundary::Real(repelling), Boundary::Real(attracting)))
}

/// An automorphism of the octagon group, stored by generator images.
#[derive(Debug, Clone)]
pub struct PaAutomorphism {
    images: [GroupWord; 4],
    inverse_images: [GroupWord; 4],
}

impl PaAutomorphism {
    /// The shipped pseudo-Anosov-type automorphism: a five-twist composite
    /// along the standard curve chain, with growth rate ~1.9634 measured on
    /// the octagon realization.
    pub fn canonical() -> Self {
        let images = [
            GroupWord::parse("BABDab").unwrap(),
            GroupWord::parse("bab").unwrap(),
            GroupWord::parse("D").unwrap(),
            GroupWord::parse("BABc").unwrap(),
        ];
        let inverse_images = [
            GroupWord::parse("CbaCbaB").unwrap(),
            GroupWord::parse("bABc").unwrap(),
            GroupWord::parse("bd").unwrap(),
            GroupWord::parse("C").unwrap(),
        ];
        let pa = PaAutomorphism { images, inverse_images };
        debug_assert!(pa.verify_automorphism());
        pa
    }

    pub fn apply(&self, w: &GroupWord) -> GroupWord {
        self.substitute(w, &self.images)
    }

    pub fn apply_inverse(&self, w: &GroupWord) -> GroupWord {
        self.substitute(w, &self.inverse_images)
    }

    fn substitute(&self, w: &GroupWord, table: &[GroupWord; 4]) -> GroupWord {
        let mut out = GroupWord::identity();
        for &x in w.letters() {
            if x < 4 {
                out.extend(&table[x as usize]);
            } else {
                out.extend(&table[(x - 4) as usize].inverse());
            }
        }
        out
    }

    /// Iterate `f^{+-depth}` on a word.
    pub fn iterate(&self, w: &GroupWord, depth: i32) -> GroupWord {
        let mut out = w.clone();
        for _ in 0..depth.unsigned_abs() {
            out = if depth >= 0 { self.apply(&out) } else { self.apply_inverse(&out) };
        }
        out
    }

    /// Structural checks: the images conjugate the relator into itself and
    /// the inverse really inverts on the generators.
    pub fn verify_automorphism(&self) -> bool {
        let relator = GroupWord::parse("abABcdCD").unwrap();
        let image = self.apply(&relator);
        if !is_conjugate_to_relator(&image, &relator) {
            return false;
        }
        for x in 0..4u8 {
            let w = GroupWord::from_letters([x]);
            if self.apply_inverse(&self.apply(&w)) != w || self.apply(&self.apply_inverse(&w)) != w
            {
                return false;
            }
        }
        true
    }

    /// Growth rate of the geodesic length of `f^n(a)` between consecutive
    /// depths, evaluated on the octagon realization; the stretch-factor
    /// estimate used by the height machinery.
    pub fn stretch_estimate(&self, group: &FuchsianGroup, depth: usize) -> f64 {
        let mut w = GroupWord::parse("a").unwrap();
        let mut lens = Vec::new();
        for _ in 0..depth {
            w = self.apply(&w);
            lens.push(translation_length(group, &w));
        }
        let m = lens.len();
        ((lens[m - 1] / lens[m - 3]).sqrt() + (lens[m - 2] / lens[m - 4]).sqrt()) / 2.0
    }
}

fn is_conjugate_to_relator(w: &GroupWord, relator: &GroupWord) -> bool {
    // cyclically reduce
    let mut letters: Vec<u8> = w.letters().to_vec();
    loop {
        let n = letters.len();
        if n >= 2 && letters[0] == crate::surface::letter_inverse(letters[n - 1]) {
            letters = letters[1..n - 1].to_vec();
        } else {
            break;
        }
    }
    if letters.len() != relator.len() {
        return false;
    }
    let doubled: Vec<u8> = relator.letters().iter().chain(relator.letters()).copied().collect();
    let inv: Vec<u8> = relator
        .inverse()
        .letters()
        .to_vec();
    let doubled_inv: Vec<u8> = inv.iter().chain(inv.iter()).copied().collect();
    doubled.windows(letters.len()).any(|win| win == letters.as_slice())
        || doubled_inv.windows(letters.len()).any(|win| win == letters.as_slice())
}

/// Translation length of a word on the octagon surface, with scaled products
/// to survive long words.
pub fn translation_length(group: &FuchsianGroup, w: &GroupWord) -> f64 {
    let mut m = [1.0f64, 0.0, 0.0, 1.0];
    let mut log_scale = 0.0f64;
    for &x in w.letters() {
        let g = group.generator(x).entries();
        m = [
            m[0] * g[0] + m[1] * g[2],
            m[0] * g[1] + m[1] * g[3],
            m[2] * g[0] + m[3] * g[2],
            m[2] * g[1] + m[3] * g[3],
        ];
        let mx = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if mx > 1e100 {
            for v in m.iter_mut() {
                *v /= mx;
            }
            log_scale += mx.ln();
        }
    }
    let tr = (m[0] + m[3]).abs();
    if tr == 0.0 {
        return 0.0;
    }
    let log_tr = tr.ln() + log_scale;
    if log_tr < 30.0 {
        let t = log_tr.exp();
        if t < 2.0 {
            0.0
        } else {
            2.0 * (t / 2.0).acosh()
        }
    } else {
        2.0 * (log_tr - std::f64::consts::LN_2)
    }
}

/// Which invariant lamination a leaf set approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// One leaf: an oriented geodesic with cached frames for fast distance and
/// side queries.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub geodesic: Geodesic,
    std_frame: Frame,
    std_inv: Frame,
    /// distance from the ball center to the leaf
    pub center_dist: f64,
}

impl Leaf {
    fn new(geodesic: Geodesic) -> Self {
        let std_frame = geodesic.standard_frame();
        let std_inv = std_frame.inverse();
        let center_dist = geodesic.dist_to_point(HPoint::I);
        Leaf { geodesic, std_frame, std_inv, center_dist }
    }

    /// Exact hyperbolic distance from a point (lower bound for the lifted
    /// frame distance).
    pub fn h2_dist(&self, p: HPoint) -> f64 {
        let z = self.std_inv.apply(p);
        (z.x.abs() / z.y).asinh()
    }

    /// Signed side of the oriented leaf.
    pub fn side_of(&self, p: HPoint) -> f64 {
        -self.std_inv.apply(p).x
    }

    /// Parameter of the nearest point of the leaf.
    pub fn nearest_parameter(&self, p: HPoint) -> f64 {
        let z = self.std_inv.apply(p);
        (z.x * z.x + z.y * z.y).sqrt().ln()
    }

    /// Lift of the unit-speed parametrization.
    pub fn frame_at(&self, t: f64) -> Frame {
        self.std_frame.compose(&Frame::diag_flow(t))
    }

    /// Euclidean direction angle of the leaf at its nearest point to `p`
    /// (used to coherentize crossing signs).
    pub fn direction_angle_near(&self, p: HPoint) -> f64 {
        let t = self.nearest_parameter(p);
        let q0 = self.frame_at(t).base_point();
        let q1 = self.frame_at(t + 1e-5).base_point();
        (q1.y - q0.y).atan2(q1.x - q0.x)
    }
}

/// A finite approximation of one invariant lamination: deck translates of the
/// depth-`n` iterated curve meeting a ball about the octagon center.
#[derive(Debug, Clone)]
pub struct LaminationApprox {
    pub side: Side,
    pub depth: usize,
    pub ball_radius: f64,
    pub leaves: Vec<Leaf>,
    /// measured growth rate, used to normalize transverse measures
    pub stretch: f64,
}

impl LaminationApprox {
    /// Minimum over leaves of the exact point-to-leaf distance.
    pub fn h2_dist(&self, p: HPoint) -> f64 {
        self.leaves
            .iter()
            .map(|l| l.h2_dist(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Transverse-measure normalization: one crossing contributes
    /// `stretch^{-depth}`.
    pub fn crossing_weight(&self) -> f64 {
        self.stretch.powi(-(self.depth as i32))
    }
}

/// Build the pair of depth-`n` approximations on a ball of the given radius.
///
/// The plus side iterates the curve forward (`f^n(a)` converges to the
/// attracting lamination), the minus side backward. Leaves of one side are
/// checked pairwise disjoint; a crossing within a side is a realization bug
/// and is reported as an error.
pub fn approximate_laminations(
    group: &FuchsianGroup,
    pa: &PaAutomorphism,
    depth: usize,
    ball_radius: f64,
) -> Result<(LaminationApprox, LaminationApprox)> {
    if depth > 12 {
        return Err(Error::Lamination(format!(
            "depth {depth} beyond desk scale (leaf count grows like k^n)"
        )));
    }
    let stretch = pa.stretch_estimate(group, (depth + 4).max(10));
    let ball = group.ball(ball_radius + 2.0 * crate::surface::octagon_circumradius() + 0.5);
    let mut out = Vec::new();
    for side in [Side::Plus, Side::Minus] {
        let seed = GroupWord::parse("a").unwrap();
        let word = pa.iterate(&seed, if side == Side::Plus { depth as i32 } else { -(depth as i32) });
        let leaves = lift_leaves(group, &word, &ball, ball_radius)?;
        check_disjoint(&leaves, side)?;
        out.push(LaminationApprox {
            side,
            depth,
            ball_radius,
            leaves,
            stretch,
        });
    }
    let minus = out.pop().unwrap();
    let plus = out.pop().unwrap();
    Ok((plus, minus))
}

/// Axis of the best cyclic rotation of `w` (nearest to the center), then all
/// ball-translates within `radius` of the center, deduplicated by endpoints.
fn lift_leaves(
    group: &FuchsianGroup,
    w: &GroupWord,
    ball: &[(GroupWord, Frame)],
    radius: f64,
) -> Result<Vec<Leaf>> {
    // recenter cyclically so the axis passes near the center
    let letters = w.letters();
    let mut best: Option<(f64, Geodesic)> = None;
    let step = (letters.len() / 64).max(1);
    for k in (0..letters.len()).step_by(step) {
        let rotated = GroupWord::from_letters(
            letters[k..].iter().chain(&letters[..k]).copied(),
        );
        let m = evaluate_scaled(group, &rotated);
        if let Ok(axis) = axis_from_entries(m) {
            let d = axis.dist_to_point(HPoint::I);
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, axis));
            }
        }
    }
    let (_, axis0) = best.ok_or_else(|| Error::Lamination("no axis found".into()))?;
    let mut leaves: Vec<Leaf> = Vec::new();
    let mut seen: std::collections::HashSet<(i64, i64)> = Default::default();
    for (_, g) in ball {
        let leaf = axis0.translate(g);
        if leaf.dist_to_point(HPoint::I) > radius {
            continue;
        }
        let key = endpoint_key(&leaf);
        if seen.insert(key) {
            leaves.push(Leaf::new(leaf));
        }
    }
    if leaves.is_empty() {
        return Err(Error::Lamination("no leaves meet the ball".into()));
    }
    Ok(leaves)
}

fn endpoint_key(g: &Geodesic) -> (i64, i64) {
    let a = (g.neg.to_angle() * 1e8).round() as i64;
    let b = (g.pos.to_angle() * 1e8).round() as i64;
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Long matrix products with running renormalization (axes only need the
/// entries up to a positive scale).
fn evaluate_scaled(group: &FuchsianGroup, w: &GroupWord) -> [f64; 4] {
    let mut m = [1.0f64, 0.0, 0.0, 1.0];
    for &x in w.letters() {
        let g = group.generator(x).entries();
        m = [
            m[0] * g[0] + m[1] * g[2],
            m[0] * g[1] + m[1] * g[3],
            m[2] * g[0] + m[3] * g[2],
            m[2] * g[1] + m[3] * g[3],
        ];
        let mx = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if mx > 1e100 {
            for v in m.iter_mut() {
                *v /= mx;
            }
        }
    }
    m
}

fn check_disjoint(leaves: &[Leaf], side: Side) -> Result<()> {
    for i in 0..leaves.len() {
        for j in (i + 1)..leaves.len() {
            if interleave(&leaves[i].geodesic, &leaves[j].geodesic) {
                return Err(Error::Lamination(format!(
                    "{side:?} leaves {i} and {j} cross: the realization is broken"
                )));
            }
        }
    }
    Ok(())
}

/// Strict endpoint interleaving on the circle.
fn interleave(g1: &Geodesic, g2: &Geodesic) -> bool {
    let margin = 1e-9;
    let (a1, b1) = (g1.neg.to_angle(), g1.pos.to_angle());
    let (a2, b2) = (g2.neg.to_angle(), g2.pos.to_angle());
    let between = |x: f64, lo: f64, hi: f64| -> Option<bool> {
        // is x strictly inside the arc (lo -> hi) counterclockwise?
        let span = (hi - lo).rem_euclid(std::f64::consts::TAU);
        let off = (x - lo).rem_euclid(std::f64::consts::TAU);
        if off < margin || off > span - margin {
            None // touching an endpoint: not a transverse crossing
        } else {
            Some(off < span)
        }
    };
    match (between(a2, a1, b1), between(b2, a1, b1)) {
        (Some(x), Some(y)) => x != y,
        _ => false,
    }
}

/// Crossing angle of two geodesics if they cross transversally.
pub fn crossing_angle(g1: &Geodesic, g2: &Geodesic) -> Option<f64> {
    match g1.relation_to(g2) {
        Ok(crate::hyp2::GeodesicRelation::Cross { angle, .. }) => Some(angle),
        _ => None,
    }
}

/// Minimal lifted distance between the two sides, over crossing pairs and
/// near-miss pairs: the floor that the height-function cutoff must respect.
pub fn cross_side_separation(plus: &LaminationApprox, minus: &LaminationApprox) -> f64 {
    let mut min = f64::INFINITY;
    for lp in &plus.leaves {
        for lm in &minus.leaves {
            // cheap pruning: only pairs with close approach matter
            let rel = match lp.geodesic.relation_to(&lm.geodesic) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let near = match rel {
                crate::hyp2::GeodesicRelation::Cross { at, angle } => {
                    if angle >= min {
                        continue;
                    }
                    at
                }
                crate::hyp2::GeodesicRelation::Disjoint { at, dist } => {
                    if dist >= min {
                        continue;
                    }
                    at
                }
                crate::hyp2::GeodesicRelation::Asymptotic => continue,
            };
            // minimize the frame distance near the closest configuration
            let v = lp.frame_at(near);
            if let Ok(d) = crate::hyp2::tangent_to_geodesic_distance(&v, &lm.geodesic) {
                // also scan a few nearby parameters of the plus leaf
                let mut local = d;
                for dt in [-1.0, -0.4, 0.4, 1.0] {
                    let v = lp.frame_at(near + dt);
                    if let Ok(d2) = crate::hyp2::tangent_to_geodesic_distance(&v, &lm.geodesic) {
                        local = local.min(d2);
                    }
                }
                min = min.min(local);
            }
        }
    }
    min
}

/// Symmetric Hausdorff distance between two leaf sets, restricted to the ball
/// of the given radius, by dense sampling along the leaves.
pub fn hausdorff_between(a: &[Leaf], b: &[Leaf], radius: f64) -> f64 {
    let one_way = |from: &[Leaf], to: &[Leaf]| -> f64 {
        let mut worst: f64 = 0.0;
        for leaf in from {
            let t0 = leaf.nearest_parameter(HPoint::I);
            let mut t = t0 - radius;
            while t <= t0 + radius {
                let p = leaf.frame_at(t).base_point();
                if dist_h2(p, HPoint::I) <= radius {
                    let d = to
                        .iter()
                        .map(|l| l.h2_dist(p))
                        .fold(f64::INFINITY, f64::min);
                    worst = worst.max(d);
                }
                t += 0.1;
            }
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}
