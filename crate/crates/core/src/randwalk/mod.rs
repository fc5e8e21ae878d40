//! Random walks on finitely generated groups acting on the hyperbolic plane:
//! sample paths, tracked geodesics, Gromov products and shadows, drift and
//! deviation statistics, and the Z-projection walk used by the 3-manifold
//! fiber statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hyp2::{dist_h2, Boundary, Frame, Geodesic, HPoint};
use crate::surface::{geodesic_through, FuchsianGroup, GroupWord};
use crate::{Error, Result};

/// A finitely supported step distribution on group words.
#[derive(Debug, Clone)]
pub struct StepDistribution {
    support: Vec<GroupWord>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepDistribution {
    pub fn new(support: Vec<GroupWord>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::InvalidInput("support/weights size mismatch".into()));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidInput("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(StepDistribution { support, weights, cumulative })
    }

    /// Uniform distribution on the eight octagon side pairings.
    pub fn uniform_octagon() -> Self {
        let support = (0..8u8)
            .map(|x| GroupWord::from_letters([x]))
            .collect::<Vec<_>>();
        StepDistribution::new(support, vec![0.125; 8]).unwrap()
    }

    pub fn support(&self) -> &[GroupWord] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative.partition_point(|c| *c < u).min(self.support.len() - 1)
    }

    /// Check that the support generates every octagon generator as a
    /// semigroup product of length at most 4.
    pub fn generates_semigroup(&self, group: &FuchsianGroup) -> bool {
        let mut reachable: Vec<Frame> = vec![Frame::IDENTITY];
        let mut frontier: Vec<Frame> = vec![Frame::IDENTITY];
        for _ in 0..4 {
            let mut next = Vec::new();
            for f in &frontier {
                for w in &self.support {
                    let g = f.compose(&group.evaluate(w));
                    if !reachable.iter().any(|h| h.approx_eq(&g, 1e-9)) {
                        reachable.push(g);
                        next.push(g);
                    }
                }
            }
            frontier = next;
        }
        (0..8u8).all(|x| {
            let target = group.generator(x);
            reachable.iter().any(|h| h.approx_eq(target, 1e-9))
        })
    }
}

/// Unit-determinant matrix stored as max-normalized entries with an explicit
/// log scale: the true matrix is `e^{log} * m` and `det(m) = e^{-2 log}`.
/// Survives products of thousands of hyperbolic generators.
#[derive(Debug, Clone, Copy)]
pub struct ScaledFrame {
    m: [f64; 4],
    log: f64,
}

impl ScaledFrame {
    pub const IDENTITY: ScaledFrame = ScaledFrame { m: [1.0, 0.0, 0.0, 1.0], log: 0.0 };

    /// Right-multiply by a determinant-1 frame.
    pub fn compose_unit(&self, g: &Frame) -> ScaledFrame {
        let a = &self.m;
        let b = g.entries();
        let mut m = [
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ];
        let mx = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut log = self.log;
        if mx > 0.0 {
            for v in m.iter_mut() {
                *v /= mx;
            }
            log += mx.ln();
        }
        ScaledFrame { m, log }
    }

    /// `d(i, M i)` from the Frobenius norm: `cosh d = |M|_F^2 / 2`, evaluated
    /// in log scale (all terms positive, no cancellation).
    pub fn dist_to_origin(&self) -> f64 {
        let s2 = self.m.iter().map(|v| v * v).sum::<f64>();
        let log_arg = 2.0 * self.log + s2.ln() - std::f64::consts::LN_2;
        if log_arg < 30.0 {
            log_arg.exp().max(1.0).acosh()
        } else {
            log_arg + std::f64::consts::LN_2
        }
    }

    /// The point `M i`, meaningful only while the entries stay moderate.
    pub fn orbit_point(&self) -> HPoint {
        let [a, b, c, d] = self.m;
        let den = c * c + d * d;
        let x = (a * c + b * d) / den;
        let y = ((-2.0 * self.log).exp() / den).max(f64::MIN_POSITIVE);
        HPoint::new(x, y)
    }

    /// Boundary direction of `M i` seen from the center: the forward ideal
    /// endpoint of the ray from `i` through the orbit point. For deep orbits
    /// the orbit point hugs the real axis and this is its real coordinate;
    /// orbits climbing toward infinity are handled by the honest ray.
    pub fn boundary_point(&self) -> Boundary {
        let p = self.orbit_point();
        if crate::hyp2::dist_h2(HPoint::I, p) < 1e-9 {
            return Boundary::Real(0.0); // direction undefined this close
        }
        crate::surface::geodesic_through(HPoint::I, p).pos
    }

    /// `M^{-1}(boundary_point(M))`. In the generic deep regime (orbit point
    /// near the real axis) this simplifies exactly to `c/d` on the entries,
    /// which dodges the catastrophic cancellation of the direct pullback.
    pub fn back_direction(&self) -> Boundary {
        let [a, b, c, d] = self.m;
        let p = self.orbit_point();
        if p.y < 1e-3 {
            if d.abs() < 1e-200 {
                return Boundary::Infinity;
            }
            return Boundary::Real(c / d);
        }
        // moderate regime: the direct pullback is well conditioned
        let inv = [d, -b, -c, a];
        match self.boundary_point() {
            Boundary::Infinity => {
                if inv[2].abs() < 1e-200 {
                    Boundary::Infinity
                } else {
                    Boundary::Real(inv[0] / inv[2])
                }
            }
            Boundary::Real(x) => {
                let den = inv[2] * x + inv[3];
                if den.abs() < 1e-200 {
                    Boundary::Infinity
                } else {
                    Boundary::Real((inv[0] * x + inv[1]) / den)
                }
            }
        }
    }
}

/// A bi-infinite sample path `w_n`, `n in [-N, N]`, with `w_0 = 1` and
/// independent forward/backward step streams derived from one seed. Locations
/// are kept in log scale; the step sequence is kept for relative queries.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub seed: u64,
    locations: Vec<ScaledFrame>,
    fwd_steps: Vec<u32>,
    bwd_steps: Vec<u32>,
    half_len: usize,
}

impl SamplePath {
    pub fn half_len(&self) -> usize {
        self.half_len
    }

    /// Location `w_n`, `|n| <= half_len`, in log scale.
    pub fn location(&self, n: i64) -> &ScaledFrame {
        &self.locations[(n + self.half_len as i64) as usize]
    }

    /// Orbit point `w_n * x0`; valid while the location is near enough for
    /// floating point (fine for |n| a few hundred steps).
    pub fn orbit(&self, n: i64) -> HPoint {
        self.location(n).orbit_point()
    }

    /// `d(x0, w_n x0)`, stable at any depth.
    pub fn dist_to_origin(&self, n: i64) -> f64 {
        self.location(n).dist_to_origin()
    }

    /// index into the step support for the move `w_n -> w_{n+1}`
    pub fn step_index(&self, n: i64) -> usize {
        if n >= 0 {
            self.fwd_steps[n as usize] as usize
        } else {
            self.bwd_steps[(-n - 1) as usize] as usize
        }
    }

    /// Group element `w_n^{-1} w_{n+1}` of the move `w_n -> w_{n+1}`. The
    /// backward stream draws steps `s` with `w_{-(k+1)} = w_{-k} s^{-1}`, so
    /// the move element is the drawn step itself in both directions.
    pub fn step_frame(&self, group: &FuchsianGroup, mu: &StepDistribution, n: i64) -> Frame {
        group.evaluate(&mu.support()[self.step_index(n)])
    }

    /// `d(w_i x0, w_j x0)` by composing the intervening steps.
    pub fn dist_between(&self, group: &FuchsianGroup, mu: &StepDistribution, i: i64, j: i64) -> f64 {
        let (lo, hi) = (i.min(j), i.max(j));
        let mut m = ScaledFrame::IDENTITY;
        for n in lo..hi {
            m = m.compose_unit(&self.step_frame(group, mu, n));
        }
        m.dist_to_origin()
    }

    /// Group word of `w_n` (resolved from the step indices).
    pub fn word(&self, mu: &StepDistribution, n: i64) -> GroupWord {
        let mut w = GroupWord::identity();
        if n >= 0 {
            for k in 0..n {
                w.extend(&mu.support()[self.fwd_steps[k as usize] as usize]);
            }
        } else {
            for k in 0..(-n) {
                w.extend(&mu.support()[self.bwd_steps[k as usize] as usize].inverse());
            }
        }
        w
    }
}

/// Sample a bi-infinite walk of `2N+1` locations, deterministic in `seed`.
pub fn sample_walk(
    group: &FuchsianGroup,
    mu: &StepDistribution,
    half_len: usize,
    seed: u64,
) -> SamplePath {
    let mut fwd = ChaCha8Rng::seed_from_u64(seed);
    let mut bwd = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let support_frames: Vec<Frame> = mu.support().iter().map(|w| group.evaluate(w)).collect();
    let mut locations = vec![ScaledFrame::IDENTITY; 2 * half_len + 1];
    let mut fwd_steps = Vec::with_capacity(half_len);
    let mut bwd_steps = Vec::with_capacity(half_len);
    for n in 0..half_len {
        let idx = half_len + n;
        let s = mu.sample(&mut fwd);
        fwd_steps.push(s as u32);
        locations[idx + 1] = locations[idx].compose_unit(&support_frames[s]);
    }
    for n in 0..half_len {
        let idx = half_len - n;
        let s = mu.sample(&mut bwd);
        bwd_steps.push(s as u32);
        locations[idx - 1] = locations[idx].compose_unit(&support_frames[s].inverse());
    }
    SamplePath { seed, locations, fwd_steps, bwd_steps, half_len }
}

/// Gromov product `<b, c>_a = (d(a,b) + d(a,c) - d(b,c)) / 2`.
pub fn gromov_product(a: HPoint, b: HPoint, c: HPoint) -> f64 {
    0.5 * (dist_h2(a, b) + dist_h2(a, c) - dist_h2(b, c))
}

/// Gromov product of an interior point with a boundary point, evaluated far
/// along the ray from `a` to `xi` (exponentially convergent).
pub fn gromov_product_boundary(a: HPoint, b: HPoint, xi: Boundary) -> f64 {
    const FAR: f64 = 60.0;
    let ray = match xi {
        Boundary::Infinity => Geodesic::new(Boundary::Real(a.x), Boundary::Infinity),
        Boundary::Real(x) => {
            if (a.x - x).abs() < 1e-300 {
                Geodesic::new(Boundary::Infinity, Boundary::Real(x))
            } else {
                let g = geodesic_through(a, HPoint::new(x, f64::MIN_POSITIVE.max(1e-12)));
                // orient toward xi
                match g.pos {
                    Boundary::Real(p) if (p - x).abs() < 1e-6 => g,
                    _ => g.reversed(),
                }
            }
        }
    };
    let t = ray.nearest_parameter(a);
    let far = ray.point_at(t + FAR);
    gromov_product(a, b, far)
}

/// Shadow membership for interior targets: `<b, c>_base >= r`.
pub fn shadow_contains(base: HPoint, b: HPoint, r: f64, c: HPoint) -> bool {
    gromov_product(base, b, c) >= r
}

/// Shadow membership for boundary targets.
pub fn shadow_contains_boundary(base: HPoint, b: HPoint, r: f64, xi: Boundary) -> bool {
    gromov_product_boundary(base, b, xi) >= r
}

/// A tracked geodesic: the geodesic between the empirical forward and
/// backward limits of a sample path, with nearest-point projection times and
/// orbit-to-geodesic distances.
#[derive(Debug, Clone)]
pub struct TrackedGeodesic {
    pub geodesic: Geodesic,
    /// `t_n` = parameter of the nearest point of the geodesic to `w_n x0`,
    /// anchored at the projection of `x0` (`t_0 = 0`); index `n + half_len`
    pub projection_times: Vec<f64>,
    /// `d(w_n x0, gamma)`; same indexing
    pub distances: Vec<f64>,
    pub backward_angle: f64,
    pub forward_angle: f64,
}

/// Track the geodesic of a sample path. The boundary limit is operationalized
/// as the direction of `w_{+-N} x0` at the largest computed N; the projection
/// times and distances are accumulated relative to the walking frame (one
/// well-conditioned Mobius update per step), which stays accurate at depths
/// where direct matrix coordinates degenerate.
pub fn track_geodesic(
    group: &FuchsianGroup,
    mu: &StepDistribution,
    path: &SamplePath,
) -> Result<TrackedGeodesic> {
    let n = path.half_len();
    let fwd = path.location(n as i64).boundary_point();
    let bwd = path.location(-(n as i64)).boundary_point();
    let fwd_angle = fwd.to_angle();
    let bwd_angle = bwd.to_angle();
    if crate::hyp2::angle_distance(fwd_angle, bwd_angle) < 1e-3 {
        return Err(Error::UnseparatedLimits);
    }
    let geodesic = Geodesic::new(bwd, fwd);
    let len = 2 * n + 1;
    // Relative endpoints eta_m = w_m^{-1}(bwd), xi_m = w_m^{-1}(fwd): each is
    // carried only in its numerically stable sweep direction (away from the
    // walker the one-step boundary maps contract). The initializations use
    // the exact identity w^{-1}(dir(w i)) = c/d on the scaled entries.
    let steps: Vec<Frame> = (-(n as i64)..n as i64)
        .map(|m| path.step_frame(group, mu, m))
        .collect();
    let mut eta = vec![Boundary::Infinity; len];
    eta[0] = path.location(-(n as i64)).back_direction();
    for k in 0..(len - 1) {
        eta[k + 1] = steps[k].inverse().apply_boundary(eta[k]);
    }
    let mut xi = vec![Boundary::Infinity; len];
    xi[len - 1] = path.location(n as i64).back_direction();
    for k in (0..(len - 1)).rev() {
        xi[k] = steps[k].apply_boundary(xi[k + 1]);
    }
    let mut distances = vec![0.0f64; len];
    let mut projection_times = vec![0.0f64; len];
    let mut gammas: Vec<Geodesic> = Vec::with_capacity(len);
    for m in 0..len {
        if eta[m].approx_eq(xi[m], 1e-12) {
            return Err(Error::UnseparatedLimits);
        }
        let g = Geodesic::new(eta[m], xi[m]);
        distances[m] = g.dist_to_point(HPoint::I);
        gammas.push(g);
    }
    for m in 0..(len - 1) {
        let g = &gammas[m];
        let shift = g.nearest_parameter(steps[m].apply(HPoint::I)) - g.nearest_parameter(HPoint::I);
        projection_times[m + 1] = projection_times[m] + shift;
    }
    let t_origin = projection_times[n];
    for t in projection_times.iter_mut() {
        *t -= t_origin;
    }
    Ok(TrackedGeodesic {
        geodesic,
        projection_times,
        distances,
        backward_angle: bwd_angle,
        forward_angle: fwd_angle,
    })
}

/// Kolmogorov-Smirnov p-value of a sample in `[0,1)` against the uniform law
/// (asymptotic Kolmogorov distribution).
pub fn ks_uniform_pvalue(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sample.iter().enumerate() {
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((x - lo).abs()).max((hi - x).abs());
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        p += 2.0 * (-1.0f64).powi(k as i32 + 1) * (-2.0 * kf * kf * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}

/// Exceedance table: `P(statistic >= threshold)` per threshold, with a
/// log-linear fit over the resolvable band.
#[derive(Debug, Clone)]
pub struct DecayTable {
    pub thresholds: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// least-squares slope of `log frequency` against the threshold, over the
    /// band where the frequency is in `[1e-3, 0.5]`
    pub log_slope: f64,
    pub r_squared: f64,
}

pub(crate) fn decay_table(thresholds: Vec<f64>, samples: &[f64]) -> DecayTable {
    let n = samples.len() as f64;
    let frequencies: Vec<f64> = thresholds
        .iter()
        .map(|r| samples.iter().filter(|s| **s >= *r).count() as f64 / n)
        .collect();
    let pts: Vec<(f64, f64)> = thresholds
        .iter()
        .zip(&frequencies)
        .filter(|(_, f)| **f >= 1e-3 && **f <= 0.5)
        .map(|(r, f)| (*r, f.ln()))
        .collect();
    let (log_slope, r_squared) = linear_fit(&pts);
    DecayTable { thresholds, frequencies, log_slope, r_squared }
}

/// Least-squares slope and R^2 of `y` against `x`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    if pts.len() < 2 {
        return (0.0, 0.0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = (sxy * sxy) / (sxx * syy);
    (slope, r2)
}

/// Gromov-product tail statistics over many seeds: for each path, the product
/// `<x0, w_N x0>_{w_i x0}` at a seed-chosen intermediate time `i`.
pub fn tail_statistics(
    group: &FuchsianGroup,
    mu: &StepDistribution,
    half_len: usize,
    seeds: std::ops::Range<u64>,
    thresholds: Vec<f64>,
) -> DecayTable {
    use rayon::prelude::*;
    let samples: Vec<f64> = seeds
        .collect::<Vec<u64>>()
        .par_iter()
        .map(|&seed| {
            let path = sample_walk(group, mu, half_len, seed);
            let mut pick = ChaCha8Rng::seed_from_u64(seed ^ 0x5bf0_3635);
            let i = pick.gen_range(0..=half_len as i64);
            let n = half_len as i64;
            // 1/2 (d(w_i, x0) + d(w_i, w_n) - d(x0, w_n)), each leg in
            // log-scale matrix form
            0.5 * (path.dist_to_origin(i) + path.dist_between(group, mu, i, n)
                - path.dist_to_origin(n))
        })
        .collect();
    decay_table(thresholds, &samples)
}

/// Diagonal-neighborhood statistics: both endpoints of one bi-infinite path in
/// a common shadow of the stated depth. The shadow base is the nearest point
/// of the tracked geodesic to the center, so the depth is the Gromov product
/// of the two limit points up to the hyperbolicity constant.
pub fn diagonal_measure(
    group: &FuchsianGroup,
    mu: &StepDistribution,
    half_len: usize,
    seeds: std::ops::Range<u64>,
    thresholds: Vec<f64>,
) -> DecayTable {
    use rayon::prelude::*;
    let samples: Vec<f64> = seeds
        .collect::<Vec<u64>>()
        .par_iter()
        .filter_map(|&seed| {
            let path = sample_walk(group, mu, half_len, seed);
            let tracked = track_geodesic(group, mu, &path).ok()?;
            let g = &tracked.geodesic;
            let b = crate::hyp2::nearest_point_projection(g, HPoint::I);
            let depth = gromov_product_boundary(HPoint::I, b, g.pos)
                .min(gromov_product_boundary(HPoint::I, b, g.neg));
            Some(depth)
        })
        .collect();
    decay_table(thresholds, &samples)
}

/// The Z-projection of a step distribution on `pi_1(S) x| <f>`: the step
/// support is octagon letters (weight on the fiber 0), `f^{+-1}`, and an
/// optional lazy identity step.
#[derive(Debug, Clone)]
pub struct ZProjectedWalk {
    /// distinct Z-increments in the support
    pub increments: Vec<i64>,
    pub weights: Vec<f64>,
}

impl ZProjectedWalk {
    /// Standard 3-manifold-group step distribution: uniform on the eight
    /// octagon letters and `f^{+-1}`, plus a lazy step of weight `lazy`.
    pub fn mapping_torus(lazy: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lazy) {
            return Err(Error::InvalidInput("lazy weight must be in [0,1)".into()));
        }
        let w = (1.0 - lazy) / 10.0;
        let mut increments = vec![0i64; 8];
        let mut weights = vec![w; 8];
        increments.push(1);
        weights.push(w);
        increments.push(-1);
        weights.push(w);
        if lazy > 0.0 {
            increments.push(0);
            weights.push(lazy);
        }
        Ok(ZProjectedWalk { increments, weights })
    }

    /// Aperiodicity of the projected walk: increments must not all lie in a
    /// single nontrivial residue class.
    pub fn check_aperiodic(&self) -> Result<()> {
        // gcd of pairwise differences of support elements
        let base = self.increments[0];
        let mut g: i64 = 0;
        for &x in &self.increments[1..] {
            g = gcd(g, (x - base).abs());
        }
        if g != 1 {
            return Err(Error::PeriodicProjection);
        }
        Ok(())
    }

    /// Exact distribution of `phi(w_n)` by convolution.
    pub fn exact_pmf(&self, n: usize) -> Vec<(i64, f64)> {
        let mut pmf: std::collections::BTreeMap<i64, f64> = [(0i64, 1.0)].into();
        for _ in 0..n {
            let mut next: std::collections::BTreeMap<i64, f64> = Default::default();
            for (&x, &p) in &pmf {
                for (&dx, &w) in self.increments.iter().zip(&self.weights) {
                    *next.entry(x + dx).or_insert(0.0) += p * w;
                }
            }
            pmf = next;
        }
        pmf.into_iter().collect()
    }

    /// Monte-Carlo trajectories of the Z-walk: `phi(w_k)` for `k <= n`.
    pub fn simulate(&self, n: usize, seed: u64) -> Vec<i64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cum = Vec::with_capacity(self.weights.len());
        let mut acc = 0.0;
        for w in &self.weights {
            acc += *w;
            cum.push(acc);
        }
        let mut x = 0i64;
        let mut out = Vec::with_capacity(n + 1);
        out.push(0);
        for _ in 0..n {
            let u: f64 = rng.gen();
            let k = cum.partition_point(|c| *c < u).min(self.increments.len() - 1);
            x += self.increments[k];
            out.push(x);
        }
        out
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Per-n empirical `sup_x P(phi(w_n) = x)` over Monte-Carlo seeds, and the
/// near-fiber occupation fraction per time horizon.
#[derive(Debug, Clone)]
pub struct ZProjectionStats {
    pub ns: Vec<usize>,
    /// empirical sup of the pmf of `phi(w_n)` at each n
    pub sup_pmf: Vec<f64>,
    /// `sqrt(n) * sup_pmf`, the local-limit normalization
    pub normalized: Vec<f64>,
    /// per horizon T: fraction of times `k <= T` with `|phi(w_k)| <= fiber_window`
    pub horizons: Vec<usize>,
    pub near_fiber_fraction: Vec<f64>,
    /// fitted exponent of `fraction ~ T^{-beta}`
    pub beta: f64,
}

pub fn z_projection_stats(
    walk: &ZProjectedWalk,
    ns: Vec<usize>,
    seeds: u64,
    fiber_window: i64,
) -> Result<ZProjectionStats> {
    use rayon::prelude::*;
    walk.check_aperiodic()?;
    let n_max = *ns.iter().max().unwrap_or(&0);
    let horizons: Vec<usize> = ns.clone();
    // simulate all trajectories once
    let trajectories: Vec<Vec<i64>> = (0..seeds)
        .collect::<Vec<u64>>()
        .par_iter()
        .map(|&s| walk.simulate(n_max, s))
        .collect();
    let mut sup_pmf = Vec::with_capacity(ns.len());
    for &n in &ns {
        let mut counts: std::collections::HashMap<i64, usize> = Default::default();
        for t in &trajectories {
            *counts.entry(t[n]).or_insert(0) += 1;
        }
        let max = counts.values().copied().max().unwrap_or(0);
        sup_pmf.push(max as f64 / seeds as f64);
    }
    let normalized = ns
        .iter()
        .zip(&sup_pmf)
        .map(|(n, p)| (*n as f64).sqrt() * p)
        .collect();
    let mut near_fiber_fraction = Vec::with_capacity(horizons.len());
    for &t_h in &horizons {
        let mut acc = 0.0;
        for t in &trajectories {
            let hits = t[..=t_h].iter().filter(|x| x.abs() <= fiber_window).count();
            acc += hits as f64 / (t_h + 1) as f64;
        }
        near_fiber_fraction.push(acc / trajectories.len() as f64);
    }
    let pts: Vec<(f64, f64)> = horizons
        .iter()
        .zip(&near_fiber_fraction)
        .map(|(t, f)| ((*t as f64).ln(), f.ln()))
        .collect();
    let (slope, _) = linear_fit(&pts);
    Ok(ZProjectionStats {
        ns,
        sup_pmf,
        normalized,
        horizons,
        near_fiber_fraction,
        beta: -slope,
    })
}

/// Drift estimate `d(x0, w_N x0) / N` over seeds, with a percentile bootstrap
/// confidence interval.
#[derive(Debug, Clone)]
pub struct DriftEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub per_seed: Vec<f64>,
}

pub fn drift_estimate(
    group: &FuchsianGroup,
    mu: &StepDistribution,
    n: usize,
    seeds: std::ops::Range<u64>,
    confidence: f64,
) -> DriftEstimate {
    use rayon::prelude::*;
    let per_seed: Vec<f64> = seeds
        .collect::<Vec<u64>>()
        .par_iter()
        .map(|&s| {
            let path = sample_walk(group, mu, n, s);
            path.dist_to_origin(n as i64) / n as f64
        })
        .collect();
    let mean = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    // deterministic bootstrap
    let mut boot = ChaCha8Rng::seed_from_u64(0xb007);
    let mut means: Vec<f64> = (0..2000)
        .map(|_| {
            let mut acc = 0.0;
            for _ in 0..per_seed.len() {
                acc += per_seed[boot.gen_range(0..per_seed.len())];
            }
            acc / per_seed.len() as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - confidence) / 2.0;
    let lo = ((means.len() as f64) * alpha) as usize;
    let hi = (((means.len() as f64) * (1.0 - alpha)) as usize).min(means.len() - 1);
    DriftEstimate { mean, ci_low: means[lo], ci_high: means[hi], per_seed }
}

#[cfg(test)]
mod tests;
