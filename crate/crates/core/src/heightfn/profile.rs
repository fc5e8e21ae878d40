use super::{LaminationApprox, Leaf, Side};
use crate::flatmodel::SolvPath;
use crate::hyp2::{frame_distance, Frame, Geodesic, HPoint, Interval};
use crate::{Error, Result};

/// Clamped floor `max(x, c)`.
pub fn floor_clamp(x: f64, c: f64) -> f64 {
    x.max(c)
}

/// Configuration of the height function.
#[derive(Debug, Clone)]
pub struct HeightConfig {
    /// cutoff `theta`; must stay below half the measured cross-side separation
    pub theta: f64,
    /// stretch factor used as the logarithm base and metric parameter
    pub k: f64,
}

impl HeightConfig {
    pub fn new(theta: f64, k: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) || !(k > 1.0) {
            return Err(Error::InvalidInput(format!(
                "height config needs 0 < theta < 1 < k, got theta={theta}, k={k}"
            )));
        }
        Ok(HeightConfig { theta, k })
    }

    /// `log(1/theta)`, the radius offset in the height formula.
    pub fn log_inv_theta(&self) -> f64 {
        (1.0 / self.theta).ln()
    }

    /// The paper-style safe cutoff from the measured constants record: take
    /// `theta_min` through the sixth-power recipe. Astronomically small for
    /// honest constants; kept available, not used as the default.
    pub fn theta_recipe(
        theta_min: f64,
        t0: f64,
        l_lambda: f64,
        rho_lambda: f64,
        d_lambda: f64,
        q_lambda: f64,
        c_lambda: f64,
    ) -> f64 {
        theta_min.powi(6)
            * (-6.0 * (t0 + l_lambda + 3.0 * rho_lambda + d_lambda + q_lambda * c_lambda)).exp()
    }
}

/// Minimum lifted distance from a frame to a leaf set, exact H2 pruning plus
/// golden-section refinement on the surviving candidates.
fn min_frame_distance(v: &Frame, leaves: &[Leaf], floor_cut: f64) -> (f64, Option<usize>) {
    let p = v.base_point();
    // the base-plane distance is a lower bound for the lifted distance, so
    // only leaves passing within the cut can matter
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for (i, l) in leaves.iter().enumerate() {
        let lower = l.h2_dist(p);
        if lower < floor_cut {
            candidates.push((lower, i));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    let mut arg = None;
    for &(lower, i) in &candidates {
        if lower >= best {
            break;
        }
        let d = golden_min(v, &leaves[i]);
        if d < best {
            best = d;
            arg = Some(i);
        }
    }
    (best, arg)
}

/// Golden-section minimum of `t -> d(v, leaf^1(t))`, bracketed by the base
/// projection.
fn golden_min(v: &Frame, leaf: &Leaf) -> f64 {
    let p = v.base_point();
    let center = leaf.nearest_parameter(p);
    let reach = leaf.h2_dist(p) + std::f64::consts::PI + 1.0;
    let f = |t: f64| frame_distance(v, &leaf.frame_at(t));
    let (mut a, mut b) = (center - reach, center + reach);
    let mut best = f64::INFINITY;
    let mut best_t = center;
    for k in 0..=24 {
        let t = a + (b - a) * (k as f64) / 24.0;
        let d = f(t);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    let step = (b - a) / 24.0;
    a = best_t - step;
    b = best_t + step;
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > 1e-9 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - phi * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2).min(best)
}

/// Height of a single frame: the clamped double-log formula over both sides.
pub fn height_of_frame(
    v: &Frame,
    plus: &LaminationApprox,
    minus: &LaminationApprox,
    cfg: &HeightConfig,
) -> Result<f64> {
    let cut = 1.0f64.min(0.5); // only distances below e^{-1} matter
    let (dp, _) = min_frame_distance(v, &plus.leaves, cut.max(cfg.theta * 4.0).max(0.4));
    let (dm, _) = min_frame_distance(v, &minus.leaves, cut.max(cfg.theta * 4.0).max(0.4));
    if dp < 1e-12 || dm < 1e-12 {
        return Err(Error::Exceptional(
            "frame lies on a leaf lift of the approximation".into(),
        ));
    }
    Ok(height_from_distances(dp, dm, cfg))
}

pub fn height_from_distances(dp: f64, dm: f64, cfg: &HeightConfig) -> f64 {
    let log_k = cfg.k.ln();
    let rp = floor_clamp((1.0 / dp).ln(), 1.0);
    let rm = floor_clamp((1.0 / dm).ln(), 1.0);
    let up = floor_clamp(rp - cfg.log_inv_theta(), 1.0);
    let um = floor_clamp(rm - cfg.log_inv_theta(), 1.0);
    (up.ln() - um.ln()) / log_k
}

/// One transverse crossing of the profile geodesic with a leaf.
#[derive(Debug, Clone, Copy)]
pub struct CrossingRecord {
    pub t: f64,
    pub side: Side,
    pub angle: f64,
    /// signed contribution to the developed transverse coordinate
    pub sign: f64,
}

/// Sampled radius/height data along a unit-speed geodesic, with developed
/// transverse measures and the cumulative test-path arclength.
#[derive(Debug, Clone)]
pub struct HeightProfile {
    pub t: Vec<f64>,
    pub rho_plus: Vec<f64>,
    pub rho_minus: Vec<f64>,
    pub h: Vec<f64>,
    pub dx_cum: Vec<f64>,
    pub dy_cum: Vec<f64>,
    pub arclen: Vec<f64>,
    pub crossings: Vec<CrossingRecord>,
    pub cfg: HeightConfig,
}

impl HeightProfile {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// CSV dump, fixed column order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rho_plus,rho_minus,h,dx_cum,dy_cum,arclen\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.t[i],
                self.rho_plus[i],
                self.rho_minus[i],
                self.h[i],
                self.dx_cum[i],
                self.dy_cum[i],
                self.arclen[i]
            ));
        }
        out
    }
}

/// Compute a height profile along `gamma(t)`, `t in [t_lo, t_hi]`, sampled
/// every `step`.
///
/// The geodesic must be non-exceptional for the approximation: its endpoints
/// must not coincide with a leaf endpoint of either side. Long ranges are
/// followed through the quotient: the frame is re-reduced to the fundamental
/// domain whenever it drifts out, so the domain-local leaf sets stay valid.
pub fn profile_geodesic(
    gamma: &Geodesic,
    plus: &LaminationApprox,
    minus: &LaminationApprox,
    cfg: &HeightConfig,
    t_range: (f64, f64),
    step: f64,
) -> Result<HeightProfile> {
    check_non_exceptional(gamma, plus)?;
    check_non_exceptional(gamma, minus)?;
    let group = crate::surface::octagon_group();
    let start = gamma.frame_at(t_range.0);
    profile_flow(&group, &start, plus, minus, cfg, t_range.1 - t_range.0, step, t_range.0)
}

/// Core profile driver: flow a unit tangent frame on the quotient for `total`
/// time, evaluating the radius and height functions at each reduced sample
/// and recording transverse crossings with the domain-local leaf sets.
#[allow(clippy::too_many_arguments)]
pub fn profile_flow(
    group: &crate::surface::FuchsianGroup,
    start: &Frame,
    plus: &LaminationApprox,
    minus: &LaminationApprox,
    cfg: &HeightConfig,
    total: f64,
    step: f64,
    t_offset: f64,
) -> Result<HeightProfile> {
    let n = (total / step).round() as usize;
    let mut t = Vec::with_capacity(n + 1);
    let mut rho_plus = Vec::with_capacity(n + 1);
    let mut rho_minus = Vec::with_capacity(n + 1);
    let mut h = Vec::with_capacity(n + 1);
    let mut crossings = Vec::new();
    let floor_cut: f64 = 0.45; // distances beyond this clamp to rho = 1 anyway
    let (mut frame, _) = group.reduce_frame(start)?;
    let mut prev_point: Option<HPoint> = None;
    let mut last_dir = [f64::NAN; 2];
    let near_cut = 1.6 * step.max(0.05);
    let mut scratch_p: Vec<(f64, usize)> = Vec::new();
    let mut scratch_m: Vec<(f64, usize)> = Vec::new();
    for i in 0..=n {
        let ti = t_offset + step * i as f64;
        if i > 0 {
            frame = crate::hyp2::geodesic_flow(&frame, step);
            if !group.in_domain(frame.base_point(), 1e-12) {
                let (f2, dw) = group.reduce_frame(&frame)?;
                // shift the previous sample into the new chart so that side
                // comparisons against the domain leaves stay coherent
                if let Some(p) = prev_point {
                    let back = group.evaluate(&dw.inverse());
                    prev_point = Some(back.apply(p));
                }
                frame = f2;
            }
        }
        let p = frame.base_point();
        // one base-plane distance scan per side, shared by the radius
        // minimization and the crossing detector
        let scan = |leaves: &[Leaf], buf: &mut Vec<(f64, usize)>| {
            buf.clear();
            for (i, l) in leaves.iter().enumerate() {
                let d = l.h2_dist(p);
                if d < floor_cut.max(near_cut) {
                    buf.push((d, i));
                }
            }
            buf.sort_by(|x, y| x.0.total_cmp(&y.0));
        };
        scan(&plus.leaves, &mut scratch_p);
        scan(&minus.leaves, &mut scratch_m);
        let refine = |leaves: &[Leaf], cand: &[(f64, usize)]| -> f64 {
            let mut best = f64::INFINITY;
            for &(lower, i) in cand {
                if lower >= best || lower >= floor_cut {
                    break;
                }
                best = best.min(golden_min(&frame, &leaves[i]));
            }
            best
        };
        let dp = refine(&plus.leaves, &scratch_p);
        let dm = refine(&minus.leaves, &scratch_m);
        if dp < 1e-12 || dm < 1e-12 {
            return Err(Error::Exceptional(format!(
                "profile touches a leaf lift at t = {ti}"
            )));
        }
        t.push(ti);
        rho_plus.push(floor_clamp((1.0 / dp).ln(), 1.0));
        rho_minus.push(floor_clamp((1.0 / dm).ln(), 1.0));
        h.push(height_from_distances(dp, dm, cfg));
        if let Some(pp) = prev_point {
            for (side, approx, cand) in [
                (Side::Plus, plus, &scratch_p),
                (Side::Minus, minus, &scratch_m),
            ] {
                let dir_slot = if side == Side::Plus { 0 } else { 1 };
                for &(d_here, li) in cand.iter() {
                    if d_here >= near_cut {
                        continue;
                    }
                    let leaf = &approx.leaves[li];
                    let s_prev = leaf.side_of(pp);
                    let s_now = leaf.side_of(p);
                    if s_prev.signum() != s_now.signum() && s_prev != 0.0 {
                        let angle = super::crossing_angle(&chart_geodesic(pp, p), &leaf.geodesic)
                            .unwrap_or(0.0);
                        let dir = leaf.direction_angle_near(p);
                        let mut sign = if s_now > s_prev { 1.0 } else { -1.0 };
                        if last_dir[dir_slot].is_finite() {
                            let mut diff =
                                (dir - last_dir[dir_slot]).rem_euclid(std::f64::consts::TAU);
                            if diff > std::f64::consts::PI {
                                diff = std::f64::consts::TAU - diff;
                            }
                            if diff > std::f64::consts::FRAC_PI_2 {
                                sign = -sign;
                            }
                        }
                        last_dir[dir_slot] = if sign > 0.0 {
                            dir
                        } else {
                            (dir + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                        };
                        crossings.push(CrossingRecord { t: ti - 0.5 * step, side, angle, sign });
                    }
                }
                let _ = dir_slot;
            }
        }
        prev_point = Some(p);
    }
    crossings.sort_by(|x, y| x.t.total_cmp(&y.t));
    let weight_p = plus.crossing_weight();
    let weight_m = minus.crossing_weight();
    let mut dx_cum = vec![0.0f64; t.len()];
    let mut dy_cum = vec![0.0f64; t.len()];
    {
        let mut ci = 0usize;
        let (mut x, mut y) = (0.0f64, 0.0f64);
        for (i, &ti) in t.iter().enumerate() {
            while ci < crossings.len() && crossings[ci].t <= ti {
                match crossings[ci].side {
                    Side::Plus => x += crossings[ci].sign * weight_p,
                    Side::Minus => y += crossings[ci].sign * weight_m,
                }
                ci += 1;
            }
            dx_cum[i] = x;
            dy_cum[i] = y;
        }
    }
    let mut arclen = vec![0.0f64; t.len()];
    for i in 1..t.len() {
        arclen[i] = arclen[i - 1]
            + crate::flatmodel::ct_length(
                &SolvPath::new(vec![
                    [dx_cum[i - 1], dy_cum[i - 1], h[i - 1]],
                    [dx_cum[i], dy_cum[i], h[i]],
                ]),
                cfg.k,
            );
    }
    Ok(HeightProfile {
        t,
        rho_plus,
        rho_minus,
        h,
        dx_cum,
        dy_cum,
        arclen,
        crossings,
        cfg: cfg.clone(),
    })
}

/// Geodesic through two nearby points of one chart (crossing-angle helper).
fn chart_geodesic(p: HPoint, q: HPoint) -> Geodesic {
    crate::surface::geodesic_through(p, q)
}

fn check_non_exceptional(gamma: &Geodesic, approx: &LaminationApprox) -> Result<()> {
    let (gn, gp) = (gamma.neg.to_angle(), gamma.pos.to_angle());
    for leaf in &approx.leaves {
        for e in [leaf.geodesic.neg.to_angle(), leaf.geodesic.pos.to_angle()] {
            if crate::hyp2::angle_distance(gn, e) < 1e-6
                || crate::hyp2::angle_distance(gp, e) < 1e-6
            {
                return Err(Error::Exceptional(
                    "geodesic endpoint coincides with a leaf endpoint".into(),
                ));
            }
        }
    }
    Ok(())
}

/// The test path of a profile: the graph `(developed gamma, h)` as a path in
/// the solv model, plus the flat inclusion at height zero.
pub fn test_path(profile: &HeightProfile) -> SolvPath {
    SolvPath::new(
        (0..profile.len())
            .map(|i| [profile.dx_cum[i], profile.dy_cum[i], profile.h[i]])
            .collect(),
    )
}

/// The inclusion of the base geodesic at height zero (same developed image).
pub fn flat_inclusion(profile: &HeightProfile) -> SolvPath {
    SolvPath::new(
        (0..profile.len())
            .map(|i| [profile.dx_cum[i], profile.dy_cum[i], 0.0])
            .collect(),
    )
}

/// Classification of parameter intervals by the crossing pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    /// between two adjacent crossings of different sides: inside an innermost
    /// rectangle of the approximation, endpoints on different laminations
    Corner,
    /// spans exactly two corner segments, one at each end
    Straight,
    /// anything else (between same-side crossings, or past the ends)
    Other,
}

/// Classify intervals of a profile from its crossing records: corner
/// intervals lie between adjacent opposite-side crossings; straight segments
/// run from one corner interval to the next.
pub fn classify_segments(
    crossings: &[CrossingRecord],
    t_range: (f64, f64),
) -> Vec<(Interval, SegmentKind)> {
    let mut out = Vec::new();
    if crossings.is_empty() {
        out.push((Interval::new(t_range.0, t_range.1), SegmentKind::Other));
        return out;
    }
    // corner intervals between consecutive opposite-side crossings
    let mut corners: Vec<Interval> = Vec::new();
    for w in crossings.windows(2) {
        if w[0].side != w[1].side && w[1].t > w[0].t {
            corners.push(Interval::new(w[0].t, w[1].t));
        }
    }
    for c in &corners {
        out.push((*c, SegmentKind::Corner));
    }
    for w in corners.windows(2) {
        out.push((Interval::new(w[0].lo, w[1].hi), SegmentKind::Straight));
    }
    if out.is_empty() {
        out.push((Interval::new(t_range.0, t_range.1), SegmentKind::Other));
    }
    out
}
