use num_complex::Complex64;

use super::{dist_h2, Boundary, Geodesic, HPoint};
use crate::{Error, Result};

/// Chart radius: below this the one-parameter chart length is used directly
/// for the frame metric; beyond it the horizontal-lift candidate can win.
const CHART_RADIUS: f64 = 0.5;

/// An element of PSL(2,R): a determinant-1 matrix identified with its negation.
/// Acts on the upper half-plane by Mobius transformations; a frame is a lift
/// of a unit tangent vector under `A -> (A(i), dA_i(up))`.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    // row-major entries [[a, b], [c, d]], det = 1 after normalization
    m: [f64; 4],
}

impl Frame {
    pub const IDENTITY: Frame = Frame { m: [1.0, 0.0, 0.0, 1.0] };

    /// Build from rows, rescaling to determinant 1. Panics on det <= 0:
    /// only orientation-preserving isometries are represented.
    pub fn from_rows(a: f64, b: f64, c: f64, d: f64) -> Frame {
        let det = a * d - b * c;
        assert!(det > 0.0, "frame needs positive determinant, got {det}");
        let s = det.sqrt();
        Frame { m: [a / s, b / s, c / s, d / s] }
    }

    pub fn entries(&self) -> [f64; 4] {
        self.m
    }

    pub fn det(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> f64 {
        self.m[0] + self.m[3]
    }

    pub fn compose(&self, other: &Frame) -> Frame {
        let a = &self.m;
        let b = &other.m;
        let mut m = [
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ];
        // renormalize drift
        let det = m[0] * m[3] - m[1] * m[2];
        let s = det.sqrt();
        for x in m.iter_mut() {
            *x /= s;
        }
        Frame { m }
    }

    pub fn inverse(&self) -> Frame {
        let [a, b, c, d] = self.m;
        Frame { m: [d, -b, -c, a] }
    }

    /// Diagonal geodesic-flow element `a_t = diag(e^{t/2}, e^{-t/2})`.
    pub fn diag_flow(t: f64) -> Frame {
        let e = (0.5 * t).exp();
        Frame { m: [e, 0.0, 0.0, 1.0 / e] }
    }

    /// Rotation about `i` whose derivative at `i` turns tangent vectors by
    /// `-theta` (so it carries the upward direction to the direction at
    /// euclidean angle `pi/2 - theta`).
    pub fn rotation(theta: f64) -> Frame {
        let (s, c) = (0.5 * theta).sin_cos();
        Frame { m: [c, -s, s, c] }
    }

    /// Parabolic `[[1, x], [0, 1]]`.
    pub fn parabolic(x: f64) -> Frame {
        Frame { m: [1.0, x, 0.0, 1.0] }
    }

    pub fn apply(&self, p: HPoint) -> HPoint {
        let [a, b, c, d] = self.m;
        let z = Complex64::new(p.x, p.y);
        let w = (a * z + b) / (c * z + d);
        HPoint::new(w.re, w.im.max(f64::MIN_POSITIVE))
    }

    pub fn apply_boundary(&self, p: Boundary) -> Boundary {
        let [a, b, c, d] = self.m;
        match p {
            Boundary::Infinity => {
                if c.abs() < 1e-300 {
                    Boundary::Infinity
                } else {
                    Boundary::Real(a / c)
                }
            }
            Boundary::Real(x) => {
                let den = c * x + d;
                if den.abs() < 1e-300 {
                    Boundary::Infinity
                } else {
                    Boundary::Real((a * x + b) / den)
                }
            }
        }
    }

    /// Base point in the upper half-plane: the image of `i`.
    pub fn base_point(&self) -> HPoint {
        self.apply(HPoint::I)
    }

    /// PSL equality up to sign, Frobenius tolerance.
    pub fn approx_eq(&self, other: &Frame, tol: f64) -> bool {
        let mut dp = 0.0;
        let mut dm = 0.0;
        for k in 0..4 {
            dp += (self.m[k] - other.m[k]) * (self.m[k] - other.m[k]);
            dm += (self.m[k] + other.m[k]) * (self.m[k] + other.m[k]);
        }
        dp.sqrt().min(dm.sqrt()) <= tol
    }

    /// Distance to the identity in PSL, Frobenius up to sign.
    pub fn residual(&self) -> f64 {
        let i = Frame::IDENTITY;
        let mut dp = 0.0;
        let mut dm = 0.0;
        for k in 0..4 {
            dp += (self.m[k] - i.m[k]) * (self.m[k] - i.m[k]);
            dm += (self.m[k] + i.m[k]) * (self.m[k] + i.m[k]);
        }
        dp.sqrt().min(dm.sqrt())
    }

    /// Matrix logarithm in PSL(2,R): picks the sign with trace >= 0, where the
    /// exponential is onto. Returns the traceless generator `X` with
    /// `exp(X) = +-M`.
    pub fn psl_log(&self) -> [f64; 4] {
        let mut m = self.m;
        if m[0] + m[3] < 0.0 {
            for x in m.iter_mut() {
                *x = -*x;
            }
        }
        let tau = m[0] + m[3];
        let half = 0.5 * tau;
        // N = M - (tau/2) I is traceless with N^2 = (tau^2/4 - 1) I
        let n = [m[0] - half, m[1], m[2], m[3] - half];
        let disc = half * half - 1.0;
        let scale = if disc > 1e-14 {
            // hyperbolic: M = cosh(mu) I + sinh(mu)/delta ... delta = sinh(mu)
            let delta = disc.sqrt();
            half.acosh() / delta
        } else if disc < -1e-14 {
            // elliptic: rotation angle phi in (0, pi/2] after the sign choice
            let delta = (-disc).sqrt();
            half.min(1.0).acos() / delta
        } else {
            // parabolic: N is nilpotent, exp(N) = I + N
            1.0
        };
        [n[0] * scale, n[1] * scale, n[2] * scale, n[3] * scale]
    }

    /// Norm of an sl(2,R) element in the inner product `<A,B> = 2 tr(A^T B)`,
    /// which makes the basis `{A1, A2, A3}` orthonormal.
    pub fn sl2_norm(x: &[f64; 4]) -> f64 {
        (2.0 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3])).sqrt()
    }

    /// Length of the one-parameter chart path from the identity to this
    /// element: `|log M|` in the left-invariant metric.
    pub fn chart_length(&self) -> f64 {
        Frame::sl2_norm(&self.psl_log())
    }

    /// Euclidean tangent angle at `i` of the geodesic toward `q` (angle from
    /// the positive x-axis; straight up is `pi/2`).
    fn direction_angle_to(q: HPoint) -> f64 {
        if q.x.abs() < 1e-15 {
            if q.y >= 1.0 {
                std::f64::consts::FRAC_PI_2
            } else {
                -std::f64::consts::FRAC_PI_2
            }
        } else {
            let c = (q.x * q.x + q.y * q.y - 1.0) / (2.0 * q.x);
            if q.x > 0.0 {
                c.atan2(1.0)
            } else {
                (-c).atan2(-1.0)
            }
        }
    }

    /// Rotation angle of an elliptic element fixing `i`, in `[0, pi]` (PSL).
    fn fixing_rotation_angle(&self) -> f64 {
        let tau = self.trace().abs().min(2.0);
        2.0 * (0.5 * tau).acos()
    }
}

/// Right translation by the diagonal flow: lifts the geodesic flow on the
/// unit tangent bundle.
pub fn geodesic_flow(f: &Frame, t: f64) -> Frame {
    f.compose(&Frame::diag_flow(t))
}

/// Left-invariant distance on PSL(2,R).
///
/// The metric is the fixed representative generated by the orthonormal basis
/// `{A1, A2, A3}`: near the identity the one-parameter chart length
/// `|log(a^-1 b)|` is exact enough, and for distant pairs the candidate path
/// "horizontal lift of the base geodesic, then a fiber rotation" keeps the
/// distance within `pi` of the base distance in the plane.
pub fn frame_distance(a: &Frame, b: &Frame) -> f64 {
    let m = a.inverse().compose(b);
    let c1 = m.chart_length();
    if c1 <= CHART_RADIUS {
        return c1;
    }
    // horizontal lift to the image point, then rotate in the fiber over it
    let q = m.base_point();
    let s = dist_h2(HPoint::I, q);
    let c2 = if s < 1e-12 {
        m.fixing_rotation_angle()
    } else {
        let psi = Frame::direction_angle_to(q);
        let rot = Frame::rotation(std::f64::consts::FRAC_PI_2 - psi);
        let lift = rot.compose(&Frame::diag_flow(s)).compose(&rot.inverse());
        s + lift.inverse().compose(&m).fixing_rotation_angle()
    };
    c1.min(c2)
}

/// Infimum over `t` of the frame distance from `v` to the lift of `g`.
///
/// Bracketed by the base-plane projection, then golden-section refined; the
/// fellow-travel bounds make the basin well conditioned near the minimum.
pub fn tangent_to_geodesic_distance(v: &Frame, g: &Geodesic) -> Result<f64> {
    let p = v.base_point();
    let center = g.nearest_parameter(p);
    let reach = g.dist_to_point(p) + std::f64::consts::PI + 2.0;
    minimize_frame_distance(v, g, center - reach, center + reach).map(|(_, d)| d)
}

/// Same as [`tangent_to_geodesic_distance`] but also returns the minimizing
/// parameter of `g`.
pub fn tangent_to_geodesic_argmin(v: &Frame, g: &Geodesic) -> Result<(f64, f64)> {
    let p = v.base_point();
    let center = g.nearest_parameter(p);
    let reach = g.dist_to_point(p) + std::f64::consts::PI + 2.0;
    minimize_frame_distance(v, g, center - reach, center + reach)
}

fn minimize_frame_distance(v: &Frame, g: &Geodesic, lo: f64, hi: f64) -> Result<(f64, f64)> {
    const GRID: usize = 48;
    const MAX_ITER: usize = 120;
    let f = |t: f64| frame_distance(v, &g.frame_at(t));
    // coarse bracket
    let mut best_k = 0;
    let mut best = f64::INFINITY;
    for k in 0..=GRID {
        let t = lo + (hi - lo) * (k as f64) / (GRID as f64);
        let d = f(t);
        if d < best {
            best = d;
            best_k = k;
        }
    }
    let step = (hi - lo) / (GRID as f64);
    let mut a = lo + step * (best_k.saturating_sub(1) as f64);
    let mut b = (lo + step * ((best_k + 1) as f64)).min(hi);
    // golden section
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0;
    while b - a > 1e-10 {
        iter += 1;
        if iter > MAX_ITER {
            return Err(Error::NonConvergence(format!(
                "golden section stalled on [{a}, {b}]"
            )));
        }
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
    let t = 0.5 * (a + b);
    Ok((t, f(t).min(f1).min(f2)))
}
