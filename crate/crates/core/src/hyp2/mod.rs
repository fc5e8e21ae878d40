//! Upper half-plane and unit-tangent-bundle (PSL(2,R)) primitives.
//!
//! Points live in the upper half-plane model, oriented geodesics are stored by
//! their ideal endpoints, and frames are determinant-1 matrices up to sign.
//! The closed forms implemented here (Lambert quadrilateral, the sine rule for
//! right triangles, `cos(theta) = tanh(s)/tanh(t)` for nearest-point
//! projections) are exercised against independent numerical minimization in
//! the test suite.

mod frame;
mod geodesic;

pub use frame::{
    frame_distance, geodesic_flow, tangent_to_geodesic_argmin, tangent_to_geodesic_distance,
    Frame,
};
pub use geodesic::{angle_distance, Boundary, Geodesic, GeodesicRelation};

use crate::{Error, Result};

/// A point of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Self {
        assert!(y > 0.0, "upper half-plane point needs y > 0, got y = {y}");
        HPoint { x, y }
    }

    /// Base point `i`, the image of the identity frame.
    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.x, self.y)
    }

    /// Cayley transform to the unit-disk model (centered at `i`).
    pub fn to_disk(self) -> num_complex::Complex64 {
        let z = self.to_complex();
        let i = num_complex::Complex64::i();
        (z - i) / (z + i)
    }

    pub fn from_disk(w: num_complex::Complex64) -> Self {
        let i = num_complex::Complex64::i();
        let z = i * (1.0 + w) / (1.0 - w);
        HPoint::new(z.re, z.im)
    }
}

/// Hyperbolic distance between two points of the upper half-plane.
pub fn dist_h2(p: HPoint, q: HPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    arg.max(1.0).acosh()
}

/// Distance from a point at parameter `t` along one geodesic to a disjoint
/// geodesic at distance `theta`, by the Lambert-quadrilateral relation
/// `sinh d = cosh t sinh theta`.
pub fn lambert_distance(t: f64, theta: f64) -> f64 {
    (t.cosh() * theta.sinh()).asinh()
}

/// Distance from a point at parameter `t` along one geodesic to a geodesic
/// crossing it at angle `theta`, by the sine rule `sin theta = sinh d / sinh t`.
pub fn intersect_distance(t: f64, theta: f64) -> f64 {
    (theta.sin() * t.sinh()).asinh()
}

/// Closed parameter interval along a unit-speed geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval needs lo <= hi, got [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0.0
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.len()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    /// Overlap with another interval, if any.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }
}

/// Nearest-point projection of `p` to `g`: the unique distance minimizer.
pub fn nearest_point_projection(g: &Geodesic, p: HPoint) -> HPoint {
    g.point_at(g.nearest_parameter(p))
}

/// Image of one geodesic under nearest-point projection to `base`, as a
/// parameter interval of `base` (unit speed, standard anchor).
///
/// The interval is centered at the parameter of the intersection point or of
/// the closest approach; its radius is `atanh(cos theta)` for crossings at
/// angle `theta` and `log coth(theta/2)` for disjoint geodesics at distance
/// `theta`.
pub fn projection_interval(base: &Geodesic, other: &Geodesic) -> Result<Interval> {
    let (u, v) = base.map_endpoints_to_standard(other)?;
    let (tu, tv) = match (u, v) {
        (Boundary::Real(u), Boundary::Real(v)) => {
            if u == 0.0 || v == 0.0 {
                return Err(Error::Degenerate(
                    "asymptotic geodesics have a half-infinite projection interval".into(),
                ));
            }
            (u.abs().ln(), v.abs().ln())
        }
        _ => {
            return Err(Error::Degenerate(
                "asymptotic geodesics have a half-infinite projection interval".into(),
            ))
        }
    };
    Ok(Interval::new(tu.min(tv), tu.max(tv)))
}

/// Empirically estimated thin-triangle constant of a space. The paper treats
/// the hyperbolicity constants of the surface and 3-manifold pseudometrics as
/// existence-only; this record keeps the measured stand-ins.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicityEstimate {
    /// Max over sampled triangles of the insize (largest distance from a point
    /// on one side to the union of the other two sides).
    pub delta: f64,
    pub triangles: usize,
}

/// Estimate the thin-triangle constant of the hyperbolic plane by sampling
/// ideal-ish triangles with endpoints drawn uniformly on the circle.
pub fn estimate_delta_h2(seed: u64, triangles: usize) -> HyperbolicityEstimate {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut delta: f64 = 0.0;
    for _ in 0..triangles {
        // three boundary angles, kept away from mutual collision
        let mut ang = [0.0f64; 3];
        loop {
            for a in ang.iter_mut() {
                *a = rng.gen_range(0.0..std::f64::consts::TAU);
            }
            let mut s = ang;
            s.sort_by(f64::total_cmp);
            let sep = (s[1] - s[0]).min(s[2] - s[1]).min(std::f64::consts::TAU - s[2] + s[0]);
            if sep > 1e-3 {
                break;
            }
        }
        let side = |p: f64, q: f64| Geodesic::new(Boundary::from_angle(p), Boundary::from_angle(q));
        let ab = side(ang[0], ang[1]);
        let ac = side(ang[0], ang[2]);
        let bc = side(ang[1], ang[2]);
        // sample along [ab] and measure distance to the other two sides
        for k in 0..32 {
            let t = -8.0 + 16.0 * (k as f64) / 31.0;
            let p = ab.point_at(t);
            let d = ac.dist_to_point(p).min(bc.dist_to_point(p));
            delta = delta.max(d);
        }
    }
    HyperbolicityEstimate { delta, triangles }
}

#[cfg(test)]
mod tests;
