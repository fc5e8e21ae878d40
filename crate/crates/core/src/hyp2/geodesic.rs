use num_complex::Complex64;

use super::{Frame, HPoint};
use crate::{Error, Result};

/// A point of the circle at infinity: a real number or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Real(f64),
    Infinity,
}

impl Boundary {
    /// Boundary point of the disk model at the given angle, transported to the
    /// upper half-plane (disk centered at `i`).
    pub fn from_angle(phi: f64) -> Self {
        // e^{i phi} on the disk maps to -cot(phi/2) on the real line
        let half = 0.5 * phi;
        let s = half.sin();
        if s.abs() < 1e-154 {
            Boundary::Infinity
        } else {
            Boundary::Real(-half.cos() / s)
        }
    }

    /// Angle on the disk-model circle, in `[0, 2*pi)`.
    pub fn to_angle(self) -> f64 {
        match self {
            Boundary::Infinity => 0.0,
            Boundary::Real(x) => {
                // w = (x - i)/(x + i) on the unit circle
                let w = (Complex64::new(x, -1.0)) / (Complex64::new(x, 1.0));
                w.im.atan2(w.re).rem_euclid(std::f64::consts::TAU)
            }
        }
    }

    pub fn approx_eq(self, other: Boundary, tol: f64) -> bool {
        match (self, other) {
            (Boundary::Infinity, Boundary::Infinity) => true,
            (Boundary::Real(a), Boundary::Real(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

/// Angular distance on the boundary circle (visual metric from the disk center).
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// An oriented bi-infinite geodesic, stored by its ordered ideal endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    /// Backward endpoint (`t -> -infinity`).
    pub neg: Boundary,
    /// Forward endpoint (`t -> +infinity`).
    pub pos: Boundary,
}

/// Relative position of two geodesics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicRelation {
    /// Crossing at the given parameter of the base geodesic, acute angle in
    /// `(0, pi/2]`.
    Cross { at: f64, angle: f64 },
    /// Disjoint, closest approach at the given parameter of the base geodesic.
    Disjoint { at: f64, dist: f64 },
    /// Sharing an ideal endpoint.
    Asymptotic,
}

impl Geodesic {
    pub fn new(neg: Boundary, pos: Boundary) -> Self {
        assert!(
            !neg.approx_eq(pos, 0.0),
            "geodesic endpoints must be distinct"
        );
        Geodesic { neg, pos }
    }

    pub fn reversed(&self) -> Geodesic {
        Geodesic { neg: self.pos, pos: self.neg }
    }

    /// The vertical axis from 0 to infinity, anchored at `i`.
    pub fn standard() -> Geodesic {
        Geodesic::new(Boundary::Real(0.0), Boundary::Infinity)
    }

    /// Frame taking the standard geodesic `(0, infinity)` onto this one,
    /// preserving orientation. The unit-speed parametrization is
    /// `t -> frame * (i e^t)`, anchored at the image of `i`.
    pub fn standard_frame(&self) -> Frame {
        match (self.neg, self.pos) {
            (Boundary::Real(u), Boundary::Infinity) => Frame::from_rows(1.0, u, 0.0, 1.0),
            (Boundary::Infinity, Boundary::Real(v)) => Frame::from_rows(v, -1.0, 1.0, 0.0),
            (Boundary::Real(u), Boundary::Real(v)) => {
                if v > u {
                    Frame::from_rows(v, u, 1.0, 1.0)
                } else {
                    Frame::from_rows(v, -u, 1.0, -1.0)
                }
            }
            _ => unreachable!("endpoints are distinct"),
        }
    }

    /// Point at unit-speed parameter `t`.
    pub fn point_at(&self, t: f64) -> HPoint {
        self.standard_frame().apply(HPoint::new(0.0, t.exp()))
    }

    /// Lift of the unit-speed parametrization to PSL(2,R).
    pub fn frame_at(&self, t: f64) -> Frame {
        self.standard_frame().compose(&Frame::diag_flow(t))
    }

    /// Parameter of the nearest-point projection of `p`.
    pub fn nearest_parameter(&self, p: HPoint) -> f64 {
        let z = self.standard_frame().inverse().apply(p);
        (z.x * z.x + z.y * z.y).sqrt().ln()
    }

    /// Exact distance from `p` to this geodesic: `asinh(|x|/y)` in standard
    /// coordinates.
    pub fn dist_to_point(&self, p: HPoint) -> f64 {
        let z = self.standard_frame().inverse().apply(p);
        (z.x.abs() / z.y).asinh()
    }

    /// Signed side of `p` relative to the oriented geodesic (positive on the
    /// left). Zero exactly on the geodesic.
    pub fn side_of(&self, p: HPoint) -> f64 {
        let z = self.standard_frame().inverse().apply(p);
        -z.x
    }

    /// Endpoints of `other` in this geodesic's standard coordinates.
    pub(crate) fn map_endpoints_to_standard(&self, other: &Geodesic) -> Result<(Boundary, Boundary)> {
        let inv = self.standard_frame().inverse();
        let u = inv.apply_boundary(other.neg);
        let v = inv.apply_boundary(other.pos);
        if u.approx_eq(v, 0.0) {
            return Err(Error::Degenerate("coincident geodesic endpoints".into()));
        }
        Ok((u, v))
    }

    /// Crossing/disjointness data for a pair of geodesics.
    pub fn relation_to(&self, other: &Geodesic) -> Result<GeodesicRelation> {
        let (u, v) = self.map_endpoints_to_standard(other)?;
        let (u, v) = match (u, v) {
            (Boundary::Real(u), Boundary::Real(v)) => (u, v),
            _ => return Ok(GeodesicRelation::Asymptotic),
        };
        if u == 0.0 || v == 0.0 {
            return Ok(GeodesicRelation::Asymptotic);
        }
        let c = 0.5 * (u + v);
        let r = 0.5 * (u - v).abs();
        let rho = c.abs() / r;
        let at = 0.5 * (u.abs().ln() + v.abs().ln());
        if u * v < 0.0 {
            let angle = rho.min(1.0).acos();
            if angle < 1e-12 {
                return Err(Error::Degenerate(
                    "near-tangent crossing (angle < 1e-12)".into(),
                ));
            }
            Ok(GeodesicRelation::Cross { at, angle })
        } else {
            let dist = rho.max(1.0).acosh();
            if dist < 1e-12 {
                return Err(Error::Degenerate(
                    "near-parallel disjoint pair (distance < 1e-12)".into(),
                ));
            }
            Ok(GeodesicRelation::Disjoint { at, dist })
        }
    }

    /// Whether the open segment between parameters `t0 < t1` crosses `other`.
    pub fn translate(&self, f: &Frame) -> Geodesic {
        Geodesic::new(f.apply_boundary(self.neg), f.apply_boundary(self.pos))
    }
}
