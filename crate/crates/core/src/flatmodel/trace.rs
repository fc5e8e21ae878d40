use super::{SurfacePoint, TranslationSurface};
use crate::{Error, Result};

/// Distance below which a wall crossing counts as a corner hit.
const CORNER_EPS: f64 = 1e-9;

/// One straight piece of a trajectory inside a single square.
#[derive(Debug, Clone, Copy)]
pub struct FlatSegment {
    pub square: usize,
    pub enter: (f64, f64),
    pub exit: (f64, f64),
    /// developed offset of the square origin relative to the trace start
    pub sheet: (i64, i64),
}

impl FlatSegment {
    /// Unsigned horizontal transverse measure.
    pub fn dx(&self) -> f64 {
        (self.exit.0 - self.enter.0).abs()
    }

    /// Unsigned vertical transverse measure.
    pub fn dy(&self) -> f64 {
        (self.exit.1 - self.enter.1).abs()
    }
}

/// A traced trajectory: per-square segments, the developed displacement, and
/// the endpoint.
#[derive(Debug, Clone)]
pub struct FlatTrace {
    pub segments: Vec<FlatSegment>,
    pub total: (f64, f64),
    pub end: SurfacePoint,
    /// ended early on a cone point at this trace length
    pub cone_hit: Option<f64>,
}

/// Trace the straight-line flow from `start` in `direction` for `length`,
/// crossing square gluings. A cone-point hit is retried with a slightly
/// rotated direction up to three times (the caller's stated direction is
/// preserved in the returned displacement up to that perturbation).
pub fn flat_geodesic(
    surface: &TranslationSurface,
    start: SurfacePoint,
    direction: (f64, f64),
    length: f64,
) -> Result<FlatTrace> {
    let norm = (direction.0 * direction.0 + direction.1 * direction.1).sqrt();
    if norm < 1e-300 {
        return Err(Error::InvalidInput("zero direction".into()));
    }
    let mut dir = (direction.0 / norm, direction.1 / norm);
    for attempt in 0..3 {
        match trace_once(surface, start, dir, length, false) {
            Ok(trace) => {
                if trace.cone_hit.is_none() {
                    return Ok(trace);
                }
                // perturb and retry
                let rot = 1e-9 * (attempt + 1) as f64;
                let (s, c) = rot.sin_cos();
                dir = (dir.0 * c - dir.1 * s, dir.0 * s + dir.1 * c);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ConePointHit(3))
}

/// Trace and stop at the first cone point (used by saddle-connection
/// enumeration).
pub fn trace_to_cone(
    surface: &TranslationSurface,
    start: SurfacePoint,
    direction: (f64, f64),
    max_length: f64,
) -> Result<FlatTrace> {
    trace_once(surface, start, direction, max_length, true)
}

fn trace_once(
    surface: &TranslationSurface,
    start: SurfacePoint,
    dir: (f64, f64),
    length: f64,
    stop_at_cone: bool,
) -> Result<FlatTrace> {
    let mut segments = Vec::new();
    let mut sq = start.square;
    let mut x = start.x;
    let mut y = start.y;
    let mut sheet = (0i64, 0i64);
    let mut remaining = length;
    let mut travelled = 0.0f64;
    let (dx, dy) = dir;
    let max_iters = (length.ceil() as usize + 2) * 4 + 16;
    for _ in 0..max_iters {
        // time to each wall
        let tx = if dx > 1e-300 {
            (1.0 - x) / dx
        } else if dx < -1e-300 {
            -x / dx
        } else {
            f64::INFINITY
        };
        let ty = if dy > 1e-300 {
            (1.0 - y) / dy
        } else if dy < -1e-300 {
            -y / dy
        } else {
            f64::INFINITY
        };
        let t_wall = tx.min(ty);
        if remaining <= t_wall {
            let exit = (x + remaining * dx, y + remaining * dy);
            segments.push(FlatSegment { square: sq, enter: (x, y), exit, sheet });
            let end = SurfacePoint { square: sq, x: exit.0, y: exit.1 };
            let total = (
                sheet.0 as f64 + exit.0 - start.x,
                sheet.1 as f64 + exit.1 - start.y,
            );
            return Ok(FlatTrace { segments, total, end, cone_hit: None });
        }
        let exit = (x + t_wall * dx, y + t_wall * dy);
        segments.push(FlatSegment { square: sq, enter: (x, y), exit, sheet });
        travelled += t_wall;
        remaining -= t_wall;
        // corner hit: both coordinates within eps of the lattice
        let near_x = exit.0.min(1.0 - exit.0).abs() < CORNER_EPS;
        let near_y = exit.1.min(1.0 - exit.1).abs() < CORNER_EPS;
        if near_x && near_y && surface.all_vertices_singular() {
            let total = (
                sheet.0 as f64 + exit.0 - start.x,
                sheet.1 as f64 + exit.1 - start.y,
            );
            let end = SurfacePoint { square: sq, x: exit.0, y: exit.1 };
            return Ok(FlatTrace { segments, total, end, cone_hit: Some(travelled) });
        }
        if !stop_at_cone && near_x && near_y {
            // regular vertex on a general surface: treat as a hit anyway,
            // the caller perturbs
            let total = (
                sheet.0 as f64 + exit.0 - start.x,
                sheet.1 as f64 + exit.1 - start.y,
            );
            let end = SurfacePoint { square: sq, x: exit.0, y: exit.1 };
            return Ok(FlatTrace { segments, total, end, cone_hit: Some(travelled) });
        }
        // cross the wall
        if tx < ty {
            if dx > 0.0 {
                sq = surface.right()[sq];
                sheet.0 += 1;
                x = 0.0;
            } else {
                sq = surface.right_inv()[sq];
                sheet.0 -= 1;
                x = 1.0;
            }
            y = exit.1;
        } else {
            if dy > 0.0 {
                sq = surface.up()[sq];
                sheet.1 += 1;
                y = 0.0;
            } else {
                sq = surface.up_inv()[sq];
                sheet.1 -= 1;
                y = 1.0;
            }
            x = exit.0;
        }
    }
    Err(Error::InvalidInput(
        "trace exceeded its iteration budget (degenerate direction?)".into(),
    ))
}

/// Enumerate saddle-connection holonomies with flat length at most
/// `max_length`, by tracing primitive directions from every cone-corner
/// sector. The list is deduplicated by holonomy and closed under negation.
pub fn saddle_connections(surface: &TranslationSurface, max_length: f64) -> Vec<(i64, i64)> {
    assert!(max_length <= 50.0, "saddle enumeration is desk-scale (<= 50)");
    assert!(
        surface.all_vertices_singular(),
        "enumeration by corner tracing needs all vertices singular"
    );
    let mut out: std::collections::BTreeSet<(i64, i64)> = Default::default();
    let lmax = max_length.floor() as i64;
    // axis directions: unit square edges join cone corners
    if max_length >= 1.0 {
        out.insert((1, 0));
        out.insert((-1, 0));
        out.insert((0, 1));
        out.insert((0, -1));
    }
    let delta = 1e-7;
    for p in 1..=lmax {
        for q in 1..=lmax {
            if gcd(p, q) != 1 {
                continue;
            }
            let len = ((p * p + q * q) as f64).sqrt();
            if len > max_length {
                continue;
            }
            for (sp, sq_) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let dir = (sp * p as f64 / len, sq_ * q as f64 / len);
                // start just inside a square whose corner quadrant faces dir
                let (x0, y0) = (
                    if dir.0 > 0.0 { 0.0 } else { 1.0 },
                    if dir.1 > 0.0 { 0.0 } else { 1.0 },
                );
                for s in 0..surface.num_squares() {
                    let start = SurfacePoint {
                        square: s,
                        x: x0 + delta * dir.0,
                        y: y0 + delta * dir.1,
                    };
                    if let Ok(tr) = trace_to_cone(surface, start, dir, len + 1.0) {
                        if let Some(at) = tr.cone_hit {
                            if (at - (len - delta)).abs() < 1e-5 {
                                out.insert(((sp * p as f64) as i64, (sq_ * q as f64) as i64));
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Period holonomy of the closed regular trajectory through `start` in the
/// rational direction `(p, q)`: traces until the trajectory returns to the
/// starting surface point.
pub fn cylinder_period(
    surface: &TranslationSurface,
    direction: (i64, i64),
    start: SurfacePoint,
) -> Result<(f64, f64)> {
    if direction == (0, 0) {
        return Err(Error::InvalidInput("zero direction has no cylinder".into()));
    }
    let len = ((direction.0 * direction.0 + direction.1 * direction.1) as f64).sqrt();
    let dir = (direction.0 as f64 / len, direction.1 as f64 / len);
    let mut total = (0.0, 0.0);
    let mut here = start;
    for _ in 0..(4 * surface.num_squares()) {
        let tr = flat_geodesic(surface, here, dir, len)?;
        total = (total.0 + tr.total.0, total.1 + tr.total.1);
        here = tr.end;
        if here.square == start.square
            && (here.x - start.x).abs() < 1e-9
            && (here.y - start.y).abs() < 1e-9
        {
            return Ok(total);
        }
    }
    Err(Error::InvalidInput(format!(
        "trajectory in direction {direction:?} did not close up"
    )))
}
