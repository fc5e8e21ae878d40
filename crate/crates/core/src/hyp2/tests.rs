use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_frame(rng: &mut ChaCha8Rng) -> Frame {
    let x = rng.gen_range(-3.0..3.0);
    let t = rng.gen_range(-2.0..2.0);
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    Frame::parabolic(x)
        .compose(&Frame::diag_flow(t))
        .compose(&Frame::rotation(th))
}

fn random_geodesic(rng: &mut ChaCha8Rng) -> Geodesic {
    loop {
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let b = rng.gen_range(0.0..std::f64::consts::TAU);
        if (a - b).abs() > 1e-3 {
            return Geodesic::new(Boundary::from_angle(a), Boundary::from_angle(b));
        }
    }
}

/// Disjoint pair at exact distance `theta`: standard axis and
/// `(tanh(theta/2), coth(theta/2))`, closest approach at `i`.
fn disjoint_at(theta: f64) -> Geodesic {
    let t = (0.5 * theta).tanh();
    Geodesic::new(Boundary::Real(t), Boundary::Real(1.0 / t))
}

/// Crossing pair at exact angle `theta` through `i`.
fn crossing_at(theta: f64) -> Geodesic {
    let (s, c) = theta.sin_cos();
    Geodesic::new(Boundary::Real((c - 1.0) / s), Boundary::Real((c + 1.0) / s))
}

/// Independent oracle: minimize the point distance along a geodesic by grid +
/// golden section over its own parameter.
fn numeric_point_to_geodesic(p: HPoint, g: &Geodesic, half_width: f64) -> f64 {
    let f = |s: f64| dist_h2(p, g.point_at(s));
    let center = g.nearest_parameter(p);
    let (mut a, mut b) = (center - half_width, center + half_width);
    let mut best = (a, f(a));
    for k in 0..=400 {
        let s = a + (b - a) * (k as f64) / 400.0;
        let d = f(s);
        if d < best.1 {
            best = (s, d);
        }
    }
    let step = (b - a) / 400.0;
    a = best.0 - step;
    b = best.0 + step;
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    while b - a > 1e-12 {
        let x1 = a + phi * (b - a);
        let x2 = b - phi * (b - a);
        if f(x1) <= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    f(0.5 * (a + b))
}

#[test]
fn dist_h2_examples() {
    assert_eq!(dist_h2(HPoint::I, HPoint::I), 0.0);
    let e = std::f64::consts::E;
    assert!((dist_h2(HPoint::I, HPoint::new(0.0, e)) - 1.0).abs() < 1e-12);
    let d = dist_h2(HPoint::I, HPoint::new(1.0, 1.0));
    assert!((d - 0.962424).abs() < 1e-6, "got {d}");
    // cross-check by integrating ds = |dz|/y along the circular arc
    let g = Geodesic::new(Boundary::Real(1.618033988749895), Boundary::Real(-0.618033988749895));
    let (t0, t1) = (g.nearest_parameter(HPoint::I), g.nearest_parameter(HPoint::new(1.0, 1.0)));
    let n = 20000;
    let mut len = 0.0;
    let mut prev = g.point_at(t0);
    for k in 1..=n {
        let t = t0 + (t1 - t0) * (k as f64) / (n as f64);
        let q = g.point_at(t);
        let (dx, dy) = (q.x - prev.x, q.y - prev.y);
        len += (dx * dx + dy * dy).sqrt() / (0.5 * (q.y + prev.y));
        prev = q;
    }
    assert!((len - d).abs() < 1e-6, "arc integration {len} vs {d}");
}

#[test]
fn dist_h2_symmetry_and_triangle() {
    let mut r = rng(11);
    for _ in 0..500 {
        let p = HPoint::new(r.gen_range(-4.0..4.0), r.gen_range(0.05..8.0));
        let q = HPoint::new(r.gen_range(-4.0..4.0), r.gen_range(0.05..8.0));
        let s = HPoint::new(r.gen_range(-4.0..4.0), r.gen_range(0.05..8.0));
        assert!((dist_h2(p, q) - dist_h2(q, p)).abs() < 1e-12);
        assert!(dist_h2(p, s) <= dist_h2(p, q) + dist_h2(q, s) + 1e-12);
    }
}

#[test]
fn lambert_examples() {
    assert!((lambert_distance(0.0, 0.3) - 0.3).abs() < 1e-12);
    assert!(lambert_distance(5.0, 1e-14) < 1e-9);
    let d = lambert_distance(1.0, 0.1);
    assert!((d - 0.15395).abs() < 5e-5, "got {d}");
    // oracle: distance from gamma_1(1) on the axis to an explicit disjoint
    // geodesic at distance 0.1, by numerical minimization
    let other = disjoint_at(0.1);
    let p = Geodesic::standard().point_at(1.0);
    let oracle = numeric_point_to_geodesic(p, &other, 6.0);
    assert!((d - oracle).abs() < 1e-9, "closed form {d} vs oracle {oracle}");
}

#[test]
fn lambert_identity_and_monotone_divergence() {
    let mut r = rng(12);
    for _ in 0..2000 {
        let t = r.gen_range(0.0..10.0);
        let th = r.gen_range(1e-6..1.0);
        let d = lambert_distance(t, th);
        assert!((d.sinh() - t.cosh() * th.sinh()).abs() <= 1e-9 * (1.0 + d.sinh().abs()));
        if t <= (1.0 / th).ln() {
            let e = th * t.exp();
            assert!(d >= e / 3.0 - 1e-12 && d <= 1.5 * e + 1e-12, "t={t} th={th} d={d}");
        }
        // increasing in |t|
        assert!(lambert_distance(t + 0.1, th) > d);
    }
}

#[test]
fn intersect_examples() {
    assert_eq!(intersect_distance(0.0, 0.4), 0.0);
    let d = intersect_distance(1.0_f64.asinh(), std::f64::consts::FRAC_PI_6);
    assert!((d - 0.5_f64.asinh()).abs() < 1e-12);
    assert!((d - 0.481212).abs() < 1e-6);
    // oracle: numerical point-to-geodesic distance for a crossing pair
    let other = crossing_at(std::f64::consts::FRAC_PI_6);
    let p = Geodesic::standard().point_at(1.0_f64.asinh());
    let oracle = numeric_point_to_geodesic(p, &other, 6.0);
    assert!((d - oracle).abs() < 1e-9);
}

#[test]
fn intersect_bounds() {
    let mut r = rng(13);
    for _ in 0..2000 {
        let th: f64 = r.gen_range(1e-5..1.0);
        let t = r.gen_range(0.0..(1.0 / th).ln());
        let d = intersect_distance(t, th);
        assert!(d >= th * (t.exp() - 1.0) / 8.0 - 1e-12);
        assert!(d <= 0.5 * th * t.exp() + 1e-12);
    }
}

#[test]
fn nearest_point_projection_examples() {
    let axis = Geodesic::standard();
    let proj = nearest_point_projection(&axis, HPoint::new(1.0, 1.0));
    let r2 = std::f64::consts::SQRT_2;
    assert!((proj.x - 0.0).abs() < 1e-12 && (proj.y - r2).abs() < 1e-12);
    // 1-D numerical minimization agrees
    let oracle = numeric_point_to_geodesic(HPoint::new(1.0, 1.0), &axis, 6.0);
    assert!((dist_h2(HPoint::new(1.0, 1.0), proj) - oracle).abs() < 1e-9);
    // fixed point on the geodesic
    let mut r = rng(14);
    for _ in 0..100 {
        let g = random_geodesic(&mut r);
        let p = g.point_at(r.gen_range(-3.0..3.0));
        assert!(dist_h2(nearest_point_projection(&g, p), p) < 1e-9);
    }
}

#[test]
fn projection_is_contraction() {
    let mut r = rng(15);
    for _ in 0..1000 {
        let g = random_geodesic(&mut r);
        let p = HPoint::new(r.gen_range(-4.0..4.0), r.gen_range(0.05..6.0));
        let q = HPoint::new(r.gen_range(-4.0..4.0), r.gen_range(0.05..6.0));
        let dp = dist_h2(nearest_point_projection(&g, p), nearest_point_projection(&g, q));
        assert!(dp <= dist_h2(p, q) + 1e-9);
    }
}

#[test]
fn projection_perpendicularity() {
    // the geodesic from p to its projection meets g at a right angle
    let mut r = rng(16);
    for _ in 0..50 {
        let g = random_geodesic(&mut r);
        let p = HPoint::new(r.gen_range(-3.0..3.0), r.gen_range(0.1..4.0));
        let foot = nearest_point_projection(&g, p);
        if dist_h2(p, foot) < 1e-3 {
            continue;
        }
        let perp = Geodesic::new(
            boundary_toward(foot, p, -1.0),
            boundary_toward(foot, p, 1.0),
        );
        match g.relation_to(&perp).unwrap() {
            GeodesicRelation::Cross { angle, .. } => {
                assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-6)
            }
            rel => panic!("expected crossing, got {rel:?}"),
        }
    }
}

/// Ideal endpoint of the geodesic through two points, on the `q`-ward side.
fn boundary_toward(p: HPoint, q: HPoint, sign: f64) -> Boundary {
    let g = geodesic_through(p, q);
    if sign > 0.0 {
        g.pos
    } else {
        g.neg
    }
}

fn geodesic_through(p: HPoint, q: HPoint) -> Geodesic {
    if (p.x - q.x).abs() < 1e-13 {
        return if q.y > p.y {
            Geodesic::new(Boundary::Real(p.x), Boundary::Infinity)
        } else {
            Geodesic::new(Boundary::Infinity, Boundary::Real(p.x))
        };
    }
    let c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * (q.x - p.x));
    let r = ((p.x - c) * (p.x - c) + p.y * p.y).sqrt();
    if q.x > p.x {
        Geodesic::new(Boundary::Real(c - r), Boundary::Real(c + r))
    } else {
        Geodesic::new(Boundary::Real(c + r), Boundary::Real(c - r))
    }
}

#[test]
fn projection_interval_examples() {
    let axis = Geodesic::standard();
    // perpendicular crossing: zero radius
    let perp = crossing_at(std::f64::consts::FRAC_PI_2);
    let iv = projection_interval(&axis, &perp).unwrap();
    assert!(iv.radius() < 1e-12);
    // theta = pi/3: radius atanh(cos theta) = atanh(0.5)
    let g = crossing_at(std::f64::consts::FRAC_PI_3);
    let iv = projection_interval(&axis, &g).unwrap();
    assert!((iv.radius() - 0.5_f64.atanh()).abs() < 1e-9, "{}", iv.radius());
    assert!((iv.radius() - 0.549306).abs() < 1e-6);
    // numerical sweep oracle: projections of far points along g approach the ends
    let far = projection_interval(&axis, &g).unwrap();
    let sweep_hi = axis.nearest_parameter(g.point_at(30.0));
    let sweep_lo = axis.nearest_parameter(g.point_at(-30.0));
    assert!((sweep_hi.max(sweep_lo) - far.hi).abs() < 1e-6);
    assert!((sweep_hi.min(sweep_lo) - far.lo).abs() < 1e-6);
    // theta = 0.01 crossing: T in [4.6052, 5.6449]
    let g = crossing_at(0.01);
    let t = projection_interval(&axis, &g).unwrap().radius();
    assert!((4.6052..=5.6449).contains(&t), "T = {t}");
}

#[test]
fn projection_interval_bound_random() {
    // log(1/theta) <= T <= log(1/theta) + log(8)/2, crossing and disjoint
    let t0 = 0.5 * 8.0_f64.ln();
    let mut r = rng(17);
    for _ in 0..1000 {
        let th = r.gen_range(1e-6_f64..0.5);
        let g = if r.gen_bool(0.5) {
            crossing_at(th)
        } else {
            disjoint_at(th)
        };
        // also conjugate by a random isometry and reproject to a translated base
        let f = random_frame(&mut r);
        let base = Geodesic::standard().translate(&f);
        let t = projection_interval(&base, &g.translate(&f)).unwrap().radius();
        let lo = (1.0 / th).ln();
        assert!(t >= lo - 1e-6 && t <= lo + t0 + 1e-6, "theta={th} T={t}");
    }
}

#[test]
fn overlap_bound() {
    // projection intervals of a pair crossing at angle >= alpha overlap by at
    // most 2 log(1/alpha) + 4 T0 + 16 on any third geodesic
    let t0 = 0.5 * 8.0_f64.ln();
    let mut r = rng(18);
    for _ in 0..300 {
        let alpha: f64 = r.gen_range(0.05..1.5);
        let f = random_frame(&mut r);
        let a = Geodesic::standard().translate(&f);
        let b = crossing_at(alpha.min(std::f64::consts::FRAC_PI_2)).translate(&f);
        let c = random_geodesic(&mut r);
        let (ia, ib) = match (projection_interval(&c, &a), projection_interval(&c, &b)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => continue,
        };
        if let Some(ov) = ia.intersect(&ib) {
            let bound = 2.0 * (1.0 / alpha).ln().max(0.0) + 4.0 * t0 + 16.0;
            assert!(ov.len() <= bound, "alpha={alpha} overlap={} bound={bound}", ov.len());
        }
    }
}

#[test]
fn frame_distance_examples() {
    assert_eq!(frame_distance(&Frame::IDENTITY, &Frame::IDENTITY), 0.0);
    for t in [0.1, 0.5, 1.0, 2.5, 7.0] {
        let d = frame_distance(&Frame::IDENTITY, &Frame::diag_flow(t));
        assert!((d - t).abs() < 1e-9, "t={t} d={d}");
    }
    for a in [1e-4, 1e-3, 1e-2, 0.1] {
        let d = frame_distance(&Frame::IDENTITY, &Frame::parabolic(a));
        assert!(d <= std::f64::consts::SQRT_2 * a + 1e-12, "a={a} d={d}");
    }
}

#[test]
fn frame_distance_left_invariant() {
    let mut r = rng(19);
    for _ in 0..300 {
        let g = random_frame(&mut r);
        let a = random_frame(&mut r);
        let b = random_frame(&mut r);
        let d0 = frame_distance(&a, &b);
        let d1 = frame_distance(&g.compose(&a), &g.compose(&b));
        assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0), "d0={d0} d1={d1}");
    }
}

#[test]
fn frame_distance_sandwich() {
    let mut r = rng(20);
    for _ in 0..1000 {
        let a = random_frame(&mut r);
        let b = random_frame(&mut r);
        let d = frame_distance(&a, &b);
        let base = dist_h2(a.base_point(), b.base_point());
        assert!(d >= base - 1e-9, "d={d} base={base}");
        assert!(d <= base + std::f64::consts::PI + 1e-9, "d={d} base={base}");
    }
}

#[test]
fn frame_distance_symmetry() {
    let mut r = rng(21);
    for _ in 0..300 {
        let a = random_frame(&mut r);
        let b = random_frame(&mut r);
        let d0 = frame_distance(&a, &b);
        let d1 = frame_distance(&b, &a);
        assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
    }
}

#[test]
fn geodesic_flow_examples() {
    let mut r = rng(22);
    let f = random_frame(&mut r);
    assert!(geodesic_flow(&f, 0.0).approx_eq(&f, 1e-12));
    for t in [0.3, 1.0, 4.0] {
        let p = geodesic_flow(&Frame::IDENTITY, t).base_point();
        assert!((p.x).abs() < 1e-12 && (p.y - t.exp()).abs() < 1e-9 * t.exp());
    }
    // flow property
    let (s, t) = (0.7, -1.9);
    let a = geodesic_flow(&geodesic_flow(&f, s), t);
    let b = geodesic_flow(&f, s + t);
    assert!(a.approx_eq(&b, 1e-9));
}

#[test]
fn geodesic_flow_expansion_bound() {
    // |d(g_t x, g_t y) - e^{|t|} d(x,y)| <= ... : flow expands by at most e^{|t|}
    let mut r = rng(23);
    for _ in 0..500 {
        let x = random_frame(&mut r);
        // nearby partner
        let eps = r.gen_range(1e-4..0.05);
        let y = x
            .compose(&Frame::parabolic(eps))
            .compose(&Frame::rotation(r.gen_range(-eps..eps)));
        let t = r.gen_range(-2.0..2.0);
        let d0 = frame_distance(&x, &y);
        let d1 = frame_distance(&geodesic_flow(&x, t), &geodesic_flow(&y, t));
        assert!(
            d1 <= t.abs().exp() * d0 * (1.0 + 1e-9) + 1e-12,
            "d1={d1} e^t d0={}",
            t.abs().exp() * d0
        );
    }
}

#[test]
fn tangent_to_geodesic_examples() {
    let axis = Geodesic::standard();
    // frame on the lift
    for t in [-2.0, 0.0, 1.5] {
        let v = axis.frame_at(t);
        assert!(tangent_to_geodesic_distance(&v, &axis).unwrap() < 1e-8);
    }
    // closest approach realizes the pair distance
    let th = 0.02;
    let other = disjoint_at(th);
    let v = axis.frame_at(0.0);
    let d = tangent_to_geodesic_distance(&v, &other).unwrap();
    // lifted distance at closest approach is within the bilipschitz window of theta
    assert!(d >= th / 3.0 && d <= 3.0 * th, "d={d} theta={th}");
}

#[test]
fn fellow_travel_window() {
    // d(gamma_1^1(t), gamma_2^1) / (theta e^{|t|}) within [1e-5, 1e5]
    let axis = Geodesic::standard();
    let mut r = rng(24);
    for _ in 0..40 {
        let th = r.gen_range(1e-4_f64..0.01);
        let other = if r.gen_bool(0.5) {
            disjoint_at(th)
        } else {
            crossing_at(th)
        };
        let theta = tangent_to_geodesic_distance(&axis.frame_at(0.0), &other).unwrap();
        let tmax = (1.0 / theta).ln();
        for k in 1..=6 {
            let t = tmax * (k as f64) / 6.0;
            for s in [t, -t] {
                let d = tangent_to_geodesic_distance(&axis.frame_at(s), &other).unwrap();
                let ratio = d / (theta * s.abs().exp());
                assert!((1e-5..=1e5).contains(&ratio), "ratio {ratio} at t={s} theta={theta}");
            }
        }
    }
}

#[test]
fn radius_function_lipschitz_along_geodesic() {
    // floor-clamped log(1/d) has slope <= 1 along unit-speed geodesics
    let mut r = rng(25);
    let leaf = random_geodesic(&mut r);
    let g = random_geodesic(&mut r);
    let step = 0.01;
    let mut prev: Option<f64> = None;
    for k in 0..400 {
        let t = -2.0 + step * k as f64;
        let d = tangent_to_geodesic_distance(&g.frame_at(t), &leaf).unwrap();
        let rho = (1.0 / d).ln().max(1.0);
        if let Some(p) = prev {
            assert!((rho - p).abs() / step <= 1.0 + 1e-6, "slope {}", (rho - p).abs() / step);
        }
        prev = Some(rho);
    }
}

#[test]
fn delta_estimate_sane() {
    let est = estimate_delta_h2(7, 60);
    // thin-triangle insize of the hyperbolic plane is below 2 log 3
    assert!(est.delta > 0.2 && est.delta < 2.0 * 3.0_f64.ln(), "delta {}", est.delta);
}

#[test]
fn boundary_angle_roundtrip() {
    let mut r = rng(26);
    for _ in 0..200 {
        let phi = r.gen_range(1e-6..std::f64::consts::TAU - 1e-6);
        let b = Boundary::from_angle(phi);
        assert!((b.to_angle() - phi).abs() < 1e-9);
    }
}
