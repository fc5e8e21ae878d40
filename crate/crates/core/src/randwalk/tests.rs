use rand::{Rng, SeedableRng};

use super::*;
use crate::surface::octagon_group;

#[test]
fn gromov_product_examples() {
    let a = HPoint::I;
    assert_eq!(gromov_product(a, a, HPoint::new(1.0, 2.0)), 0.0);
    // a on the geodesic between b and c
    let g = Geodesic::standard();
    let (b, c) = (g.point_at(-1.3), g.point_at(0.8));
    assert!(gromov_product(g.point_at(0.0), b, c).abs() < 1e-12);
    // d(a,b)=2, d(a,c)=3, d(b,c)=4 -> product 1/2, with c found numerically
    let b = HPoint::new(0.0, std::f64::consts::E.powi(2));
    let c = solve_two_distances(a, b, 3.0, 4.0);
    let p = gromov_product(a, b, c);
    assert!((p - 0.5).abs() < 1e-9, "product {p}");
}

/// Point at distance `ra` from `a` and `rb` from `b`, by bisection over the
/// hyperbolic circle around `a`.
fn solve_two_distances(a: HPoint, b: HPoint, ra: f64, rb: f64) -> HPoint {
    let circle = |psi: f64| -> HPoint {
        let c = ra.cosh();
        let r = ra.sinh();
        HPoint::new(a.x + r * psi.cos(), a.y * (c + r * psi.sin()).max(1e-12))
    };
    let f = |psi: f64| dist_h2(circle(psi), b) - rb;
    let (mut lo, mut hi) = (-std::f64::consts::FRAC_PI_2 + 1e-9, std::f64::consts::FRAC_PI_2);
    assert!(f(lo) > 0.0 && f(hi) < 0.0, "bracket: {} {}", f(lo), f(hi));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    circle(0.5 * (lo + hi))
}

#[test]
fn shadow_examples() {
    let x0 = HPoint::I;
    let g = Geodesic::standard();
    let b = g.point_at(10.0);
    // on a common ray the product is min(10, t): t=5 in, t=2 out
    assert!(shadow_contains(x0, b, 3.0, g.point_at(5.0)));
    assert!(!shadow_contains(x0, b, 3.0, g.point_at(2.0)));
    // r = 0 always contains
    assert!(shadow_contains(x0, b, 0.0, HPoint::new(-3.0, 0.2)));
    // c = b whenever d(x0,b) >= r
    assert!(shadow_contains(x0, b, 3.0, b));
    // boundary targets
    assert!(shadow_contains_boundary(x0, b, 3.0, g.pos));
    assert!(!shadow_contains_boundary(x0, b, 3.0, g.neg));
}

#[test]
fn shadow_nesting() {
    let x0 = HPoint::I;
    let b = HPoint::new(2.0, 0.3);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let c = HPoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.05..4.0));
        if shadow_contains(x0, b, 2.5, c) {
            assert!(shadow_contains(x0, b, 1.0, c));
        }
    }
}

#[test]
fn gromov_product_equivariance() {
    let group = octagon_group();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let pts: Vec<HPoint> = (0..3)
            .map(|_| HPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0)))
            .collect();
        let w = GroupWord::from_letters((0..5).map(|_| rng.gen_range(0..8u8)));
        let g = group.evaluate(&w);
        let p0 = gromov_product(pts[0], pts[1], pts[2]);
        let p1 = gromov_product(g.apply(pts[0]), g.apply(pts[1]), g.apply(pts[2]));
        assert!((p0 - p1).abs() < 1e-9);
    }
}

#[test]
fn walk_determinism_and_frequencies() {
    let group = octagon_group();
    let mu = StepDistribution::uniform_octagon();
    assert!(mu.generates_semigroup(&group));
    let p1 = sample_walk(&group, &mu, 200, 77);
    let p2 = sample_walk(&group, &mu, 200, 77);
    for n in -200..=200 {
        assert_eq!(p1.dist_to_origin(n).to_bits(), p2.dist_to_origin(n).to_bits());
        if n < 200 {
            assert_eq!(p1.step_index(n), p2.step_index(n));
        }
    }
    // w_{n+1} = w_n g_{n+1} holds as words
    for n in 0..200i64 {
        let mut w = p1.word(&mu, n);
        w.extend(&mu.support()[p1.step_index(n)]);
        assert_eq!(w, p1.word(&mu, n + 1));
    }
    // empirical letter frequencies within 3 sigma of 1/8
    let mut counts = [0usize; 8];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
    let n = 8000;
    for _ in 0..n {
        counts[mu.sample(&mut rng)] += 1;
    }
    let expect = n as f64 / 8.0;
    let sigma = (n as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
    for c in counts {
        assert!((c as f64 - expect).abs() < 3.0 * sigma, "count {c} vs {expect}");
    }
}

#[test]
fn walk_zero_length() {
    let group = octagon_group();
    let mu = StepDistribution::uniform_octagon();
    let p = sample_walk(&group, &mu, 0, 5);
    assert_eq!(p.dist_to_origin(0), 0.0);
}

#[test]
fn drift_positive() {
    let group = octagon_group();
    let mu = StepDistribution::uniform_octagon();
    let est = drift_estimate(&group, &mu, 300, 0..60, 0.99);
    assert!(est.ci_low > 0.0, "drift CI [{}, {}]", est.ci_low, est.ci_high);
    let spread = est
        .per_seed
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
    assert!(spread.1 - spread.0 < 0.6 * est.mean * 2.0, "spread {spread:?} mean {}", est.mean);
}

#[test]
fn tracked_geodesic_axis_case() {
    let group = octagon_group();
    // walk along powers of the generator a: tracked geodesic = its axis
    let step = GroupWord::parse("a").unwrap();
    let mu = StepDistribution::new(vec![step], vec![1.0]).unwrap();
    let path = sample_walk(&group, &mu, 60, 1);
    let tracked = track_geodesic(&group, &mu, &path).unwrap();
    let a = group.generator(0);
    let len = 2.0 * (a.trace().abs() / 2.0).acosh();
    for n in -50..=50i64 {
        let t = tracked.projection_times[(n + 60) as usize];
        assert!(
            (t - n as f64 * len).abs() < 1e-6,
            "t_{n} = {t}, expected {}", n as f64 * len
        );
    }
}

#[test]
fn tracked_geodesic_deviation_and_gaps() {
    let group = octagon_group();
    let mu = StepDistribution::uniform_octagon();
    let n = 700usize;
    let mut worst_frac = 0.0f64;
    let mut max_gap_ratio = 0.0f64;
    for seed in 100..108 {
        let path = sample_walk(&group, &mu, n, seed);
        let tracked = match track_geodesic(&group, &mu, &path) {
            Ok(t) => t,
            Err(_) => continue,
        };
        // deviation: d(w_n x0, gamma) <= D log n fails rarely for D = 5
        let d_const = 5.0;
        let mut violations = 0usize;
        let mut count = 0usize;
        for k in 2..=n as i64 {
            let d = tracked.distances[(k + n as i64) as usize];
            count += 1;
            if d > d_const * (k as f64).ln() {
                violations += 1;
            }
        }
        worst_frac = worst_frac.max(violations as f64 / count as f64);
        // gap statistic: |t_{n+1} - t_n| <= D' log N
        let log_n = (n as f64).ln();
        for k in 0..(2 * n) {
            let gap = (tracked.projection_times[k + 1] - tracked.projection_times[k]).abs();
            max_gap_ratio = max_gap_ratio.max(gap / log_n);
        }
    }
    assert!(worst_frac < 0.02, "deviation fraction {worst_frac}");
    assert!(max_gap_ratio < 3.0, "gap ratio {max_gap_ratio}");
}

#[test]
fn tracked_geodesic_stability_under_doubling() {
    let group = octagon_group();
    let mu = StepDistribution::uniform_octagon();
    let mut stable = 0;
    let mut total = 0;
    for seed in 0..20u64 {
        let p1 = sample_walk(&group, &mu, 400, seed);
        let p2 = sample_walk(&group, &mu, 800, seed);
        let (t1, t2) = match (track_geodesic(&group, &mu, &p1), track_geodesic(&group, &mu, &p2)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        total += 1;
        let df = crate::hyp2::angle_distance(t1.forward_angle, t2.forward_angle);
        let db = crate::hyp2::angle_distance(t1.backward_angle, t2.backward_angle);
        if df < 1e-2 && db < 1e-2 {
            stable += 1;
        }
    }
    assert!(total >= 15);
    assert!(
        stable as f64 >= 0.95 * total as f64,
        "stable {stable} of {total}"
    );
}

#[test]
fn tail_statistics_table() {
    let group = octagon_group();
    let mu = StepDistribution::uniform_octagon();
    let thresholds: Vec<f64> = (0..12).map(|k| k as f64 * 0.75).collect();
    let table = tail_statistics(&group, &mu, 300, 0..400, thresholds);
    assert!((table.frequencies[0] - 1.0).abs() < 1e-12, "R=0 frequency 1");
    for w in table.frequencies.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "monotone");
    }
    assert!(table.log_slope < 0.0, "decay slope {}", table.log_slope);
    assert!(table.r_squared >= 0.9, "R^2 {}", table.r_squared);
}

#[test]
fn diagonal_measure_table() {
    let group = octagon_group();
    let mu = StepDistribution::uniform_octagon();
    let thresholds: Vec<f64> = (0..10).map(|k| k as f64 * 0.5).collect();
    let table = diagonal_measure(&group, &mu, 250, 0..400, thresholds);
    assert!((table.frequencies[0] - 1.0).abs() < 1e-12);
    for w in table.frequencies.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
    assert!(table.log_slope < 0.0 && table.r_squared >= 0.9, "fit {table:?}");
}

#[test]
fn z_walk_aperiodicity_detection() {
    // +-1 steps only: period 2, must be rejected
    let walk = ZProjectedWalk {
        increments: vec![1, -1],
        weights: vec![0.5, 0.5],
    };
    assert!(matches!(
        walk.check_aperiodic(),
        Err(crate::Error::PeriodicProjection)
    ));
    // the mapping-torus walk includes zero steps, hence aperiodic
    let walk = ZProjectedWalk::mapping_torus(1.0 / 11.0).unwrap();
    walk.check_aperiodic().unwrap();
}

#[test]
fn z_walk_exact_binomial_crosscheck() {
    // simple +-1 walk at even times: P(S_100 = 0) = C(100,50)/2^100
    let walk = ZProjectedWalk {
        increments: vec![1, -1],
        weights: vec![0.5, 0.5],
    };
    let pmf = walk.exact_pmf(100);
    let p0 = pmf.iter().find(|(x, _)| *x == 0).unwrap().1;
    // log C(100,50) - 100 log 2
    let mut log_c = 0.0f64;
    for k in 1..=50f64 as i64 {
        log_c += ((50 + k) as f64).ln() - (k as f64).ln();
    }
    let expect = (log_c - 100.0 * 2.0f64.ln()).exp();
    assert!((p0 - expect).abs() / expect < 1e-3, "p0 {p0} vs {expect}");
    assert!((p0 - 0.0796).abs() < 5e-4, "3 significant figures: {p0}");
}

#[test]
fn z_walk_stats_basic() {
    let walk = ZProjectedWalk::mapping_torus(1.0 / 11.0).unwrap();
    // n = 0: phi = 0 with probability 1
    let pmf = walk.exact_pmf(0);
    assert_eq!(pmf, vec![(0, 1.0)]);
    let stats = z_projection_stats(&walk, vec![64, 256, 1024], 2000, 2).unwrap();
    for w in stats.near_fiber_fraction.windows(2) {
        assert!(w[1] < w[0], "occupation decreasing: {:?}", stats.near_fiber_fraction);
    }
    assert!(stats.beta > 0.2 && stats.beta < 0.8, "beta {}", stats.beta);
}

#[test]
fn ks_pvalue_sane() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40);
    let mut uniform: Vec<f64> = (0..5000).map(|_| rng.gen::<f64>()).collect();
    assert!(ks_uniform_pvalue(&mut uniform) > 0.01);
    let mut skewed: Vec<f64> = (0..5000).map(|_| rng.gen::<f64>().powi(2)).collect();
    assert!(ks_uniform_pvalue(&mut skewed) < 1e-6);
}
