use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use proptest::prelude::*;

use super::*;
use crate::geometry::ChartManifold;

fn latitude(theta: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n).map(|i| [theta, 2.0 * PI * i as f64 / n as f64]).collect()
}

fn torus_line(n: usize, y: f64) -> Vec<[f64; 2]> {
    (0..n).map(|i| [i as f64 / n as f64, y]).collect()
}

#[test]
fn constant_loop_has_no_length() {
    let g = DiscreteLoop::constant([0.3, 0.4], 6);
    assert_eq!(loop_length(&g), 0.0);
    assert_eq!(loop_energy(&g), 0.0);
    let m = ChartManifold::flat_torus([1.0, 1.0]);
    assert!(g.is_point_loop(&m));
    let g = DiscreteLoop::from_points(&m, &[[0.3, 0.4]; 5]).unwrap();
    assert_eq!(loop_length(&g), 0.0);
}

#[test]
fn equator_length_and_energy() {
    let m = ChartManifold::sphere(1.0);
    let g = DiscreteLoop::from_points(&m, &latitude(FRAC_PI_2, 32)).unwrap();
    assert!((loop_length(&g) - 2.0 * PI).abs() < 1e-6);
    assert!((loop_energy(&g) - 4.0 * PI * PI).abs() < 1e-5);
}

#[test]
fn torus_line_is_exact() {
    let m = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&m, &torus_line(16, 0.0)).unwrap();
    assert_eq!(loop_length(&g), 1.0);
    assert_eq!(loop_energy(&g), 1.0);
}

#[test]
fn energy_dominates_squared_length() {
    let m = ChartManifold::flat_torus([1.0, 1.0]);
    let pts = torus_line(8, 0.0);
    let params = vec![0.0, 0.05, 0.3, 0.35, 0.5, 0.6, 0.8, 0.9];
    let g = DiscreteLoop::with_params(&m, &pts, params).unwrap();
    assert!(loop_energy(&g) > 1.0);
    assert!(DiscreteLoop::with_params(&m, &pts, vec![0.0; 8]).is_err());
}

#[test]
fn discretize_equator_eight_samples() {
    // gaps of pi/4 sit exactly at half the convexity bound without the safety margin
    let mut m = ChartManifold::sphere(1.0);
    assert!(matches!(discretize(&m, &latitude(FRAC_PI_2, 8), None), Err(LoopError::RefinementNeeded { .. })));
    m.safety = 1.0;
    let g = discretize(&m, &latitude(FRAC_PI_2, 8), None).unwrap();
    assert!((loop_length(&g) - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn discretize_latitude_chords() {
    let m = ChartManifold::sphere(1.0);
    let n = 64;
    let g = discretize(&m, &latitude(FRAC_PI_3, n), None).unwrap();
    // great circle chord between neighbours on the latitude circle
    let chord = 2.0 * (FRAC_PI_3.sin() * (PI / n as f64).sin()).asin();
    let analytic = 2.0 * PI * FRAC_PI_3.sin();
    let l = loop_length(&g);
    assert!((l - n as f64 * chord).abs() < 1e-7);
    assert!(l < analytic && analytic - l < 1e-3);
}

#[test]
fn discretize_follows_geodesic() {
    let m = ChartManifold::sphere(1.0);
    // samples along a tilted great circle through the equator
    let tilt: f64 = 0.4;
    let pts: Vec<[f64; 2]> = (0..24)
        .map(|i| {
            let s = 2.0 * PI * i as f64 / 24.0;
            let v = [s.cos(), s.sin() * tilt.cos(), s.sin() * tilt.sin()];
            [v[2].acos(), v[1].atan2(v[0])]
        })
        .collect();
    let g = discretize(&m, &pts, None).unwrap();
    assert!((loop_length(&g) - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn discretize_reports_offending_gap() {
    let m = ChartManifold::sphere(1.0);
    let mut pts = latitude(FRAC_PI_2, 16);
    pts.remove(5);
    pts.remove(5);
    pts.remove(5);
    let err = discretize(&m, &pts, Some(1.0)).unwrap_err();
    assert!(matches!(err, LoopError::RefinementNeeded { index: 4 }));
    assert!(matches!(discretize::<f64>(&m, &[], None), Err(LoopError::Empty)));
}

#[test]
fn restricted_length_examples() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &torus_line(10, 0.25)).unwrap();
    assert!((restricted_length(&t, &g, |_| true) - loop_length(&g)).abs() < 1e-15);
    assert!((restricted_length(&t, &g, |p| p[0] < 0.5) - 0.5).abs() < 1e-6);

    let s = ChartManifold::sphere(1.0);
    let g = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_2, 30)).unwrap();
    let half = restricted_length(&s, &g, |p| p[1] > 0.0 && p[1] < PI);
    assert!((half - PI).abs() < 1e-6);
}

#[test]
fn measure_total_and_integral() {
    let s = ChartManifold::sphere(1.0);
    let g = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_2, 16)).unwrap();
    let mu = LoopMeasure::new(&g);
    assert_eq!(mu.total(), loop_length(&g));
    // int cos^2(phi) ds over the equator = pi
    let v = mu.integrate(&s, |p| p[1].cos().powi(2));
    assert!((v - PI).abs() < 1e-6);
}

#[test]
fn loop_metric_examples() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let a = DiscreteLoop::from_points(&t, &torus_line(12, 0.1)).unwrap();
    assert_eq!(loop_metric(&t, &a, &a).unwrap(), 0.0);
    let b = DiscreteLoop::from_points(&t, &torus_line(12, 0.4)).unwrap();
    assert!((loop_metric(&t, &a, &b).unwrap() - 0.3).abs() < 1e-12);
    // rotated copies are at distance zero
    assert!(loop_metric(&t, &a, &a.rotate(5)).unwrap() < 1e-12);

    let s = ChartManifold::sphere(1.0);
    let e = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_2, 256)).unwrap();
    let l = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_2 - 0.1, 256)).unwrap();
    let d = loop_metric(&s, &e, &l).unwrap();
    assert!((d - 0.1).abs() <= 0.01, "{d}");

    let short = DiscreteLoop::from_points(&t, &torus_line(6, 0.1)).unwrap();
    assert!(matches!(loop_metric(&t, &a, &short), Err(LoopError::ResampleNeeded { left: 12, right: 6 })));
}

#[test]
fn continuity_gap_examples() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let a = DiscreteLoop::from_points(&t, &torus_line(10, 0.5)).unwrap();
    let same = measure_continuity_gap(
        &t,
        &a,
        &a,
        &TestFunction { f: |p: [f64; 2]| p[0], sup_norm: 1.0, lipschitz: 1.0 },
    );
    assert_eq!(same.lhs, 0.0);
    assert!(same.holds);

    // bump centred at (0.5, 0.5) with width 0.1: sup 1, Lipschitz e^{-1/2} / 0.1
    let bump = |p: [f64; 2]| {
        let d = [p[0] - 0.5, p[1] - 0.5];
        (-(d[0] * d[0] + d[1] * d[1]) / 0.02).exp()
    };
    let phi = TestFunction { f: bump, sup_norm: 1.0, lipschitz: (-0.5f64).exp() / 0.1 };
    let b = DiscreteLoop::from_points(&t, &torus_line(10, 0.55)).unwrap();
    let r = measure_continuity_gap(&t, &a, &b, &phi);
    assert!(r.holds && r.lhs > 0.0);
    assert!(r.delta < 1e-12);
    assert!((r.epsilon - phi.lipschitz * 0.05).abs() < 1e-12);

    let s = ChartManifold::sphere(1.0);
    let e = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_2, 32)).unwrap();
    let l = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_2 - 0.2, 32)).unwrap();
    let phi = TestFunction { f: |p: [f64; 2]| p[0], sup_norm: PI, lipschitz: 1.0 };
    let r = measure_continuity_gap(&s, &e, &l, &phi);
    assert!(r.holds && r.delta > 0.0);
}

#[test]
fn discretization_is_optimal_on_flat_torus() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let pts: Vec<[f64; 2]> = (0..20)
        .map(|i| {
            let s = 2.0 * PI * i as f64 / 20.0;
            [0.5 + 0.2 * s.cos(), 0.5 + 0.1 * s.sin()]
        })
        .collect();
    let g = discretize(&t, &pts, None).unwrap();
    let poly: f64 = (0..20)
        .map(|i| {
            let (p, q) = (pts[i], pts[(i + 1) % 20]);
            (q[0] - p[0]).hypot(q[1] - p[1])
        })
        .sum();
    assert!(loop_length(&g) <= poly);
}

fn wavy_latitude(theta: f64, amp: f64, waves: usize, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let s = 2.0 * PI * i as f64 / n as f64;
            [theta + amp * (waves as f64 * s).sin(), s]
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclic_invariance(theta in 0.8f64..2.3, amp in 0.0f64..0.3, waves in 1usize..4, k in 0usize..40) {
        let s = ChartManifold::sphere(1.0);
        let g = DiscreteLoop::from_points(&s, &wavy_latitude(theta, amp, waves, 40)).unwrap();
        let r = g.rotate(k);
        let l = loop_length(&g);
        prop_assert!((loop_length(&r) - l).abs() <= 1e-12 * l);
        let cap = |p: [f64; 2]| p[0] < theta;
        let a = restricted_length(&s, &g, cap);
        let b = restricted_length(&s, &r, cap);
        prop_assert!((a - b).abs() <= 1e-12 * l);
    }

    #[test]
    fn quadrant_additivity(cx in 0.6f64..2.5, cy in 0.0f64..6.2, theta in 0.8f64..2.3, amp in 0.0f64..0.3) {
        let s = ChartManifold::sphere(1.0);
        let g = DiscreteLoop::from_points(&s, &wavy_latitude(theta, amp, 3, 40)).unwrap();
        let l = loop_length(&g);
        let mut total = 0.0;
        for q in 0..4 {
            total += restricted_length(&s, &g, |p| ((p[0] < cx) as usize) * 2 + ((p[1] < cy) as usize) == q);
        }
        prop_assert!((total - l).abs() <= 1e-6 * l);
    }

    #[test]
    fn loop_metric_is_a_pseudometric(y in proptest::collection::vec(0.0f64..1.0, 3), amp in proptest::collection::vec(0.0f64..0.05, 3)) {
        let t = ChartManifold::flat_torus([1.0, 1.0]);
        let loops: Vec<_> = (0..3)
            .map(|j| {
                let pts: Vec<[f64; 2]> = (0..12)
                    .map(|i| {
                        let x = i as f64 / 12.0;
                        [x, y[j] + amp[j] * (2.0 * PI * 2.0 * x).sin()]
                    })
                    .collect();
                DiscreteLoop::from_points(&t, &pts).unwrap()
            })
            .collect();
        let d = |a: usize, b: usize| loop_metric(&t, &loops[a], &loops[b]).unwrap();
        prop_assert!(d(0, 0) < 1e-12);
        prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-9);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
    }
}
