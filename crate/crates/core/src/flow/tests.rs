use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use proptest::prelude::*;

use super::*;
use crate::error::{FlowError, ParamViolation};
use crate::geometry::{distance, ChartManifold};
use crate::loops::{loop_energy, loop_length, loop_metric, DiscreteLoop};

fn zigzag(l: usize, amp: f64) -> Vec<[f64; 2]> {
    (0..2 * l).map(|i| [i as f64 / (2 * l) as f64, if i % 2 == 0 { 0.0 } else { amp }]).collect()
}

fn latitude(theta: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n).map(|i| [theta, 2.0 * PI * i as f64 / n as f64]).collect()
}

fn cap_for(g: &DiscreteLoop<f64>, radius: f64, l: usize) -> BirkhoffParams<f64> {
    let e = (1.05 * loop_length(g)).powi(2);
    BirkhoffParams::assume_valid(e, radius, l)
}

#[test]
fn validate_examples() {
    let s = ChartManifold::sphere(1.0);
    let p = validate_params(4.0 * PI * PI, 0.6, 110, &s, None).unwrap();
    assert_eq!(p.grid_size(), 220);

    let err = validate_params(100.0, 0.6, 5, &s, None).unwrap_err();
    let FlowError::InvalidParams(v) = err else { panic!() };
    assert!(v.iter().any(|x| matches!(x, ParamViolation::SegmentsVsSqrtEnergy { segments: 5, required } if *required == 10.0)));

    let err = validate_params(1.0, 0.3, 100, &s, Some(RegionBounds { alpha: 10.0, rho: 0.5 })).unwrap_err();
    let FlowError::InvalidParams(v) = err else { panic!() };
    assert_eq!(v, vec![ParamViolation::RadiusVsRegionRho { radius: 0.3, bound: 0.25 }]);

    // every clause is reported
    let FlowError::InvalidParams(v) = validate_params(1.0, 2.0, 0, &s, None).unwrap_err() else { panic!() };
    assert_eq!(v.len(), 4);
    let FlowError::InvalidParams(v) = validate_params(-1.0, 0.1, 10, &s, None).unwrap_err() else { panic!() };
    assert_eq!(v, vec![ParamViolation::EnergyNotPositive { energy: -1.0 }]);
    assert_eq!(BirkhoffParams::min_segments(4.0 * PI * PI, 0.6), 110);
}

#[test]
fn even_replace_keeps_geodesics() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &zigzag(8, 0.0)).unwrap();
    let p = cap_for(&g, 0.11, 8);
    let e = even_replace(&t, &g, &p).unwrap();
    for (a, b) in e.breakpoints().iter().zip(g.breakpoints()) {
        assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    }
}

#[test]
fn even_replace_flattens_zigzag() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &zigzag(8, 0.05)).unwrap();
    let p = cap_for(&g, 0.11, 8);
    let l0 = 16.0 * (1.0f64 / 256.0 + 0.0025).sqrt();
    assert!((loop_length(&g) - l0).abs() < 1e-12);
    let e = even_replace(&t, &g, &p).unwrap();
    assert!(e.breakpoints().iter().all(|b| b[1].abs() < 1e-15));
    assert!((loop_length(&e) - 1.0).abs() < 1e-12);
}

#[test]
fn odd_replace_flattens_to_odd_anchors() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &zigzag(8, 0.05)).unwrap();
    let p = cap_for(&g, 0.11, 8);
    let o = odd_replace(&t, &g, &p).unwrap();
    assert!(o.breakpoints().iter().all(|b| (b[1] - 0.05).abs() < 1e-15));
    assert!(o.breakpoints()[0][0].abs() < 1e-15 || (o.breakpoints()[0][0] - 1.0).abs() < 1e-15);
}

#[test]
fn odd_replace_wraparound_bookkeeping() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let l = 5;
    let pts: Vec<[f64; 2]> = (0..2 * l)
        .map(|i| {
            let x = i as f64 / (2 * l) as f64;
            [x, 0.3 + 0.02 * ((i * i) % 7) as f64]
        })
        .collect();
    let g = DiscreteLoop::from_points(&t, &pts).unwrap();
    let p = cap_for(&g, 0.11, l);
    let o = odd_replace(&t, &g, &p).unwrap();
    let b = o.breakpoints();
    for i in 0..l {
        // odd anchors are kept
        assert_eq!(b[2 * i + 1], pts[2 * i + 1]);
        // even slots hold straight midpoints of the surrounding odd anchors, with
        // slot 0 between x_{2L-1} and x_1 across the seam
        let (prev, next) = (pts[(2 * i + 2 * l - 1) % (2 * l)], pts[2 * i + 1]);
        let mut dx = next[0] - prev[0];
        dx -= dx.round();
        let mx = prev[0] + dx / 2.0;
        let d = b[2 * i][0] - mx;
        assert!((d - d.round()).abs() < 1e-14, "{i}");
        assert!((b[2 * i][1] - (prev[1] + next[1]) / 2.0).abs() < 1e-14);
    }
}

#[test]
fn sphere_even_replace_restores_midpoints() {
    let s = ChartManifold::sphere(1.0);
    let n = 32;
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|i| [if i % 2 == 0 { FRAC_PI_2 } else { FRAC_PI_2 + 0.05 }, 2.0 * PI * i as f64 / n as f64])
        .collect();
    let g = DiscreteLoop::from_points(&s, &pts).unwrap();
    let p = cap_for(&g, 0.6, n / 2);
    let e = even_replace(&s, &g, &p).unwrap();
    for (i, b) in e.breakpoints().iter().enumerate() {
        assert!((b[0] - FRAC_PI_2).abs() < 1e-9);
        let phi = 2.0 * PI * i as f64 / n as f64;
        let d = (b[1] - phi + PI).rem_euclid(2.0 * PI) - PI;
        assert!(d.abs() < 1e-9);
    }
}

#[test]
fn const_speed_examples() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &zigzag(6, 0.0)).unwrap();
    let c = const_speed(&t, &g, 12).unwrap();
    assert_eq!(c.len(), 12);
    for (a, b) in c.breakpoints().iter().zip(g.breakpoints()) {
        assert!((a[0] - b[0]).abs() < 1e-15);
    }

    // one long segment and many short ones, all on a straight line
    let mut pts: Vec<[f64; 2]> = (0..9).map(|i| [0.02 * i as f64, 0.5]).collect();
    pts.extend((1..9).map(|i| [0.16 + 0.105 * i as f64, 0.5]));
    let g = DiscreteLoop::from_points(&t, &pts).unwrap();
    let c = const_speed(&t, &g, 20).unwrap();
    assert_eq!(c.len(), 20);
    assert_eq!(c.breakpoints()[0], g.breakpoints()[0]);
    for (i, b) in c.breakpoints().iter().enumerate() {
        // arc-length inversion on a straight unit loop is the identity shifted by x_0
        assert!((b[0] - i as f64 / 20.0).abs() < 1e-12, "{i}: {b:?}");
        assert!((c.segments()[i].length - 0.05).abs() < 1e-8);
    }

    let pt = DiscreteLoop::constant([0.2, 0.2], 8);
    let c = const_speed(&t, &pt, 8).unwrap();
    assert_eq!(c.breakpoints(), pt.breakpoints());
}

#[test]
fn const_speed_keeps_image_and_length() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let pts: [[f64; 2]; 4] = [[0.1, 0.1], [0.18, 0.1], [0.2, 0.25], [0.05, 0.2]];
    let g = DiscreteLoop::from_points(&t, &pts).unwrap();
    let c = const_speed(&t, &g, 8).unwrap();
    assert!((loop_length(&c) - loop_length(&g)).abs() <= 1e-9 * loop_length(&g));
    // corners survive as breakpoints
    for p in &pts {
        assert!(c.breakpoints().iter().any(|b| (b[0] - p[0]).abs() < 1e-14 && (b[1] - p[1]).abs() < 1e-14));
    }
    // the grid points split the length evenly
    let l = loop_length(&c);
    for k in 0..8 {
        let x = k as f64 / 8.0;
        let (i, t0) = c.locate(x);
        assert_eq!(t0, 0.0, "grid point {k} is a breakpoint");
        let arc: f64 = c.segments()[..i].iter().map(|s| s.length).sum();
        assert!((arc - x * l).abs() < 1e-8 * l);
    }
    assert!((loop_energy(&c) - l * l).abs() < 1e-9);
}

#[test]
fn great_circle_is_fixed() {
    let s = ChartManifold::sphere(1.0);
    let g = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_2, 64)).unwrap();
    let p = cap_for(&g, 0.6, 32);
    let out = birkhoff_step(&s, &g, &p).unwrap();
    assert_eq!(out.len(), 64);
    assert!(loop_metric(&s, &out, &g).unwrap() <= 1e-6);
    assert!(geodesic_residual(&s, &g) <= 1e-6);
}

#[test]
fn zigzag_flow_reaches_the_straight_loop() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &zigzag(16, 0.05)).unwrap();
    let p = cap_for(&g, 0.11, 16);
    let one = birkhoff_step(&t, &g, &p).unwrap();
    assert!(loop_length(&one) < loop_length(&g));
    let mut cur = one;
    for _ in 1..50 {
        cur = birkhoff_step(&t, &cur, &p).unwrap();
    }
    assert!((loop_length(&cur) - 1.0).abs() <= 1e-4);

    let r = iterate_flow(&t, &g, &p, &StopRule::default(), None).unwrap();
    assert_eq!(r.classification, Classification::ConvergedGeodesic);
    assert!((r.final_length - 1.0).abs() <= 1e-4);
    assert!(r.length_trace.windows(2).all(|w| w[1] <= w[0] + 1e-8));
}

#[test]
fn latitude_shrinks() {
    let s = ChartManifold::sphere(1.0).with_step(1e-2);
    let g = DiscreteLoop::from_points(&s, &latitude(FRAC_PI_3, 134)).unwrap();
    let p = validate_params((1.05 * loop_length(&g)).powi(2), 0.7, 67, &s, None).unwrap();
    let mut cur = g.clone();
    let mut prev = loop_length(&g);
    for _ in 0..5 {
        cur = birkhoff_step(&s, &cur, &p).unwrap();
        let l = loop_length(&cur);
        assert!(l < prev);
        prev = l;
    }
    // it moves toward the nearer pole
    assert!(cur.breakpoints().iter().all(|b| b[0] < FRAC_PI_3));
}

#[test]
fn homotopy_endpoints_and_midpoints() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &zigzag(8, 0.05)).unwrap();
    let p = cap_for(&g, 0.11, 8);
    assert_eq!(homotopy_phi(&t, &g, 0.0, &p).unwrap(), g);
    let step = birkhoff_step(&t, &g, &p).unwrap();
    let end = homotopy_phi(&t, &g, 1.0, &p).unwrap();
    assert!(loop_metric(&t, &end, &step).unwrap() <= 1e-8);

    let e = even_replace(&t, &g, &p).unwrap();
    let q = homotopy_phi(&t, &g, 0.25, &p).unwrap();
    for (i, b) in q.breakpoints().iter().enumerate() {
        let (a, c) = (g.breakpoints()[i], e.breakpoints()[i]);
        assert!((b[0] - (a[0] + c[0]) / 2.0).abs() < 1e-14);
        assert!((b[1] - (a[1] + c[1]) / 2.0).abs() < 1e-14);
    }
}

#[test]
fn homotopy_is_continuous_in_s() {
    let s = ChartManifold::sphere(1.0).with_step(1e-2);
    let pts: Vec<[f64; 2]> = (0..24).map(|i| [1.2 + 0.1 * (3.0 * i as f64).sin(), 2.0 * PI * i as f64 / 24.0]).collect();
    let g = DiscreteLoop::from_points(&s, &pts).unwrap();
    let p = cap_for(&g, 0.6, 12);
    let mut prev = homotopy_phi(&s, &g, 0.0, &p).unwrap();
    for k in 1..=40 {
        let cur = homotopy_phi(&s, &g, k as f64 / 40.0, &p).unwrap();
        // compare on the common grid
        let gap = (0..24)
            .map(|i| {
                let x = i as f64 / 24.0;
                distance(&s, prev.point_at(&s, x), cur.point_at(&s, x)).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(gap < 0.05, "s = {}: {gap}", k as f64 / 40.0);
        prev = cur;
    }
}

#[test]
fn residual_examples() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let straight = DiscreteLoop::from_points(&t, &zigzag(8, 0.0)).unwrap();
    assert_eq!(geodesic_residual(&t, &straight), 0.0);
    let z = DiscreteLoop::from_points(&t, &zigzag(8, 0.05)).unwrap();
    assert!(geodesic_residual(&t, &z) >= 2.0 * (0.05f64 * 16.0).atan() - 1e-12);
}

#[test]
fn energy_cap_is_enforced() {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let g = DiscreteLoop::from_points(&t, &zigzag(8, 0.05)).unwrap();
    let p = BirkhoffParams::assume_valid(0.5, 0.11, 8);
    assert!(matches!(birkhoff_step(&t, &g, &p), Err(FlowError::EnergyCapExceeded { .. })));
}

#[test]
fn energy_bound_propagates_to_spacing() {
    let s = ChartManifold::sphere(1.0).with_step(1e-2);
    let g = DiscreteLoop::from_points(&s, &latitude(1.2, 40)).unwrap();
    let e = (1.05 * loop_length(&g)).powi(2);
    let l = BirkhoffParams::min_segments(e, 0.65);
    let p = validate_params(e, 0.65, l, &s, None).unwrap();
    let out = birkhoff_step(&s, &g, &p).unwrap();
    assert!(loop_energy(&out) <= e);
    let bound = (e / l as f64).sqrt();
    assert!(bound <= p.radius);
    for i in 0..p.grid_size() {
        let n = p.grid_size() as f64;
        let (a, b) = (out.point_at(&s, i as f64 / n), out.point_at(&s, (i + 1) as f64 / n));
        assert!(distance(&s, a, b).unwrap() <= bound + 1e-9);
    }
}

fn ball_loop(center: [f64; 2], r: f64, wobble: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            let rr = r * (1.0 + wobble * (3.0 * a).sin());
            [center[0] + rr * a.cos(), center[1] + rr * a.sin()]
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn step_never_lengthens(amp in 0.0f64..0.2, theta in 1.0f64..2.1, waves in 1usize..4) {
        let s = ChartManifold::sphere(1.0).with_step(1e-2);
        let pts: Vec<[f64; 2]> = (0..48)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / 48.0;
                [theta + amp * (waves as f64 * phi).sin(), phi]
            })
            .collect();
        let g = DiscreteLoop::from_points(&s, &pts).unwrap();
        let p = cap_for(&g, 0.6, 24);
        let out = birkhoff_step(&s, &g, &p).unwrap();
        prop_assert!(loop_length(&out) <= loop_length(&g) + 1e-8);
    }

    #[test]
    fn convex_balls_trap_loops(cx in 0.2f64..0.8, cy in 0.2f64..0.8, r in 0.02f64..0.07, wobble in 0.0f64..0.5) {
        // flat torus: balls of radius < conv_bound / 2 are convex
        let t = ChartManifold::flat_torus([1.0, 1.0]);
        let ball = 0.11;
        let g = DiscreteLoop::from_points(&t, &ball_loop([cx, cy], r, wobble, 16)).unwrap();
        let p = cap_for(&g, 0.11, 8);
        let inside = |q: [f64; 2]| distance(&t, q, [cx, cy]).unwrap() <= ball + 1e-12;
        let out = birkhoff_step(&t, &g, &p).unwrap();
        prop_assert!(out.trace(&t, 4).iter().all(|&q| inside(q)));
        for k in 0..=8 {
            let h = homotopy_phi(&t, &g, k as f64 / 8.0, &p).unwrap();
            prop_assert!(h.trace(&t, 4).iter().all(|&q| inside(q)));
        }
    }
}
