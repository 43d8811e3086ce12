use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoloop::domain::{minimize_in_class, minmax_sweep, ConcaveRegion, LoopFamily, RegionShape, SweepStatus, SweepStop};
use geoloop::flow::{birkhoff_step, homotopy_phi, iterate_flow, validate_params, BirkhoffParams, Classification, StopRule};
use geoloop::geometry::{distance, ChartManifold};
use geoloop::group::audit_groups;
use geoloop::loops::{loop_length, loop_metric, measure_continuity_gap, DiscreteLoop, TestFunction};

struct Outcome {
    pass: bool,
    detail: String,
}

fn latitude(m: &ChartManifold<f64>, theta: f64, n: usize) -> DiscreteLoop<f64> {
    let pts: Vec<[f64; 2]> = (0..n).map(|i| [theta, 2.0 * PI * i as f64 / n as f64]).collect();
    DiscreteLoop::from_points(m, &pts).unwrap()
}

fn wobbly(center: [f64; 2], r: f64, wobble: f64, phase: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64 + phase;
            let rr = r * (1.0 + wobble * (3.0 * a).sin());
            [center[0] + rr * a.cos(), center[1] + rr * a.sin()]
        })
        .collect()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn sphere_minmax() -> Outcome {
    std::env::set_var("GEOLOOP_THREADS", "1");
    let s = ChartManifold::sphere(1.0);
    let (l, members) = (64, 17);
    let lo = s.domain[0].0;
    let loops = (0..members)
        .map(|k| match k {
            0 => DiscreteLoop::constant([lo, 0.0], 2 * l),
            k if k + 1 == members => DiscreteLoop::constant([PI - lo, 0.0], 2 * l),
            k => latitude(&s, PI * k as f64 / (members - 1) as f64, 2 * l),
        })
        .collect();
    let fam = LoopFamily::sweepout(loops);
    let p = BirkhoffParams::assume_valid(1.1 * 4.0 * PI * PI, 0.6, l);
    let t = Instant::now();
    let res = minmax_sweep(&s, None, &fam, &p, &SweepStop::default());
    let el = t.elapsed();
    std::env::remove_var("GEOLOOP_THREADS");
    let res = match res {
        Ok(r) => r,
        Err(e) => return Outcome { pass: false, detail: format!("error {e}") },
    };
    let ratio = res.width / (2.0 * PI);
    let pass = res.status == SweepStatus::Converged
        && (0.99..=1.01).contains(&ratio)
        && res.critical_residual <= 1e-3
        && res.iterations <= 500
        && secs(el) < 60.0;
    Outcome {
        pass,
        detail: format!(
            "width/2pi={ratio:.6} residual={:.2e} iterations={} {:.1}s",
            res.critical_residual,
            res.iterations,
            secs(el)
        ),
    }
}

fn neck_minimization() -> Outcome {
    let m = ChartManifold::catenoid((-3.0, 3.0)).with_step(1e-2);
    let r = ConcaveRegion::new(&m, RegionShape::Band { half_width: 0.5 }, 0.05, 7.0).unwrap();
    let l = 64;
    let g = latitude(&m, 0.7, 2 * l);
    let p = BirkhoffParams::assume_valid((1.05 * loop_length(&g)).powi(2), 0.3, l);
    let t = Instant::now();
    let out = match minimize_in_class(&r, &g, &p, &StopRule::default()) {
        Ok(o) => o,
        Err(e) => return Outcome { pass: false, detail: format!("error {e}") },
    };
    let el = t.elapsed();
    let ratio = out.flow.final_length / (2.0 * PI);
    let converged = out.flow.classification == Classification::ConvergedGeodesic;
    let pass = converged && (0.99..=1.01).contains(&ratio) && out.trapped_throughout && secs(el) < 120.0;
    let free = out.trapping.iter().filter(|&&b| !b).count();
    Outcome {
        pass,
        detail: format!(
            "{:?} length/2pi={ratio:.6} iterations={} iterates missing closure(U)={free}/{} first trapped={:?} {:.1}s",
            out.flow.classification,
            out.flow.iterations,
            out.trapping.len(),
            out.trapping.iter().position(|&b| b),
            secs(el)
        ),
    }
}

fn torus_zigzag() -> Outcome {
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let l = 24;
    let pts: Vec<[f64; 2]> =
        (0..2 * l).map(|i| [i as f64 / (2 * l) as f64, 0.3 + if i % 2 == 1 { 0.05 } else { 0.0 }]).collect();
    let g = DiscreteLoop::from_points(&t, &pts).unwrap();
    let p = BirkhoffParams::assume_valid((1.05 * loop_length(&g)).powi(2), 0.05, l);
    match iterate_flow(&t, &g, &p, &StopRule::default(), None) {
        Ok(res) => Outcome {
            pass: (res.final_length - 1.0).abs() <= 1e-4,
            detail: format!("{:?} length={:.9} iterations={}", res.classification, res.final_length, res.iterations),
        },
        Err(e) => Outcome { pass: false, detail: format!("error {e}") },
    }
}

fn great_circle_fixed_point() -> Outcome {
    let s = ChartManifold::sphere(1.0).with_step(1e-3);
    let l = 64;
    let g = latitude(&s, FRAC_PI_2, 2 * l);
    let p = BirkhoffParams::assume_valid((1.05 * 2.0 * PI).powi(2), 0.6, l);
    let out = birkhoff_step(&s, &g, &p).unwrap();
    let d = loop_metric(&s, &out, &g).unwrap();
    Outcome { pass: d <= 1e-6, detail: format!("loop_metric={d:.3e}") }
}

// exact distance to the image sample closest in the chart, an upper bound on the true gap
fn near_image(m: &ChartManifold<f64>, image: &[[f64; 2]], q: [f64; 2]) -> f64 {
    let x = image.iter().min_by(|a, b| m.chart_distance(q, **a).total_cmp(&m.chart_distance(q, **b))).unwrap();
    distance(m, q, *x).unwrap_or(f64::INFINITY)
}

fn monotone_and_contained() -> Outcome {
    let spaces: [ChartManifold<f64>; 3] = [
        ChartManifold::sphere(1.0),
        ChartManifold::flat_torus([1.0, 1.0]),
        ChartManifold::catenoid((-3.0, 3.0)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let (mut longer, mut far, mut escaped, mut worst_far) = (0usize, 0usize, 0usize, 0.0f64);
    let trials = 1000;
    let t0 = Instant::now();
    for trial in 0..trials {
        let m = &spaces[trial % 3];
        // coarser copy for the 4R distances only
        let coarse = m.clone().with_step(1e-2);
        let radius = 0.9 * (m.conv_bound() / 2.0).min(m.injectivity_floor / 4.0);
        let (center, r) = match trial % 3 {
            0 => ([rng.gen_range(0.8..2.3), rng.gen_range(0.0..2.0 * PI)], rng.gen_range(0.05..0.3)),
            1 => ([rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)], rng.gen_range(0.01..0.04)),
            _ => ([rng.gen_range(-1.5..1.5), rng.gen_range(0.0..2.0 * PI)], rng.gen_range(0.05..0.3)),
        };
        let wobble = rng.gen_range(0.0..0.4);
        let phase = rng.gen_range(0.0..2.0 * PI);
        // refine until the cap taken from the loop admits its own segment count
        let mut l = 8;
        let (g, p) = loop {
            let pts: Vec<[f64; 2]> = wobbly(center, r, wobble, phase, 2 * l).into_iter().map(|q| m.wrap(q)).collect();
            let g = DiscreteLoop::from_points(m, &pts).unwrap();
            let e = (1.05 * loop_length(&g)).powi(2);
            match validate_params(e, radius, l, m, None) {
                Ok(p) => break (g, p),
                Err(_) => l = BirkhoffParams::min_segments(e, radius).max(l + 1),
            }
        };
        let image = g.trace(m, 16);
        let center = m.wrap(center);
        // a convex ball holding the breakpoints holds the whole loop
        let ball = g.breakpoints().iter().map(|&q| distance(m, center, q).unwrap()).fold(0.0, f64::max);
        let inside = |q: [f64; 2]| distance(m, center, q).map_or(false, |d| d <= ball + 1e-9);
        let out = birkhoff_step(m, &g, &p).unwrap();
        if loop_length(&out) > loop_length(&g) + 1e-8 {
            longer += 1;
        }
        // breakpoints suffice: the segments are short geodesics of a convex ball
        if ball < m.conv_bound() && !out.breakpoints().iter().all(|&q| inside(q)) {
            escaped += 1;
        }
        for k in 1..=4 {
            let h = homotopy_phi(m, &g, k as f64 / 4.0, &p).unwrap();
            for q in h.trace(m, 2) {
                let d = near_image(&coarse, &image, q);
                worst_far = worst_far.max(d / radius);
                if d > 4.0 * radius + 1e-6 {
                    far += 1;
                }
            }
            if ball < m.conv_bound() && !h.breakpoints().iter().all(|&q| inside(q)) {
                escaped += 1;
            }
        }
    }
    Outcome {
        pass: longer == 0 && far == 0 && escaped == 0,
        detail: format!(
            "{trials} loops: lengthened={longer} beyond 4R={far} (max dist/R={worst_far:.3}) left convex ball={escaped} {:.1}s",
            secs(t0.elapsed())
        ),
    }
}

fn pushout_guarantee() -> Outcome {
    let m = ChartManifold::catenoid((-3.0, 3.0)).with_step(1e-2);
    let r = ConcaveRegion::new(&m, RegionShape::Band { half_width: 0.5 }, 0.05, 7.0).unwrap();
    let (eta, w) = (r.eta, r.collar_width());
    let mut rng = ChaCha8Rng::seed_from_u64(0x9054);
    let (mut n, mut bad, mut worst) = (0usize, 0usize, f64::INFINITY);
    while n < 10_000 {
        let p = [rng.gen_range(-1.2..1.2), rng.gen_range(0.0..2.0 * PI)];
        let d = r.signed_distance(p);
        if !(d >= -3.0 * eta && d < w) {
            continue;
        }
        n += 1;
        let after = r.signed_distance(r.pushout_point(p, r.horizon()));
        worst = worst.min(after);
        if after < eta - 1e-6 {
            bad += 1;
        }
    }
    Outcome { pass: bad == 0, detail: format!("{n} points: violations={bad} min d after={worst:.6} eta={eta}") }
}

fn measure_continuity() -> Outcome {
    let s = ChartManifold::sphere(1.0);
    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let sphere_phi = TestFunction { f: |p: [f64; 2]| p[0].cos(), sup_norm: 1.0, lipschitz: 1.0 };
    let torus_phi = TestFunction {
        f: |p: [f64; 2]| (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).cos(),
        sup_norm: 1.0,
        lipschitz: 2.0 * PI * 2f64.sqrt(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xc047);
    let (mut checks, mut bad, mut worst) = (0usize, 0usize, f64::NEG_INFINITY);
    for seq in 0..100 {
        let on_sphere = seq % 2 == 0;
        let m = if on_sphere { &s } else { &t };
        let n = 24;
        let (center, r) = if on_sphere {
            ([rng.gen_range(0.8..2.3), rng.gen_range(0.0..2.0 * PI)], rng.gen_range(0.1..0.5))
        } else {
            ([rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)], rng.gen_range(0.05..0.2))
        };
        let base: Vec<[f64; 2]> =
            wobbly(center, r, rng.gen_range(0.0..0.4), 0.0, n).into_iter().map(|q| m.wrap(q)).collect();
        let g_inf = DiscreteLoop::from_points(m, &base).unwrap();
        for k in 0..6 {
            let eps = 0.05 / 2f64.powi(k);
            let moved: Vec<[f64; 2]> = base
                .iter()
                .map(|q| m.wrap([q[0] + eps * rng.gen_range(-1.0..1.0), q[1] + eps * rng.gen_range(-1.0..1.0)]))
                .collect();
            let g_i = DiscreteLoop::from_points(m, &moved).unwrap();
            let gap = if on_sphere {
                measure_continuity_gap(m, &g_inf, &g_i, &sphere_phi)
            } else {
                measure_continuity_gap(m, &g_inf, &g_i, &torus_phi)
            };
            checks += 1;
            worst = worst.max(gap.lhs - gap.rhs);
            if gap.lhs > gap.rhs + 1e-6 {
                bad += 1;
            }
        }
    }
    Outcome { pass: bad == 0, detail: format!("100 sequences, {checks} comparisons: violations={bad} max(lhs-rhs)={worst:.3e}") }
}

fn group_audit() -> Outcome {
    let t = Instant::now();
    let rep = audit_groups(24);
    let el = t.elapsed();
    Outcome {
        pass: rep.passed && secs(el) < 600.0,
        detail: format!(
            "{} groups, {} pairs: coverage={} equivalence={} burnside={} trichotomy={} a4<a5 gap={} split {}/{} failed {:.1}s",
            rep.groups.len(),
            rep.pairs,
            rep.coverage_violations.len(),
            rep.equivalence_mismatches.len(),
            rep.burnside_failures.len(),
            rep.trichotomy_violations.len(),
            rep.a4_in_a5_gap,
            rep.split_failures,
            rep.split_sequences,
            secs(el)
        ),
    }
}

fn negative_controls() -> Outcome {
    let s = ChartManifold::sphere(1.0).with_step(1e-2);
    let g = latitude(&s, PI / 3.0, 32);
    let p = BirkhoffParams::assume_valid((1.05 * loop_length(&g)).powi(2), 0.6, 16);
    let single = iterate_flow(&s, &g, &p, &StopRule::default(), None).map(|r| r.classification);

    let t = ChartManifold::flat_torus([1.0, 1.0]);
    let n = 18;
    let members: Vec<_> = (0..9)
        .map(|k| {
            let rad = 0.05 * (PI * k as f64 / 8.0).sin();
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / n as f64;
                    [0.5 + rad * a.cos(), 0.5 + rad * a.sin()]
                })
                .collect();
            DiscreteLoop::from_points(&t, &pts).unwrap()
        })
        .collect();
    let fam = LoopFamily::sweepout(members);
    let p = BirkhoffParams::assume_valid(0.2, 0.05, 9);
    let stop = SweepStop { collapse_width: Some(1e-3), ..SweepStop::default() };
    let sweep = minmax_sweep(&t, None, &fam, &p, &stop);
    let width = sweep.as_ref().map_or(f64::NAN, |r| r.width);
    Outcome {
        pass: matches!(single, Ok(Classification::PointLoop)) && width < 1e-3,
        detail: format!("latitude pi/3 -> {single:?}, torus sweepout width={width:.3e}"),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sphere min-max", sphere_minmax),
        ("neck minimization", neck_minimization),
        ("torus class minimization", torus_zigzag),
        ("great circle fixed point", great_circle_fixed_point),
        ("monotonicity and containment", monotone_and_contained),
        ("push-out guarantee", pushout_guarantee),
        ("measure continuity", measure_continuity),
        ("group audit", group_audit),
        ("negative controls", negative_controls),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| *o == (i + 1).to_string()) {
            continue;
        }
        let out = run();
        println!("[{}] {name}: {} ({})", i + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail);
        failed += usize::from(!out.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
