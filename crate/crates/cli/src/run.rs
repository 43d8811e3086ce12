//! Scenario execution and report assembly.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use geoloop::domain::{
    audit_delta_convexity, collar_length, minimize_in_class, minmax_sweep, ConcaveRegion, ConvexityAudit, LoopFamily,
    RegionShape, SafetyViolation, SweepStatus, SweepStop,
};
use geoloop::flow::{
    const_speed, geodesic_residual, iterate_flow, validate_params, BirkhoffParams, Classification, FlowResult, StopRule,
};
use geoloop::geometry::ChartManifold;
use geoloop::group::{audit_groups, GroupAuditReport, CATALOG_MAX_ORDER};
use geoloop::loops::{loop_length, DiscreteLoop};
use serde::Serialize;

use crate::config::{
    AuditSpec, FamilySpec, LoopSpec, ParamsSpec, RegionSpec, ScenarioConfig, ScenarioKind, ShapeSpec, StopSpec,
};
use crate::error::CliError;
use crate::svg::{render_svg, SampledField, Scene, SceneLoop, SvgStyle};

type Pt = [f64; 2];

const DEFAULT_AUDIT_SAMPLES: usize = 400;
const DEFAULT_MAX_ORDER: usize = 24;
const FIELD_CELLS: usize = 96;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub classification: Classification,
    pub iterations: usize,
    pub initial_length: f64,
    pub final_length: f64,
    pub residual: f64,
    pub length_trace: Vec<f64>,
    pub final_loop: Vec<Pt>,
}

impl FlowSummary {
    fn new(f: &FlowResult<f64>) -> Self {
        Self {
            classification: f.classification,
            iterations: f.iterations,
            initial_length: f.length_trace[0],
            final_length: f.final_length,
            residual: f.residual,
            length_trace: f.length_trace.clone(),
            final_loop: f.loop_.breakpoints().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub delta: f64,
    pub pairs_checked: usize,
    pub within_modulus: bool,
    pub violations: usize,
    pub passed: bool,
}

impl AuditSummary {
    fn new(a: &ConvexityAudit<f64>) -> Self {
        Self {
            delta: a.delta,
            pairs_checked: a.pairs_checked,
            within_modulus: a.within_modulus,
            violations: a.violations.len(),
            passed: a.passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberSummary {
    pub index: usize,
    pub node: f64,
    pub boundary: bool,
    pub length: f64,
    pub residual: f64,
    pub point_loop: bool,
}

/// A geodesic candidate with its length restricted to `U(eta)` when a region is set.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub index: usize,
    pub length: f64,
    pub residual: f64,
    pub collar_length: Option<f64>,
    pub breakpoints: Vec<Pt>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    SingleFlow {
        params: BirkhoffParams<f64>,
        flow: FlowSummary,
        collar_length: Option<f64>,
    },
    MinimizeInClass {
        params: BirkhoffParams<f64>,
        flow: FlowSummary,
        trapping: Vec<bool>,
        trapped_throughout: bool,
        /// First iterate whose image misses the closure of `U`.
        witness_iteration: Option<usize>,
        witness_chain: Vec<Vec<Pt>>,
        audit: AuditSummary,
        collar_length: f64,
    },
    MinmaxSweep {
        params: BirkhoffParams<f64>,
        status: SweepStatus,
        iterations: usize,
        width: f64,
        width_trace: Vec<f64>,
        monotone: bool,
        members: Vec<MemberSummary>,
        critical: Candidate,
        safety_violations: Vec<SafetyViolation>,
    },
    RegionAudit {
        collar_width: f64,
        horizon: f64,
        rho: f64,
        alpha: f64,
        closure_eps: f64,
        audit: ConvexityAudit<f64>,
    },
    GroupAudit {
        report: GroupAuditReport,
    },
}

/// The only fields that differ between two runs of the same config.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub timestamp: u64,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// The config with every default filled in; re-running it reproduces the outcome.
    pub config: ScenarioConfig,
    pub outcome: Outcome,
    pub timing: Timing,
}

/// A finished run: the report plus the loops and scene to write next to it.
pub struct RunOutput {
    pub report: RunReport,
    pub loops: Vec<(String, Vec<Pt>)>,
    pub scene: Scene,
}

fn build_manifold(cfg: &mut ScenarioConfig) -> Result<ChartManifold<f64>, CliError> {
    let spec = cfg.require(&cfg.manifold, "manifold")?;
    let mut m: ChartManifold<f64> = spec.build().map_err(|e| CliError::config("build_manifold", e))?;
    if let Some(h) = cfg.integrator_step {
        if !(h > 0.0 && h <= 0.5) {
            return Err(CliError::config("build_manifold", format!("integrator_step {h} outside (0, 0.5]")));
        }
        m = m.with_step(h);
    }
    cfg.integrator_step = Some(m.integrator.step);
    Ok(m)
}

fn build_region(m: &ChartManifold<f64>, spec: &mut RegionSpec) -> Result<ConcaveRegion<f64>, CliError> {
    let op = "build_region";
    let shape = match spec.shape {
        ShapeSpec::Band { half_width } => RegionShape::Band { half_width },
        ShapeSpec::Ball { center, radius } => RegionShape::Ball { center, radius },
        ShapeSpec::BallComplement { center, radius } => RegionShape::BallComplement { center, radius },
        ShapeSpec::Cap { colatitude } => RegionShape::Cap { colatitude },
    };
    let mut r = ConcaveRegion::new(m, shape, spec.eta, spec.lambda_cap).map_err(|e| CliError::config(op, e.to_string()))?;
    if let Some(t) = spec.theta {
        r = r.with_theta(t).map_err(|e| CliError::config(op, e.to_string()))?;
    }
    if let Some(rho) = spec.rho {
        r = r.with_rho(rho);
    }
    if let Some(a) = spec.alpha {
        r = r.with_alpha(a).map_err(|e| CliError::config(op, e.to_string()))?;
    }
    spec.theta = Some(r.theta);
    spec.rho = Some(r.rho);
    spec.alpha = Some(r.alpha);
    Ok(r)
}

fn sweep_axis(m: &ChartManifold<f64>, axis: usize) -> Result<(usize, f64, f64), CliError> {
    if axis > 1 {
        return Err(CliError::config("generate_loop", format!("axis {axis} out of range")));
    }
    let b = 1 - axis;
    if m.periods[b].is_none() {
        return Err(CliError::config("generate_loop", format!("axis {b} is not periodic, a parallel cannot close")));
    }
    let (lo, hi) = m.domain[b];
    Ok((b, lo, hi))
}

fn parallel(m: &ChartManifold<f64>, level: f64, axis: usize, n: usize, amp: f64) -> Result<Vec<Pt>, CliError> {
    let (b, lo, hi) = sweep_axis(m, axis)?;
    Ok((0..n)
        .map(|i| {
            let mut p = [0.0; 2];
            p[axis] = level + if i % 2 == 1 { amp } else { 0.0 };
            p[b] = lo + (hi - lo) * i as f64 / n as f64;
            p
        })
        .collect())
}

fn read_csv(path: &str) -> Result<Vec<Pt>, CliError> {
    let op = "read_loop_csv";
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::config(op, format!("{path}: {e}")))?;
    let mut pts = Vec::new();
    for rec in rd.deserialize::<(f64, f64)>() {
        let (x, y) = rec.map_err(|e| CliError::config(op, format!("{path}: {e}")))?;
        pts.push([x, y]);
    }
    Ok(pts)
}

fn generate(m: &ChartManifold<f64>, spec: &LoopSpec, n_default: usize) -> Result<Vec<Pt>, CliError> {
    let pts = match spec {
        LoopSpec::Parallel { level, axis, points } => parallel(m, *level, *axis, points.unwrap_or(n_default), 0.0)?,
        LoopSpec::Zigzag { level, amplitude, axis, points } => {
            parallel(m, *level, *axis, points.unwrap_or(n_default), *amplitude)?
        }
        LoopSpec::Circle { center, radius, wobble, points } => {
            let n = points.unwrap_or(n_default);
            (0..n)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / n as f64;
                    let r = radius * (1.0 + wobble * (3.0 * a).sin());
                    m.wrap([center[0] + r * a.cos(), center[1] + r * a.sin()])
                })
                .collect()
        }
        LoopSpec::Points { points } => points.clone(),
        LoopSpec::Csv { path } => read_csv(path)?,
    };
    if pts.len() < 2 {
        return Err(CliError::config("generate_loop", "a loop needs at least two breakpoints"));
    }
    Ok(pts)
}

/// Builds the loop and brings it to the `2L` grid.
fn to_grid(m: &ChartManifold<f64>, pts: &[Pt], grid: usize) -> Result<DiscreteLoop<f64>, CliError> {
    let g = DiscreteLoop::from_points(m, pts).map_err(|e| CliError::config("build_loop", e.to_string()))?;
    if g.len() == grid && g.is_uniform() {
        return Ok(g);
    }
    const_speed(m, &g, grid).map_err(|e| CliError::from_flow("const_speed", e))
}

fn family_members(m: &ChartManifold<f64>, spec: &FamilySpec, grid: usize) -> Result<LoopFamily<f64>, CliError> {
    let op = "generate_family";
    match spec {
        FamilySpec::ParallelSweep { members, axis } => {
            if *members < 3 {
                return Err(CliError::config(op, "a sweep needs at least three members"));
            }
            let (lo, hi) = m.domain[(*axis).min(1)];
            let mut loops = Vec::with_capacity(*members);
            for k in 0..*members {
                let level = lo + (hi - lo) * k as f64 / (*members - 1) as f64;
                let pts = parallel(m, level, *axis, grid, 0.0)?;
                // a parallel that degenerates at the chart edge is a point there
                let (b, period) = (1 - (*axis).min(1), m.periods[1 - (*axis).min(1)].unwrap_or(0.0));
                let mut dir = [0.0; 2];
                dir[b] = period;
                if m.norm_at(pts[0], dir) < 1e-4 * m.conv_bound() {
                    loops.push(DiscreteLoop::constant(pts[0], grid));
                } else {
                    loops.push(to_grid(m, &pts, grid)?);
                }
            }
            Ok(LoopFamily::sweepout(loops))
        }
        FamilySpec::Concentric { center, max_radius, members } => {
            if *members < 3 {
                return Err(CliError::config(op, "a sweep needs at least three members"));
            }
            let c = m.wrap(*center);
            let mut loops = Vec::with_capacity(*members);
            for k in 0..*members {
                let r = max_radius * (PI * k as f64 / (*members - 1) as f64).sin();
                if r < 1e-12 {
                    loops.push(DiscreteLoop::constant(c, grid));
                    continue;
                }
                let spec = LoopSpec::Circle { center: c, radius: r, wobble: 0.0, points: Some(grid) };
                loops.push(to_grid(m, &generate(m, &spec, grid)?, grid)?);
            }
            Ok(LoopFamily::sweepout(loops))
        }
        FamilySpec::Loops { loops, sweepout } => {
            if loops.is_empty() {
                return Err(CliError::config(op, "empty family"));
            }
            let members = loops.iter().map(|s| to_grid(m, &generate(m, s, grid)?, grid)).collect::<Result<Vec<_>, _>>()?;
            Ok(if *sweepout { LoopFamily::sweepout(members) } else { LoopFamily::open(members) })
        }
    }
}

/// Picks `L` and `E` (unless given) so that the cap admits the loops built on the
/// `2L` grid, then validates.
fn resolve_params<X>(
    m: &ChartManifold<f64>,
    spec: &mut ParamsSpec,
    region: Option<&ConcaveRegion<f64>>,
    build: impl Fn(usize) -> Result<X, CliError>,
    lengths: impl Fn(&X) -> Vec<f64>,
) -> Result<(BirkhoffParams<f64>, X), CliError> {
    let op = "validate_params";
    if !(spec.radius > 0.0) {
        return Err(CliError::config(op, "params.radius must be positive"));
    }
    let mut l = spec.segments.unwrap_or(32).max(1);
    let (e, built) = loop {
        let built = build(2 * l)?;
        let longest = lengths(&built).into_iter().fold(0.0, f64::max);
        let e = spec.energy_cap.unwrap_or((1.05 * longest).powi(2).max(1e-12));
        if spec.segments.is_none() {
            let need = BirkhoffParams::min_segments(e, spec.radius);
            if need > l {
                if need > 100_000 {
                    return Err(CliError::config(op, format!("energy cap {e} needs L = {need}")));
                }
                l = need;
                continue;
            }
        }
        break (e, built);
    };
    spec.segments = Some(l);
    spec.energy_cap = Some(e);
    let p = if spec.assume_valid {
        BirkhoffParams::assume_valid(e, spec.radius, l)
    } else {
        validate_params(e, spec.radius, l, m, region.map(|r| r.bounds())).map_err(|e| CliError::from_flow(op, e))?
    };
    Ok((p, built))
}

fn stop_rule(spec: &mut StopSpec) -> StopRule {
    let d = StopRule::default();
    let s = StopRule {
        relative_decrement: spec.relative_decrement.unwrap_or(d.relative_decrement),
        residual_tol: spec.residual_tol.unwrap_or(d.residual_tol),
        max_iter: spec.max_iter.unwrap_or(d.max_iter),
    };
    spec.relative_decrement = Some(s.relative_decrement);
    spec.residual_tol = Some(s.residual_tol);
    spec.max_iter = Some(s.max_iter);
    s
}

fn sweep_stop(spec: &mut StopSpec) -> SweepStop {
    let d = SweepStop::default();
    let s = SweepStop {
        relative_decrement: spec.relative_decrement.unwrap_or(d.relative_decrement),
        residual_tol: spec.residual_tol.unwrap_or(d.residual_tol),
        max_iter: spec.max_iter.unwrap_or(d.max_iter),
        collapse_width: spec.collapse_width.or(d.collapse_width),
    };
    spec.relative_decrement = Some(s.relative_decrement);
    spec.residual_tol = Some(s.residual_tol);
    spec.max_iter = Some(s.max_iter);
    s
}

fn base_scene(m: &ChartManifold<f64>, region: Option<&ConcaveRegion<f64>>) -> Scene {
    let bounds = m.domain;
    let field = region.map(|r| {
        let n = [FIELD_CELLS, FIELD_CELLS];
        let h = [(bounds[0].1 - bounds[0].0) / n[0] as f64, (bounds[1].1 - bounds[1].0) / n[1] as f64];
        let mut values = Vec::with_capacity(n[0] * n[1]);
        for i in 0..n[0] {
            for j in 0..n[1] {
                let p = [bounds[0].0 + (i as f64 + 0.5) * h[0], bounds[1].0 + (j as f64 + 0.5) * h[1]];
                values.push(r.signed_distance(p));
            }
        }
        SampledField { n, values }
    });
    Scene {
        bounds,
        periods: m.periods,
        field,
        levels: region.map(|r| vec![r.eta]).unwrap_or_default(),
        ..Scene::default()
    }
}

fn scene_loop(label: &str, g: &[Pt], emphasis: bool) -> SceneLoop {
    SceneLoop { label: label.into(), points: g.to_vec(), emphasis }
}

fn residual_of(m: &ChartManifold<f64>, g: &DiscreteLoop<f64>) -> f64 {
    if g.is_point_loop(m) {
        0.0
    } else {
        geodesic_residual(m, g)
    }
}

/// Runs the scenario described by `cfg` without touching the filesystem beyond
/// reading loop CSVs named in the config.
pub fn execute(mut cfg: ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, CliError> {
    let t0 = Instant::now();
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(n) = opts.max_iter {
        cfg.stop.max_iter = Some(n);
    }
    if let Some(o) = &opts.out {
        cfg.output.dir = Some(o.display().to_string());
    }
    cfg.output.svg |= opts.svg;
    let mut loops = Vec::new();
    let (outcome, scene) = match cfg.scenario {
        ScenarioKind::GroupAudit => {
            if cfg.manifold.is_some() || cfg.region.is_some() {
                return Err(CliError::config("validate_config", "group_audit takes no manifold or region"));
            }
            let n = cfg.groups.max_order.unwrap_or(DEFAULT_MAX_ORDER);
            if n == 0 || n > CATALOG_MAX_ORDER {
                return Err(CliError::config("audit_groups", format!("max_order must lie in 1..={CATALOG_MAX_ORDER}")));
            }
            cfg.groups.max_order = Some(n);
            (Outcome::GroupAudit { report: audit_groups(n) }, Scene { bounds: [(0.0, 1.0), (0.0, 1.0)], ..Scene::default() })
        }
        ScenarioKind::RegionAudit => {
            let m = build_manifold(&mut cfg)?;
            let mut rs = cfg.require(&cfg.region, "region")?.clone();
            let r = build_region(&m, &mut rs)?;
            cfg.region = Some(rs);
            let AuditSpec { delta, samples } = cfg.audit.clone();
            let delta = delta.unwrap_or(r.rho);
            let samples = samples.unwrap_or(DEFAULT_AUDIT_SAMPLES);
            if !(delta > 0.0) || samples == 0 {
                return Err(CliError::config("audit_delta_convexity", "delta and samples must be positive"));
            }
            cfg.audit = AuditSpec { delta: Some(delta), samples: Some(samples) };
            let audit = audit_delta_convexity(&r, delta, samples, cfg.seed);
            let mut scene = base_scene(&m, Some(&r));
            scene.markers = audit.violations.iter().flat_map(|v| [v.p, v.q]).collect();
            let out = Outcome::RegionAudit {
                collar_width: r.collar_width(),
                horizon: r.horizon(),
                rho: r.rho,
                alpha: r.alpha,
                closure_eps: r.closure_eps,
                audit,
            };
            (out, scene)
        }
        ScenarioKind::SingleFlow | ScenarioKind::MinimizeInClass => {
            let m = build_manifold(&mut cfg)?;
            let region = match cfg.region.clone() {
                Some(mut rs) => {
                    let r = build_region(&m, &mut rs)?;
                    cfg.region = Some(rs);
                    Some(r)
                }
                None if cfg.scenario == ScenarioKind::MinimizeInClass => {
                    return Err(CliError::config("validate_config", "minimize_in_class needs `region`"));
                }
                None => None,
            };
            let spec = cfg.require(&cfg.initial_loop, "initial_loop")?.clone();
            let mut ps = cfg.require(&cfg.params, "params")?.clone();
            let (p, g) = resolve_params(
                &m,
                &mut ps,
                region.as_ref(),
                |grid| to_grid(&m, &generate(&m, &spec, grid)?, grid),
                |g| vec![loop_length(g)],
            )?;
            cfg.params = Some(ps);
            let stop = stop_rule(&mut cfg.stop);
            let mut scene = base_scene(&m, region.as_ref());
            loops.push(("initial".to_string(), g.breakpoints().to_vec()));
            scene.loops.push(scene_loop("initial", g.breakpoints(), false));
            let out = if cfg.scenario == ScenarioKind::SingleFlow {
                let f = iterate_flow(&m, &g, &p, &stop, None).map_err(|e| CliError::from_flow("iterate_flow", e))?;
                let converged = f.classification == Classification::ConvergedGeodesic;
                scene.loops.push(scene_loop("final", f.loop_.breakpoints(), converged));
                scene.trace = f.length_trace.clone();
                loops.push(("final".to_string(), f.loop_.breakpoints().to_vec()));
                Outcome::SingleFlow {
                    params: p,
                    flow: FlowSummary::new(&f),
                    collar_length: region.as_ref().map(|r| collar_length(r, &f.loop_)),
                }
            } else {
                let r = region.as_ref().expect("region checked above");
                let c = minimize_in_class(r, &g, &p, &stop).map_err(|e| CliError::from_domain("minimize_in_class", e))?;
                let converged = c.flow.classification == Classification::ConvergedGeodesic;
                scene.loops.push(scene_loop("final", c.flow.loop_.breakpoints(), converged));
                scene.trace = c.flow.length_trace.clone();
                loops.push(("final".to_string(), c.flow.loop_.breakpoints().to_vec()));
                Outcome::MinimizeInClass {
                    params: p,
                    flow: FlowSummary::new(&c.flow),
                    trapping: c.trapping.clone(),
                    trapped_throughout: c.trapped_throughout,
                    witness_iteration: c.witness.as_ref().map(|w| w.iteration),
                    witness_chain: c.witness.map(|w| w.chain).unwrap_or_default(),
                    audit: AuditSummary::new(&c.audit),
                    collar_length: c.collar_length,
                }
            };
            (out, scene)
        }
        ScenarioKind::MinmaxSweep => {
            let m = build_manifold(&mut cfg)?;
            let region = match cfg.region.clone() {
                Some(mut rs) => {
                    let r = build_region(&m, &mut rs)?;
                    cfg.region = Some(rs);
                    Some(r)
                }
                None => None,
            };
            let spec = cfg.require(&cfg.family, "family")?.clone();
            let mut ps = cfg.require(&cfg.params, "params")?.clone();
            let (p, fam) = resolve_params(
                &m,
                &mut ps,
                region.as_ref(),
                |grid| family_members(&m, &spec, grid),
                |f| f.lengths(),
            )?;
            cfg.params = Some(ps);
            let stop = sweep_stop(&mut cfg.stop);
            let res = minmax_sweep(&m, region.as_ref(), &fam, &p, &stop)
                .map_err(|e| CliError::from_domain("minmax_sweep", e))?;
            let mut scene = base_scene(&m, region.as_ref());
            let mut members = Vec::with_capacity(res.family.len());
            for (k, g) in res.family.members.iter().enumerate() {
                members.push(MemberSummary {
                    index: k,
                    node: res.family.node(k),
                    boundary: res.family.boundary[k],
                    length: loop_length(g),
                    residual: residual_of(&m, g),
                    point_loop: g.is_point_loop(&m),
                });
                let label = format!("member_{k:03}");
                if k != res.critical_index {
                    scene.loops.push(scene_loop(&label, g.breakpoints(), false));
                }
                loops.push((label, g.breakpoints().to_vec()));
            }
            let converged = res.status == SweepStatus::Converged;
            scene.loops.push(scene_loop("critical", res.critical_loop.breakpoints(), converged));
            scene.trace = res.width_trace.clone();
            loops.push(("critical".to_string(), res.critical_loop.breakpoints().to_vec()));
            let critical = Candidate {
                index: res.critical_index,
                length: loop_length(&res.critical_loop),
                residual: res.critical_residual,
                collar_length: region.as_ref().map(|r| collar_length(r, &res.critical_loop)),
                breakpoints: res.critical_loop.breakpoints().to_vec(),
            };
            let out = Outcome::MinmaxSweep {
                params: p,
                status: res.status,
                iterations: res.iterations,
                width: res.width,
                width_trace: res.width_trace,
                monotone: res.monotone,
                members,
                critical,
                safety_violations: res.safety_violations,
            };
            (out, scene)
        }
    };
    let timing = Timing {
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        wall_clock_s: t0.elapsed().as_secs_f64(),
    };
    let report = RunReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg,
        outcome,
        timing,
    };
    Ok(RunOutput { report, loops, scene })
}

fn write_loop(path: &Path, pts: &[Pt]) -> Result<(), CliError> {
    let op = "write_loop_csv";
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::config(op, format!("{}: {e}", path.display())))?;
    w.write_record(["x", "y"]).map_err(|e| CliError::config(op, e.to_string()))?;
    for p in pts {
        w.serialize((p[0], p[1])).map_err(|e| CliError::config(op, e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::config(op, e.to_string()))
}

/// Writes `report.json`, one CSV per loop and optionally `scene.svg`; returns the directory.
pub fn write_outputs(out: &RunOutput) -> Result<PathBuf, CliError> {
    let op = "write_outputs";
    let dir = PathBuf::from(out.report.config.output.dir.clone().unwrap_or_else(|| "geoloop-out".into()));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::config(op, format!("{}: {e}", dir.display())))?;
    let json = serde_json::to_string_pretty(&out.report).map_err(|e| CliError::numerical(op, e.to_string()))?;
    std::fs::write(dir.join("report.json"), json + "\n").map_err(|e| CliError::config(op, e.to_string()))?;
    for (name, pts) in &out.loops {
        write_loop(&dir.join(format!("{name}.csv")), pts)?;
    }
    if out.report.config.output.svg {
        let svg = render_svg(&out.scene, &SvgStyle::default());
        std::fs::write(dir.join("scene.svg"), svg).map_err(|e| CliError::config(op, e.to_string()))?;
    }
    Ok(dir)
}

/// Loads, executes and writes one scenario.
pub fn run(path: &Path, opts: &RunOptions) -> Result<(RunOutput, PathBuf), CliError> {
    let cfg = ScenarioConfig::load(path)?;
    let out = execute(cfg, opts)?;
    let dir = write_outputs(&out)?;
    Ok((out, dir))
}
