use serde::Serialize;

use super::family::{family_flow_step, LoopFamily, SafetyViolation};
use crate::par::par_map;
use super::region::{audit_delta_convexity, ConcaveRegion, ConvexityAudit};
use crate::error::{DomainError, FlowError, ParamViolation};
use crate::flow::{
    birkhoff_step, geodesic_residual, homotopy_phi, iterate_flow_observed, BirkhoffParams,
    FlowResult, StopRule,
};
use crate::loops::DiscreteLoop;
use crate::scalar::{Point, Real};

use super::family::collar_length;

/// Iterates up to the first one whose image misses the closure of `U`, with the
/// midpoint `Phi(g_{i-1}, 1/2)` of every step homotopy in between.
#[derive(Debug, Clone, Serialize)]
pub struct HomotopyWitness<T> {
    pub iteration: usize,
    /// Breakpoints of `g_0, Phi(g_0, 1/2), g_1, ..., g_iteration`.
    pub chain: Vec<Vec<Point<T>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassMinimization<T: Real> {
    pub flow: FlowResult<T>,
    /// Whether iterate `i` meets the closure of `U`, from `i = 0`.
    pub trapping: Vec<bool>,
    pub trapped_throughout: bool,
    pub witness: Option<HomotopyWitness<T>>,
    pub audit: ConvexityAudit<T>,
    /// `l(sigma, closure U(eta))` of the final loop.
    pub collar_length: T,
}

/// Audit settings used by [`minimize_in_class`].
const AUDIT_SAMPLES: usize = 200;
const AUDIT_SEED: u64 = 0x5eed;

/// Bounding box of the loop trace grown by `margin` chart units.
fn chart_box<T: Real>(pts: &[Point<T>], margin: T) -> [(T, T); 2] {
    let mut b = [(T::infinity(), -T::infinity()); 2];
    for p in pts {
        for k in 0..2 {
            b[k] = (b[k].0.min(p[k]), b[k].1.max(p[k]));
        }
    }
    [(b[0].0 - margin, b[0].1 + margin), (b[1].0 - margin, b[1].1 + margin)]
}

/// Shortens `g0` within its free homotopy class while checking that every iterate
/// meets the closure of `U`. The first iterate that does not is reported with its
/// homotopy chain as a witness that the class reaches the complement.
pub fn minimize_in_class<T: Real>(
    region: &ConcaveRegion<T>,
    g0: &DiscreteLoop<T>,
    params: &BirkhoffParams<T>,
    stop: &StopRule,
) -> Result<ClassMinimization<T>, DomainError> {
    let m = region.manifold();
    let mut bad = Vec::new();
    let (alpha4, rho2) = (region.alpha / T::lit(4.0), region.rho * T::half());
    if params.radius >= alpha4 {
        bad.push(ParamViolation::RadiusVsRegionAlpha { radius: params.radius.as_f64(), bound: alpha4.as_f64() });
    }
    if params.radius >= rho2 {
        bad.push(ParamViolation::RadiusVsRegionRho { radius: params.radius.as_f64(), bound: rho2.as_f64() });
    }
    if !bad.is_empty() {
        return Err(FlowError::InvalidParams(bad).into());
    }
    let audit = audit_delta_convexity(region, region.rho, AUDIT_SAMPLES, AUDIT_SEED);

    // working region: the 2 lambda neighbourhood of U together with the initial box
    let grow = region.alpha;
    let bbox = chart_box(&g0.trace(m, 8), grow);
    let reach = T::two() * region.lambda_cap;
    let in_box = |p: Point<T>| {
        (0..2).all(|k| m.periods[k].is_some() || (p[k] >= bbox[k].0 && p[k] <= bbox[k].1))
    };
    let inside_w = |p: Point<T>| in_box(p) || region.signed_distance(p) < reach;

    let mut trapping = Vec::new();
    let mut witness: Option<HomotopyWitness<T>> = None;
    let mut chain: Vec<Vec<Point<T>>> = Vec::new();
    let mut prev: Option<DiscreteLoop<T>> = None;
    let mut escaped_at = None;
    let mut phi_err = None;
    let mut observe = |i: usize, g: &DiscreteLoop<T>| {
        let pts = g.trace(m, 8);
        if !pts.iter().all(|&p| inside_w(p)) {
            escaped_at = Some(i);
            return true;
        }
        let meets = region.meets_closure(g);
        trapping.push(meets);
        if witness.is_none() {
            if let Some(p) = &prev {
                match homotopy_phi(m, p, T::half(), params) {
                    Ok(mid) => chain.push(mid.breakpoints().to_vec()),
                    Err(e) => phi_err = Some(e),
                }
            }
            chain.push(g.breakpoints().to_vec());
            if !meets {
                witness = Some(HomotopyWitness { iteration: i, chain: std::mem::take(&mut chain) });
            } else {
                prev = Some(g.clone());
            }
        }
        false
    };
    let flow = iterate_flow_observed(m, g0, params, stop, &mut observe)?;
    if let Some(e) = phi_err {
        return Err(e.into());
    }
    if let Some(iteration) = escaped_at {
        return Err(DomainError::Escape { iteration });
    }
    let trapped_throughout = trapping.iter().all(|&b| b);
    let collar_length = collar_length(region, &flow.loop_);
    Ok(ClassMinimization { flow, trapping, trapped_throughout, witness, audit, collar_length })
}

/// Termination thresholds of [`minmax_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepStop {
    /// Width decrement threshold relative to the initial width.
    pub relative_decrement: f64,
    /// Residual threshold on the widest member.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Width below which the family counts as collapsed; `None` uses the point threshold.
    pub collapse_width: Option<f64>,
}

impl Default for SweepStop {
    fn default() -> Self {
        Self { relative_decrement: 1e-9, residual_tol: 1e-3, max_iter: 500, collapse_width: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepStatus {
    /// Width stalled at a near-geodesic widest member.
    Converged,
    /// Width fell below the collapse threshold.
    Collapsed,
    MaxIterations,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult<T: Real> {
    pub status: SweepStatus,
    pub iterations: usize,
    pub width: T,
    pub width_trace: Vec<T>,
    /// Whether `w_{j+1} <= w_j + 1e-8` held at every step.
    pub monotone: bool,
    pub critical_index: usize,
    pub critical_residual: T,
    pub critical_loop: DiscreteLoop<T>,
    pub safety_violations: Vec<SafetyViolation>,
    pub family: LoopFamily<T>,
}

fn widest<T: Real>(f: &LoopFamily<T>) -> (usize, T) {
    f.lengths()
        .into_iter()
        .enumerate()
        .fold((0, -T::infinity()), |best, (k, l)| if l > best.1 { (k, l) } else { best })
}

/// Min-max over a one-parameter sweepout: flows the family (cut off near `region`
/// when given, otherwise every member) and tracks the width `max_v l(F(v))`.
pub fn minmax_sweep<T: Real>(
    m: &crate::geometry::ChartManifold<T>,
    region: Option<&ConcaveRegion<T>>,
    family: &LoopFamily<T>,
    params: &BirkhoffParams<T>,
    stop: &SweepStop,
) -> Result<SweepResult<T>, DomainError> {
    if family.is_empty() {
        return Err(DomainError::Configuration("empty family".into()));
    }
    let collapse = stop.collapse_width.map_or(T::lit(1e-4) * m.conv_bound(), T::lit);
    let mut cur = family.clone();
    let (_, w0) = widest(&cur);
    let mut trace = vec![w0];
    let mut safety = Vec::new();
    let mut monotone = true;
    let slack = T::lit(1e-8);
    let mut status = SweepStatus::MaxIterations;
    let mut iterations = stop.max_iter;
    if w0 < collapse {
        status = SweepStatus::Collapsed;
        iterations = 0;
    }
    for j in 1..=stop.max_iter {
        if status != SweepStatus::MaxIterations {
            break;
        }
        cur = match region {
            Some(r) => {
                let (next, rec) = family_flow_step(&cur, r, params, j)?;
                safety.extend(rec.violations);
                next
            }
            None => {
                let next = par_map(cur.len(), |k| {
                    let g = &cur.members[k];
                    if g.is_point_loop(m) {
                        Ok(g.clone())
                    } else {
                        birkhoff_step(m, g, params)
                    }
                });
                LoopFamily { members: next.into_iter().collect::<Result<Vec<_>, _>>()?, boundary: cur.boundary }
            }
        };
        let (k, w) = widest(&cur);
        let prev = *trace.last().expect("trace");
        monotone &= w <= prev + slack;
        trace.push(w);
        if w < collapse {
            status = SweepStatus::Collapsed;
            iterations = j;
        } else if (prev - w).abs() <= T::lit(stop.relative_decrement) * w0
            && geodesic_residual(m, &cur.members[k]) <= T::lit(stop.residual_tol)
        {
            status = SweepStatus::Converged;
            iterations = j;
        }
    }
    let (k, w) = widest(&cur);
    Ok(SweepResult {
        status,
        iterations,
        width: w,
        width_trace: trace,
        monotone,
        critical_index: k,
        critical_residual: geodesic_residual(m, &cur.members[k]),
        critical_loop: cur.members[k].clone(),
        safety_violations: safety,
        family: cur,
    })
}
