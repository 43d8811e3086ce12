use serde::Serialize;

use super::region::ConcaveRegion;
use crate::error::{DomainError, FlowError};
use crate::flow::{birkhoff_step, homotopy_phi, BirkhoffParams};
use crate::geometry::geodesic::convex_segment;
use crate::geometry::ChartManifold;
use crate::loops::{loop_length, loop_metric, restricted_length, DiscreteLoop};
use crate::par::par_map;
use crate::scalar::Real;

/// `Theta(g, t)`: every breakpoint moves the fraction `t` of the way to `g(0)` along
/// the minimizing segment. Needs `l(g) < conv`.
pub fn contract_loop<T: Real>(m: &ChartManifold<T>, g: &DiscreteLoop<T>, t: T) -> Result<DiscreteLoop<T>, DomainError> {
    let len = loop_length(g);
    let bound = m.conv_bound();
    if len >= bound {
        return Err(DomainError::ContractionRefused { length: len.as_f64(), bound: bound.as_f64() });
    }
    let t = t.max(T::zero()).min(T::one());
    if t == T::zero() {
        return Ok(g.clone());
    }
    let base = g.breakpoints()[0];
    let mut pts = Vec::with_capacity(g.len());
    for &p in g.breakpoints() {
        pts.push(if t == T::one() || p == base {
            base
        } else {
            m.wrap(convex_segment(m, p, base)?.point_at(m, t))
        });
    }
    Ok(DiscreteLoop::with_params(m, &pts, g.params().to_vec())?)
}

/// One-parameter family over the uniform grid `v_k = k / (n - 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct LoopFamily<T: Real> {
    pub members: Vec<DiscreteLoop<T>>,
    /// Nodes on the boundary of the parameter interval.
    pub boundary: Vec<bool>,
}

impl<T: Real> LoopFamily<T> {
    /// Family whose two end members are boundary nodes.
    pub fn sweepout(members: Vec<DiscreteLoop<T>>) -> Self {
        let n = members.len();
        let boundary = (0..n).map(|k| k == 0 || k + 1 == n).collect();
        Self { members, boundary }
    }

    /// Family without boundary nodes.
    pub fn open(members: Vec<DiscreteLoop<T>>) -> Self {
        let boundary = vec![false; members.len()];
        Self { members, boundary }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn node(&self, k: usize) -> T {
        if self.len() < 2 {
            return T::zero();
        }
        T::from_usize_lossy(k) / T::from_usize_lossy(self.len() - 1)
    }

    pub fn lengths(&self) -> Vec<T> {
        self.members.iter().map(loop_length).collect()
    }

    /// Largest member length.
    pub fn width(&self) -> T {
        self.lengths().into_iter().fold(T::zero(), T::max)
    }

    /// Largest loop distance between neighbouring members.
    pub fn continuity_modulus(&self, m: &ChartManifold<T>) -> Result<T, DomainError> {
        let mut worst = T::zero();
        for w in self.members.windows(2) {
            worst = worst.max(loop_metric(m, &w[0], &w[1])?);
        }
        Ok(worst)
    }

    /// Whether every boundary member avoids `U`.
    pub fn boundary_avoids(&self, region: &ConcaveRegion<T>) -> bool {
        self.members.iter().zip(&self.boundary).all(|(g, &b)| !b || region.min_distance(g) >= T::zero())
    }
}

/// A property of the family step that failed on some node.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SafetyViolation {
    /// A boundary member meets `U` after the step.
    BoundaryMeetsRegion { node: usize },
    /// The input avoided `U` but the output meets it.
    EnteredRegion { node: usize },
    /// The output meets `U` with length above the cap.
    OverLengthCap { node: usize, length: f64 },
}

/// Cutoff sets, cutoff values and checks of one family step.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyStepRecord<T> {
    pub step: usize,
    /// Nodes whose image leaves the `2 lambda` neighbourhood of `U`, plus boundary nodes.
    pub far: Vec<bool>,
    /// Nodes whose image meets the closure of `U`.
    pub near: Vec<bool>,
    pub chi: Vec<T>,
    pub lengths_before: Vec<T>,
    pub lengths_after: Vec<T>,
    pub violations: Vec<SafetyViolation>,
}

/// Graph distance on the node line from each node to the nearest flagged node.
fn line_distance(flags: &[bool]) -> Vec<Option<usize>> {
    let n = flags.len();
    (0..n)
        .map(|k| (0..n).filter(|&j| flags[j]).map(|j| k.abs_diff(j)).min())
        .collect()
}

/// Cutoff `chi = d0 / (d0 + d1)` on node distances: 0 on the far set, 1 on the near
/// set. With no near node the step is the identity; with no far node it is a full step.
pub fn cutoff<T: Real>(far: &[bool], near: &[bool]) -> Vec<T> {
    let d0 = line_distance(far);
    let d1 = line_distance(near);
    d0.iter()
        .zip(&d1)
        .map(|(a, b)| match (a, b) {
            (_, None) => T::zero(),
            (None, Some(_)) => T::one(),
            (Some(a), Some(b)) => {
                let (a, b) = (T::from_usize_lossy(*a), T::from_usize_lossy(*b));
                (a / (a + b)).max(T::zero()).min(T::one())
            }
        })
        .collect()
}

/// One step of the cut-off family flow: member `v` becomes `Phi(F(v), chi(v))`.
pub fn family_flow_step<T: Real>(
    family: &LoopFamily<T>,
    region: &ConcaveRegion<T>,
    params: &BirkhoffParams<T>,
    step: usize,
) -> Result<(LoopFamily<T>, FamilyStepRecord<T>), DomainError> {
    let m = region.manifold();
    let n = family.len();
    let two_lambda = T::two() * region.lambda_cap;
    let extent: Vec<(T, T)> = par_map(n, |k| {
        let pts = family.members[k].trace(m, 8);
        pts.iter().map(|&p| region.signed_distance(p)).fold((T::infinity(), -T::infinity()), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        })
    });
    let far: Vec<bool> = (0..n).map(|k| family.boundary[k] || extent[k].1 >= two_lambda).collect();
    let near: Vec<bool> = extent.iter().map(|e| e.0 <= region.closure_eps).collect();
    if let Some(k) = (0..n).find(|&k| far[k] && near[k]) {
        return Err(DomainError::Configuration(format!(
            "member {k} both meets the region and leaves its 2 lambda neighbourhood (or is a boundary node); \
             the length cap {} is too small for this family",
            region.lambda_cap
        )));
    }
    let chi = cutoff::<T>(&far, &near);
    let next: Vec<Result<DiscreteLoop<T>, FlowError>> = par_map(n, |k| {
        let g = &family.members[k];
        if chi[k] == T::zero() || g.is_point_loop(m) {
            Ok(g.clone())
        } else if chi[k] == T::one() {
            birkhoff_step(m, g, params)
        } else {
            homotopy_phi(m, g, chi[k], params)
        }
    });
    let members = next.into_iter().collect::<Result<Vec<_>, _>>()?;
    let out = LoopFamily { members, boundary: family.boundary.clone() };
    let lengths_before = family.lengths();
    let lengths_after = out.lengths();
    let mut violations = Vec::new();
    for k in 0..n {
        let after = region.min_distance(&out.members[k]);
        let meets = after < T::zero();
        if family.boundary[k] && meets {
            violations.push(SafetyViolation::BoundaryMeetsRegion { node: k });
        }
        if meets && extent[k].0 >= T::zero() {
            violations.push(SafetyViolation::EnteredRegion { node: k });
        }
        if meets && lengths_after[k] > region.lambda_cap {
            violations.push(SafetyViolation::OverLengthCap { node: k, length: lengths_after[k].as_f64() });
        }
    }
    let record = FamilyStepRecord { step, far, near, chi, lengths_before, lengths_after, violations };
    Ok((out, record))
}

/// Restricted length `l(g, closure U(eta))`.
pub fn collar_length<T: Real>(region: &ConcaveRegion<T>, g: &DiscreteLoop<T>) -> T {
    let eta = region.eta;
    restricted_length(region.manifold(), g, |p| region.signed_distance(p) <= eta)
}

/// Smallest single-step decrement over the sample loops with `l <= lambda` and
/// `l(., closure U(eta)) >= eta`, floored at `1e-6`.
pub fn measure_zeta<T: Real>(
    region: &ConcaveRegion<T>,
    samples: &[DiscreteLoop<T>],
    params: &BirkhoffParams<T>,
) -> Result<T, DomainError> {
    let m = region.manifold();
    let floor = T::lit(1e-6);
    let mut zeta = T::infinity();
    for g in samples {
        let len = loop_length(g);
        if len > region.lambda_cap || collar_length(region, g) < region.eta {
            continue;
        }
        let next = birkhoff_step(m, g, params)?;
        zeta = zeta.min(len - loop_length(&next));
    }
    Ok(if zeta.is_finite() { zeta.max(floor) } else { floor })
}

/// Which alternative of the dichotomy a member satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// Image avoids `U`.
    AvoidsRegion,
    /// Image inside `U(eta)` with length below `eta`.
    ShortInsideCollar,
    /// Neither: a geodesic candidate.
    Neither,
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberOutcome<T> {
    pub node: usize,
    pub alternative: Alternative,
    pub length: T,
    pub collar_length: T,
    pub min_distance: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport<T: Real> {
    pub zeta: T,
    /// `Q = ceil(lambda / zeta) + 1`.
    pub q_steps: usize,
    pub steps_run: usize,
    /// Set when `Q` exceeded the step cap.
    pub truncated: bool,
    pub outcomes: Vec<MemberOutcome<T>>,
    pub candidates: Vec<usize>,
    pub safety_violations: Vec<SafetyViolation>,
    pub family: LoopFamily<T>,
}

pub fn classify_member<T: Real>(region: &ConcaveRegion<T>, node: usize, g: &DiscreteLoop<T>) -> MemberOutcome<T> {
    let pts = g.trace(region.manifold(), 8);
    let (lo, hi) = pts.iter().map(|&p| region.signed_distance(p)).fold((T::infinity(), -T::infinity()), |(lo, hi), d| {
        (lo.min(d), hi.max(d))
    });
    let length = loop_length(g);
    let alternative = if lo >= T::zero() {
        Alternative::AvoidsRegion
    } else if hi < region.eta && length < region.eta {
        Alternative::ShortInsideCollar
    } else {
        Alternative::Neither
    };
    MemberOutcome { node, alternative, length, collar_length: collar_length(region, g), min_distance: lo }
}

/// Runs `Q = ceil(lambda / zeta) + 1` family steps (at most `max_steps`) and sorts
/// every member into the two alternatives; members in neither are reported.
pub fn dichotomy_drive<T: Real>(
    family: &LoopFamily<T>,
    region: &ConcaveRegion<T>,
    params: &BirkhoffParams<T>,
    zeta: T,
    max_steps: Option<usize>,
) -> Result<DichotomyReport<T>, DomainError> {
    if !(zeta > T::zero()) {
        return Err(DomainError::Configuration(format!("decrement {zeta} must be positive")));
    }
    let q = (region.lambda_cap / zeta).ceil().to_usize().unwrap_or(usize::MAX).saturating_add(1);
    let steps = max_steps.map_or(q, |c| c.min(q));
    let mut cur = family.clone();
    let mut safety = Vec::new();
    for j in 1..=steps {
        let (next, rec) = family_flow_step(&cur, region, params, j)?;
        safety.extend(rec.violations);
        cur = next;
    }
    let outcomes: Vec<MemberOutcome<T>> =
        cur.members.iter().enumerate().map(|(k, g)| classify_member(region, k, g)).collect();
    let candidates = outcomes.iter().filter(|o| o.alternative == Alternative::Neither).map(|o| o.node).collect();
    Ok(DichotomyReport {
        zeta,
        q_steps: q,
        steps_run: steps,
        truncated: steps < q,
        outcomes,
        candidates,
        safety_violations: safety,
        family: cur,
    })
}
