use serde::Serialize;

use super::params::BirkhoffParams;
use super::step::{birkhoff_step, corner_angle};
use crate::error::FlowError;
use crate::geometry::ChartManifold;
use crate::loops::{loop_length, DiscreteLoop};
use crate::scalar::{Point, Real};

/// Termination thresholds of [`iterate_flow`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRule {
    /// Per-step decrement threshold, relative to the initial length.
    pub relative_decrement: f64,
    /// Geodesic residual threshold (radians plus relative speed spread).
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { relative_decrement: 1e-7, residual_tol: 1e-4, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    ConvergedGeodesic,
    PointLoop,
    EscapedRegion,
    MaxIterations,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowResult<T: Real> {
    pub classification: Classification,
    pub iterations: usize,
    pub final_length: T,
    pub residual: T,
    pub length_trace: Vec<T>,
    #[serde(rename = "final_loop")]
    pub loop_: DiscreteLoop<T>,
}

/// Largest turning angle at a breakpoint plus the relative spread of segment speeds.
/// Vanishes exactly on closed geodesics at the loop's resolution.
pub fn geodesic_residual<T: Real>(m: &ChartManifold<T>, g: &DiscreteLoop<T>) -> T {
    let n = g.len();
    let mut angle = T::zero();
    for j in 0..n {
        angle = angle.max(corner_angle(m, g, j));
    }
    let speeds: Vec<T> = (0..n).map(|i| g.segments()[i].length / g.span(i)).collect();
    let (lo, hi) = speeds.iter().fold((T::infinity(), T::zero()), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let mean = loop_length(g);
    let spread = if mean > T::zero() { (hi - lo) / mean } else { T::zero() };
    angle + spread
}

/// Breakpoints and segment midpoints.
fn touches<T: Real>(m: &ChartManifold<T>, g: &DiscreteLoop<T>, inside: &dyn Fn(Point<T>) -> bool) -> bool {
    g.segments().iter().any(|s| inside(s.start) || inside(s.point_at(m, T::half())))
}

/// Iterates the shortening map until the decrement and residual are both small
/// (`ConvergedGeodesic`), the loop shrinks below the point threshold (`PointLoop`), the
/// image meets `escape` (`EscapedRegion`) or `max_iter` steps were taken.
pub fn iterate_flow<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    p: &BirkhoffParams<T>,
    stop: &StopRule,
    escape: Option<&dyn Fn(Point<T>) -> bool>,
) -> Result<FlowResult<T>, FlowError> {
    let mut observe = |_: usize, cur: &DiscreteLoop<T>| escape.is_some_and(|esc| touches(m, cur, esc));
    iterate_flow_observed(m, g, p, stop, &mut observe)
}

/// [`iterate_flow`] with a callback on every iterate, the initial loop included (index
/// 0). The callback returns `true` to stop with `EscapedRegion`.
pub fn iterate_flow_observed<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    p: &BirkhoffParams<T>,
    stop: &StopRule,
    observe: &mut dyn FnMut(usize, &DiscreteLoop<T>) -> bool,
) -> Result<FlowResult<T>, FlowError> {
    let l0 = loop_length(g);
    let delta = T::lit(stop.relative_decrement) * l0;
    let tol = T::lit(stop.residual_tol);
    let point = T::lit(1e-4) * m.conv_bound();
    let mut cur = g.clone();
    let mut trace = vec![l0];
    let finish = |cur: DiscreteLoop<T>, trace: Vec<T>, class, it| {
        let residual = geodesic_residual(m, &cur);
        FlowResult {
            classification: class,
            iterations: it,
            final_length: *trace.last().expect("trace"),
            residual,
            length_trace: trace,
            loop_: cur,
        }
    };
    if observe(0, &cur) {
        return Ok(finish(cur, trace, Classification::EscapedRegion, 0));
    }
    if l0 < point {
        return Ok(finish(cur, trace, Classification::PointLoop, 0));
    }
    for it in 1..=stop.max_iter {
        let next = birkhoff_step(m, &cur, p)?;
        let len = loop_length(&next);
        let prev = *trace.last().expect("trace");
        trace.push(len);
        cur = next;
        if observe(it, &cur) {
            return Ok(finish(cur, trace, Classification::EscapedRegion, it));
        }
        if len < point {
            return Ok(finish(cur, trace, Classification::PointLoop, it));
        }
        if prev - len < delta && geodesic_residual(m, &cur) < tol {
            return Ok(finish(cur, trace, Classification::ConvergedGeodesic, it));
        }
    }
    Ok(finish(cur, trace, Classification::MaxIterations, stop.max_iter))
}
