//! Piecewise geodesic loops: length, energy, the length measure and a loop metric.
//!
//! A [`DiscreteLoop`] is a cyclic list of breakpoints `b_i` attached to strictly
//! increasing parameters `x_i in [0, 1)` with `x_0 = 0`. Between consecutive
//! breakpoints the loop runs along the cached minimizing segment at constant speed.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{GeometryError, LoopError};
use crate::geometry::geodesic::convex_segment;
use crate::geometry::{distance, ChartManifold, GeodesicSegment, GeodesicState};
use crate::scalar::{Point, Real};

/// Midpoint cells per segment used by [`restricted_length`].
const CELLS: usize = 32;
/// Bisection levels for cells straddling an indicator boundary.
const REFINE_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLoop<T> {
    breakpoints: Vec<Point<T>>,
    params: Vec<T>,
    segments: Vec<GeodesicSegment<T>>,
}

impl<T: Real> Serialize for DiscreteLoop<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DiscreteLoop", 2)?;
        st.serialize_field("breakpoints", &self.breakpoints)?;
        st.serialize_field("params", &self.params)?;
        st.end()
    }
}

fn uniform<T: Real>(n: usize) -> Vec<T> {
    (0..n).map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(n)).collect()
}

impl<T: Real> DiscreteLoop<T> {
    /// Loop through `points` at uniform parameters, joined by minimizing segments
    /// inside the convexity radius.
    pub fn from_points(m: &ChartManifold<T>, points: &[Point<T>]) -> Result<Self, LoopError> {
        Self::with_params(m, points, uniform(points.len()))
    }

    /// Loop through `points` at the given parameters.
    pub fn with_params(m: &ChartManifold<T>, points: &[Point<T>], params: Vec<T>) -> Result<Self, LoopError> {
        if points.is_empty() {
            return Err(LoopError::Empty);
        }
        check_params(&params, points.len())?;
        let n = points.len();
        let breakpoints: Vec<_> = points.iter().map(|&p| m.wrap(p)).collect();
        let mut segments = Vec::with_capacity(n);
        for i in 0..n {
            let seg = convex_segment(m, breakpoints[i], breakpoints[(i + 1) % n]).map_err(|e| match e {
                GeometryError::NoUniqueGeodesic(_) => LoopError::RefinementNeeded { index: i },
                e => LoopError::Geometry(e),
            })?;
            segments.push(seg);
        }
        Ok(Self { breakpoints, params, segments })
    }

    /// The constant loop at `p` with `n` breakpoints.
    pub fn constant(p: Point<T>, n: usize) -> Self {
        let n = n.max(1);
        Self { breakpoints: vec![p; n], params: uniform(n), segments: vec![GeodesicSegment::constant(p); n] }
    }

    /// Assembles a loop from solved segments; segment `i` must start at breakpoint `i`
    /// and end at breakpoint `i + 1`.
    pub(crate) fn from_segments(params: Vec<T>, segments: Vec<GeodesicSegment<T>>) -> Self {
        debug_assert_eq!(params.len(), segments.len());
        let breakpoints = segments.iter().map(|s| s.start).collect();
        Self { breakpoints, params, segments }
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn breakpoints(&self) -> &[Point<T>] {
        &self.breakpoints
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn segments(&self) -> &[GeodesicSegment<T>] {
        &self.segments
    }

    /// Parameter width of segment `i`.
    pub fn span(&self, i: usize) -> T {
        let next = if i + 1 == self.params.len() { T::one() } else { self.params[i + 1] };
        next - self.params[i]
    }

    /// True when the parameters are the uniform grid `i / n`.
    pub fn is_uniform(&self) -> bool {
        let n = T::from_usize_lossy(self.len());
        let tol = T::lit(1e-12);
        self.params.iter().enumerate().all(|(i, &x)| (x * n - T::from_usize_lossy(i)).abs() <= tol)
    }

    /// Segment index and local parameter for the loop parameter `x` (taken mod 1).
    pub fn locate(&self, x: T) -> (usize, T) {
        let x = x - x.floor();
        let i = match self.params.binary_search_by(|p| p.partial_cmp(&x).expect("finite parameter")) {
            Ok(i) => return (i, T::zero()),
            Err(i) => i - 1,
        };
        let t = (x - self.params[i]) / self.span(i);
        (i, t.min(T::one()))
    }

    /// Unwrapped position and loop-parameter velocity at `x`.
    pub fn state_at(&self, m: &ChartManifold<T>, x: T) -> GeodesicState<T> {
        let (i, t) = self.locate(x);
        let seg = &self.segments[i];
        let s = if t == T::zero() {
            GeodesicState { x: seg.start, v: seg.initial_velocity.components }
        } else {
            seg.state_at(m, t)
        };
        let w = self.span(i);
        GeodesicState { x: s.x, v: [s.v[0] / w, s.v[1] / w] }
    }

    pub fn point_at(&self, m: &ChartManifold<T>, x: T) -> Point<T> {
        let (i, t) = self.locate(x);
        if t == T::zero() {
            return self.breakpoints[i];
        }
        self.segments[i].point_at(m, t)
    }

    /// Metric speed at `x`, constant along each segment.
    pub fn speed_at(&self, x: T) -> T {
        let (i, _) = self.locate(x);
        self.segments[i].length / self.span(i)
    }

    /// The same loop started at breakpoint `k`, parameters shifted so the new origin is zero.
    pub fn rotate(&self, k: usize) -> Self {
        let n = self.len();
        let k = k % n;
        let shift = self.params[k];
        let idx = (0..n).map(|j| (j + k) % n);
        let params = idx
            .clone()
            .map(|j| {
                let x = self.params[j] - shift;
                if x < T::zero() {
                    x + T::one()
                } else {
                    x
                }
            })
            .collect();
        Self {
            breakpoints: idx.clone().map(|j| self.breakpoints[j]).collect(),
            params,
            segments: idx.map(|j| self.segments[j].clone()).collect(),
        }
    }

    /// Largest segment length.
    pub fn max_gap(&self) -> T {
        self.segments.iter().fold(T::zero(), |a, s| a.max(s.length))
    }

    /// Loops shorter than `1e-4 * conv_bound` stand in for constant loops.
    pub fn is_point_loop(&self, m: &ChartManifold<T>) -> bool {
        loop_length(self) < T::lit(1e-4) * m.conv_bound()
    }

    /// `per_segment` points along each segment, for plotting.
    pub fn trace(&self, m: &ChartManifold<T>, per_segment: usize) -> Vec<Point<T>> {
        let mut out = Vec::with_capacity(self.len() * per_segment);
        for seg in &self.segments {
            let pts = seg.sample(m, per_segment);
            out.extend_from_slice(&pts[..per_segment]);
        }
        out
    }
}

fn check_params<T: Real>(params: &[T], n: usize) -> Result<(), LoopError> {
    if params.len() != n || params[0] != T::zero() {
        return Err(LoopError::BadParameters);
    }
    if params.windows(2).any(|w| w[1] <= w[0]) || params[n - 1] >= T::one() {
        return Err(LoopError::BadParameters);
    }
    Ok(())
}

/// Sum of segment lengths.
pub fn loop_length<T: Real>(g: &DiscreteLoop<T>) -> T {
    g.segments.iter().fold(T::zero(), |a, s| a + s.length)
}

/// Energy `sum len_i^2 / dx_i` of the loop's own parametrization; equals the squared
/// length exactly when the speed is constant.
pub fn loop_energy<T: Real>(g: &DiscreteLoop<T>) -> T {
    (0..g.len()).fold(T::zero(), |a, i| {
        let l = g.segments[i].length;
        a + l * l / g.span(i)
    })
}

/// Joins consecutive samples by minimizing segments. Every gap must be at most
/// `conv_bound / 2` and, when given, `rho / 2`.
pub fn discretize<T: Real>(
    m: &ChartManifold<T>,
    samples: &[Point<T>],
    rho: Option<T>,
) -> Result<DiscreteLoop<T>, LoopError> {
    if samples.is_empty() {
        return Err(LoopError::Empty);
    }
    let mut limit = m.conv_bound() * T::half();
    if let Some(r) = rho {
        limit = limit.min(r * T::half());
    }
    let n = samples.len();
    for i in 0..n {
        // cheap rejection before shooting
        if m.chart_distance(samples[i], samples[(i + 1) % n]) > limit * T::two() {
            return Err(LoopError::RefinementNeeded { index: i });
        }
    }
    let g = DiscreteLoop::from_points(m, samples)?;
    let slack = limit * (T::one() + T::lit(1e-9));
    if let Some(i) = g.segments.iter().position(|s| s.length > slack) {
        return Err(LoopError::RefinementNeeded { index: i });
    }
    Ok(g)
}

/// Cell `[a, b]` of a segment in `[0, 1]`, counted in or out by sampling its ends
/// and midpoint; mixed cells are bisected.
fn cell_measure<T: Real, F: Fn(Point<T>) -> bool>(
    m: &ChartManifold<T>,
    seg: &GeodesicSegment<T>,
    inside: &F,
    a: (T, bool),
    b: (T, bool),
    level: usize,
) -> T {
    let mid = (a.0 + b.0) * T::half();
    let im = inside(seg.point_at(m, mid));
    if (a.1 == im && b.1 == im) || level == REFINE_LEVELS {
        return if im { b.0 - a.0 } else { T::zero() };
    }
    cell_measure(m, seg, inside, a, (mid, im), level + 1) + cell_measure(m, seg, inside, (mid, im), b, level + 1)
}

/// `mu_gamma(B)`: length of the part of the loop inside the set with indicator `inside`.
pub fn restricted_length<T: Real, F: Fn(Point<T>) -> bool>(m: &ChartManifold<T>, g: &DiscreteLoop<T>, inside: F) -> T {
    LoopMeasure::new(g).measure_of(m, inside)
}

/// The length measure of a loop: each segment carries its length as weight.
#[derive(Debug, Clone)]
pub struct LoopMeasure<'a, T> {
    pub pieces: Vec<(&'a GeodesicSegment<T>, T)>,
}

impl<'a, T: Real> LoopMeasure<'a, T> {
    pub fn new(g: &'a DiscreteLoop<T>) -> Self {
        Self { pieces: g.segments.iter().map(|s| (s, s.length)).collect() }
    }

    /// Total mass, the loop length.
    pub fn total(&self) -> T {
        self.pieces.iter().fold(T::zero(), |a, p| a + p.1)
    }

    pub fn measure_of<F: Fn(Point<T>) -> bool>(&self, m: &ChartManifold<T>, inside: F) -> T {
        let mut total = T::zero();
        let h = T::one() / T::from_usize_lossy(CELLS);
        for &(seg, w) in &self.pieces {
            if w == T::zero() {
                continue;
            }
            let pts = seg.sample(m, CELLS);
            let flags: Vec<bool> = pts.iter().map(|&p| inside(p)).collect();
            let mut frac = T::zero();
            for c in 0..CELLS {
                let a = T::from_usize_lossy(c) * h;
                frac = frac + cell_measure(m, seg, &inside, (a, flags[c]), (a + h, flags[c + 1]), 0);
            }
            total = total + w * frac;
        }
        total
    }

    /// `int phi d mu`, midpoint rule with [`CELLS`] nodes per segment.
    pub fn integrate<F: Fn(Point<T>) -> T>(&self, m: &ChartManifold<T>, phi: F) -> T {
        let mut total = T::zero();
        let n = T::from_usize_lossy(CELLS);
        for &(seg, w) in &self.pieces {
            if w == T::zero() {
                continue;
            }
            let mut s = T::zero();
            for c in 0..CELLS {
                s = s + phi(seg.point_at(m, (T::from_usize_lossy(c) + T::half()) / n));
            }
            total = total + w * s / n;
        }
        total
    }
}

/// Manifold distance, falling back to the chart estimate beyond the search horizon.
pub(crate) fn pointwise_distance<T: Real>(m: &ChartManifold<T>, p: Point<T>, q: Point<T>) -> T {
    distance(m, p, q).unwrap_or_else(|_| m.chart_distance(p, q))
}

/// Sorted union of both parameter grids, the second shifted by `-shift`, closed by 1.
fn merged_nodes<T: Real>(a: &[T], b: &[T], shift: T) -> Vec<T> {
    let mut nodes: Vec<T> = a.to_vec();
    for &x in b {
        let y = x - shift;
        nodes.push(y - y.floor());
    }
    nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite parameter"));
    let tol = T::lit(1e-13);
    nodes.dedup_by(|x, y| (*x - *y).abs() <= tol);
    if nodes[0] > tol {
        nodes.insert(0, T::zero());
    }
    if T::one() - *nodes.last().expect("nodes") <= tol {
        nodes.pop();
    }
    nodes.push(T::one());
    nodes
}

/// `(sup distance, L2 velocity gap)` with `g2` read at `x + shift`.
fn aligned_gap<T: Real>(m: &ChartManifold<T>, g1: &DiscreteLoop<T>, g2: &DiscreteLoop<T>, shift: T) -> (T, T) {
    let nodes = merged_nodes(&g1.params, &g2.params, shift);
    let mut sup = T::zero();
    let mut l2 = T::zero();
    const SUB: usize = 4;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        sup = sup.max(pointwise_distance(m, g1.point_at(m, a), g2.point_at(m, a + shift)));
        let h = (b - a) / T::from_usize_lossy(SUB);
        for j in 0..SUB {
            let x = a + h * (T::from_usize_lossy(j) + T::half());
            let s1 = g1.state_at(m, x);
            let s2 = g2.state_at(m, x + shift);
            if j == SUB / 2 {
                sup = sup.max(pointwise_distance(m, m.wrap(s1.x), m.wrap(s2.x)));
            }
            let n = m.norm_at(m.wrap(s1.x), [s1.v[0] - s2.v[0], s1.v[1] - s2.v[1]]);
            l2 = l2 + h * n * n;
        }
    }
    (sup, l2.sqrt())
}

/// Loop metric: minimum over cyclic offsets of the sup pointwise distance at matched
/// parameters plus the L2 gap of the parameter velocities.
pub fn loop_metric<T: Real>(m: &ChartManifold<T>, g1: &DiscreteLoop<T>, g2: &DiscreteLoop<T>) -> Result<T, LoopError> {
    if g1.len() != g2.len() {
        return Err(LoopError::ResampleNeeded { left: g1.len(), right: g2.len() });
    }
    // rank offsets by a chart-level estimate at the breakpoints of g1
    let mut ranked: Vec<(T, T)> = g2
        .params
        .iter()
        .map(|&shift| {
            let score = g1.params.iter().zip(&g1.breakpoints).fold(T::zero(), |acc, (&x, &p)| {
                acc.max(m.chart_distance(p, g2.point_at(m, x + shift)))
            });
            (score, shift)
        })
        .collect();
    ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite score"));
    let mut best = T::infinity();
    for &(_, shift) in ranked.iter().take(3) {
        let (sup, l2) = aligned_gap(m, g1, g2, shift);
        best = best.min(sup + l2);
    }
    Ok(best)
}

/// A test function with declared bounds `|phi| <= sup_norm` and
/// `|phi(p) - phi(q)| <= lipschitz * d(p, q)`.
pub struct TestFunction<F> {
    pub f: F,
    pub sup_norm: f64,
    pub lipschitz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ContinuityGap {
    /// `|int phi d mu_inf - int phi d mu_i|`.
    pub lhs: f64,
    /// `eps * l(gamma_inf) + delta * |phi|`.
    pub rhs: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub holds: bool,
}

/// Compares the integrals of a test function against two aligned loops with the
/// bound `eps * l(gamma_inf) + delta * |phi|`, where `eps` is the Lipschitz constant
/// times the sup pointwise distance and `delta` the L2 gap of the speeds. Both sides
/// use the same quadrature nodes.
pub fn measure_continuity_gap<T: Real, F: Fn(Point<T>) -> T>(
    m: &ChartManifold<T>,
    g_inf: &DiscreteLoop<T>,
    g_i: &DiscreteLoop<T>,
    phi: &TestFunction<F>,
) -> ContinuityGap {
    const SUB: usize = 8;
    let nodes = merged_nodes(&g_inf.params, &g_i.params, T::zero());
    let (mut int_inf, mut int_i) = (0.0f64, 0.0f64);
    let (mut sup_d, mut gap2, mut len) = (0.0f64, 0.0f64, 0.0f64);
    for w in nodes.windows(2) {
        let h = (w[1] - w[0]) / T::from_usize_lossy(SUB);
        for j in 0..SUB {
            let x = w[0] + h * (T::from_usize_lossy(j) + T::half());
            let (p, q) = (g_inf.point_at(m, x), g_i.point_at(m, x));
            let (s_inf, s_i) = (g_inf.speed_at(x).as_f64(), g_i.speed_at(x).as_f64());
            let hw = h.as_f64();
            int_inf += hw * (phi.f)(p).as_f64() * s_inf;
            int_i += hw * (phi.f)(q).as_f64() * s_i;
            sup_d = sup_d.max(pointwise_distance(m, p, q).as_f64());
            gap2 += hw * (s_inf - s_i) * (s_inf - s_i);
            len += hw * s_inf;
        }
    }
    let lhs = (int_inf - int_i).abs();
    let epsilon = phi.lipschitz * sup_d;
    let delta = gap2.sqrt();
    let rhs = epsilon * len + delta * phi.sup_norm;
    let slack = 1e-12 * (1.0 + int_inf.abs() + int_i.abs());
    ContinuityGap { lhs, rhs, epsilon, delta, holds: lhs <= rhs + slack }
}

#[cfg(test)]
mod tests;
