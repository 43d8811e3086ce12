use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::grid::DistanceGrid;
use crate::error::DomainError;
use crate::flow::RegionBounds;
use crate::geometry::geodesic::convex_segment;
use crate::geometry::{exp_map, log_map, ChartManifold, MetricKind, Profile, TangentVector};
use crate::loops::DiscreteLoop;
use crate::scalar::{add, inverse, scale, Point, Real};

/// Membership test of a region given by an indicator.
pub type Indicator<T> = Arc<dyn Fn(Point<T>) -> bool + Send + Sync>;

/// Shape of a region together with the way its boundary distance is computed.
#[derive(Clone)]
pub enum RegionShape<T> {
    /// `{|z| < half_width}` on a surface of revolution; distance along meridians.
    Band { half_width: T },
    /// Geodesic ball.
    Ball { center: Point<T>, radius: T },
    /// Complement of a closed geodesic ball.
    BallComplement { center: Point<T>, radius: T },
    /// Polar cap `{theta < colatitude}` on a round sphere.
    Cap { colatitude: T },
    /// Region given by an indicator; distance by fast marching.
    Grid { inside: Indicator<T>, field: DistanceGrid<T> },
}

impl<T: fmt::Debug> fmt::Debug for RegionShape<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Band { half_width } => write!(f, "Band({half_width:?})"),
            Self::Ball { center, radius } => write!(f, "Ball({center:?}, {radius:?})"),
            Self::BallComplement { center, radius } => write!(f, "BallComplement({center:?}, {radius:?})"),
            Self::Cap { colatitude } => write!(f, "Cap({colatitude:?})"),
            Self::Grid { .. } => write!(f, "Grid"),
        }
    }
}

/// A bounded region `U` with its collar data. Lengths are Riemannian.
#[derive(Debug, Clone)]
pub struct ConcaveRegion<T> {
    manifold: ChartManifold<T>,
    shape: RegionShape<T>,
    /// Declared convexity modulus of the complement.
    pub rho: T,
    /// Collar half-width.
    pub eta: T,
    /// Collar margin in `(0, 1)`.
    pub theta: T,
    /// Length cap of the families driven near the region.
    pub lambda_cap: T,
    /// Lower bound on the convexity radius near the region.
    pub alpha: T,
    /// Slack used for "image meets the closure of U".
    pub closure_eps: T,
}

fn smoothstep(u: f64) -> f64 {
    let f = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        f(u) / (f(u) + f(1.0 - u))
    }
}

impl<T: Real> ConcaveRegion<T> {
    /// Region with margin `theta = 1/4`, `rho = conv/2`, `alpha = conv` and closure
    /// slack `1e-9`.
    pub fn new(m: &ChartManifold<T>, shape: RegionShape<T>, eta: T, lambda_cap: T) -> Result<Self, DomainError> {
        let conv = m.conv_bound();
        let mut closure_eps = T::lit(1e-9);
        if let RegionShape::Grid { field, .. } = &shape {
            let c = field.cell();
            let g = m.metric_at([m.domain[0].0, m.domain[1].0]);
            closure_eps = (c[0] * g[0][0].sqrt()).max(c[1] * g[1][1].sqrt());
        }
        let region = Self {
            manifold: m.clone(),
            shape,
            rho: conv * T::half(),
            eta,
            theta: T::lit(0.25),
            lambda_cap,
            alpha: conv,
            closure_eps,
        };
        region.check()?;
        Ok(region)
    }

    /// Region `{inside}` with a fast marching distance on an `n x n` grid.
    pub fn from_indicator(
        m: &ChartManifold<T>,
        inside: Indicator<T>,
        n: usize,
        eta: T,
        lambda_cap: T,
    ) -> Result<Self, DomainError> {
        let field = DistanceGrid::fast_marching(m, &*inside, n);
        Self::new(m, RegionShape::Grid { inside, field }, eta, lambda_cap)
    }

    pub fn with_theta(mut self, theta: T) -> Result<Self, DomainError> {
        self.theta = theta;
        self.check()?;
        Ok(self)
    }

    pub fn with_rho(mut self, rho: T) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_alpha(mut self, alpha: T) -> Result<Self, DomainError> {
        self.alpha = alpha;
        self.check()?;
        Ok(self)
    }

    pub fn with_closure_eps(mut self, eps: T) -> Self {
        self.closure_eps = eps;
        self
    }

    fn check(&self) -> Result<(), DomainError> {
        let bad = |s: String| Err(DomainError::Configuration(s));
        if !(self.eta > T::zero()) || self.eta > self.alpha {
            return bad(format!("collar half-width {} must lie in (0, alpha = {}]", self.eta, self.alpha));
        }
        if !(self.theta > T::zero() && self.theta < T::one()) {
            return bad(format!("collar margin {} must lie in (0, 1)", self.theta));
        }
        if !(self.lambda_cap > T::zero()) || !self.lambda_cap.is_finite() {
            return bad(format!("length cap {} must be positive and finite", self.lambda_cap));
        }
        let w = self.collar_width();
        let m = &self.manifold;
        match &self.shape {
            RegionShape::Band { half_width } => {
                let MetricKind::Revolution { profile } = &m.kind else {
                    return bad("band regions need a surface of revolution".into());
                };
                let (lo, hi) = m.domain[0];
                if !(*half_width > T::zero()) {
                    return bad("band half-width must be positive".into());
                }
                let (a_lo, a_hi) = (profile.arc_length(-*half_width), profile.arc_length(*half_width));
                if a_hi - w <= T::zero() || a_lo + w >= T::zero() {
                    return bad(format!("collar width {w} does not fit inside the band"));
                }
                if profile.arc_length(hi) - a_hi <= w || a_lo - profile.arc_length(lo) <= w {
                    return bad(format!("collar width {w} leaves the chart domain"));
                }
            }
            RegionShape::Ball { radius, .. } | RegionShape::BallComplement { radius, .. } => {
                if *radius <= w {
                    return bad(format!("collar width {w} exceeds the ball radius {radius}"));
                }
                if !m.is_flat() && *radius + w >= m.conv_bound() {
                    return bad("ball and collar must sit within the convexity bound of the centre".into());
                }
            }
            RegionShape::Cap { colatitude } => {
                let MetricKind::Sphere { radius } = m.kind else {
                    return bad("cap regions need a round sphere".into());
                };
                let dt = w / radius;
                if *colatitude - dt <= m.domain[0].0 || *colatitude + dt >= m.domain[0].1 {
                    return bad(format!("collar width {w} runs into a pole"));
                }
            }
            RegionShape::Grid { .. } => {}
        }
        Ok(())
    }

    pub fn manifold(&self) -> &ChartManifold<T> {
        &self.manifold
    }

    pub fn shape(&self) -> &RegionShape<T> {
        &self.shape
    }

    /// Width `w = 3 eta / (1 - theta)` of the collar `{|d| < w}`.
    pub fn collar_width(&self) -> T {
        T::lit(3.0) * self.eta / (T::one() - self.theta)
    }

    /// Push-out horizon `T = 2 - 2 theta`.
    pub fn horizon(&self) -> T {
        T::two() - T::two() * self.theta
    }

    pub fn bounds(&self) -> RegionBounds<T> {
        RegionBounds { alpha: self.alpha, rho: self.rho }
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        match &self.shape {
            RegionShape::Grid { inside, .. } => inside(self.manifold.wrap(p)),
            _ => self.signed_distance(p) < T::zero(),
        }
    }

    /// Distance to the boundary, negative inside.
    pub fn signed_distance(&self, p: Point<T>) -> T {
        match &self.shape {
            RegionShape::Band { half_width } => {
                let profile = self.profile();
                let s = profile.arc_length(p[0]);
                (profile.arc_length(-*half_width) - s).max(s - profile.arc_length(*half_width))
            }
            RegionShape::Ball { center, radius } => self.dist_from(*center, p) - *radius,
            RegionShape::BallComplement { center, radius } => *radius - self.dist_from(*center, p),
            RegionShape::Cap { colatitude } => (p[0] - *colatitude) * self.sphere_radius(),
            RegionShape::Grid { field, .. } => field.eval(self.manifold.wrap(p)),
        }
    }

    /// Indicator of the sublevel `U(r) = {d < r}`.
    pub fn sublevel_indicator(&self, r: T) -> impl Fn(Point<T>) -> bool + '_ {
        move |p| self.signed_distance(p) < r
    }

    /// Smallest signed distance over breakpoints and segment samples.
    pub fn min_distance(&self, g: &DiscreteLoop<T>) -> T {
        g.trace(&self.manifold, 8).into_iter().map(|p| self.signed_distance(p)).fold(T::infinity(), T::min)
    }

    /// Whether the loop image meets the closure of `U`.
    pub fn meets_closure(&self, g: &DiscreteLoop<T>) -> bool {
        self.min_distance(g) <= self.closure_eps
    }

    fn profile(&self) -> &Profile<T> {
        match &self.manifold.kind {
            MetricKind::Revolution { profile } => profile,
            _ => unreachable!("checked at construction"),
        }
    }

    fn sphere_radius(&self) -> T {
        match self.manifold.kind {
            MetricKind::Sphere { radius } => radius,
            _ => unreachable!("checked at construction"),
        }
    }

    fn dist_from(&self, c: Point<T>, p: Point<T>) -> T {
        let m = &self.manifold;
        if m.is_flat() {
            return crate::scalar::chart_norm(m.chart_difference(c, p));
        }
        match log_map(m, c, p) {
            Ok(v) => v.norm(m),
            // beyond the convexity bound the chart estimate is a lower bound; all we
            // need there is the sign of d
            Err(_) => m.chart_distance(c, p).max(m.conv_bound()),
        }
    }

    /// Moves `p` across level sets to `d = level`, keeping the transversal coordinate.
    fn move_to_level(&self, p: Point<T>, level: T) -> Point<T> {
        match &self.shape {
            RegionShape::Band { half_width } => {
                let profile = self.profile();
                let s = profile.arc_length(p[0]);
                let (lo, hi) = (profile.arc_length(-*half_width), profile.arc_length(*half_width));
                let target = if s - hi >= lo - s { hi + level } else { lo - level };
                [invert_arc(profile, target, p[0]), p[1]]
            }
            RegionShape::Ball { center, radius } => self.radial(*center, p, *radius + level),
            RegionShape::BallComplement { center, radius } => self.radial(*center, p, *radius - level),
            RegionShape::Cap { colatitude } => [*colatitude + level / self.sphere_radius(), p[1]],
            RegionShape::Grid { field, .. } => self.ascend(field, p, level),
        }
    }

    fn radial(&self, c: Point<T>, p: Point<T>, r: T) -> Point<T> {
        let m = &self.manifold;
        if m.is_flat() {
            let v = m.chart_difference(c, p);
            let n = crate::scalar::chart_norm(v);
            return m.wrap(add(c, scale(v, r / n)));
        }
        let v = log_map(m, c, p).expect("collar lies within the convexity bound of the centre");
        let n = v.norm(m);
        let w = TangentVector::new(c, scale(v.components, r / n));
        m.wrap(exp_map(m, &w, T::one()).expect("collar lies in the chart"))
    }

    fn ascend(&self, field: &DistanceGrid<T>, p: Point<T>, level: T) -> Point<T> {
        let m = &self.manifold;
        let cell = field.cell();
        let mut x = p;
        for _ in 0..400 {
            let d = field.eval(m.wrap(x));
            let r = level - d;
            if r.abs() < T::lit(1e-10) {
                break;
            }
            let h = [cell[0] * T::half(), cell[1] * T::half()];
            let grad = [
                (field.eval(m.wrap([x[0] + h[0], x[1]])) - field.eval(m.wrap([x[0] - h[0], x[1]]))) / (T::two() * h[0]),
                (field.eval(m.wrap([x[0], x[1] + h[1]])) - field.eval(m.wrap([x[0], x[1] - h[1]]))) / (T::two() * h[1]),
            ];
            let gi = inverse(&m.metric_at(x));
            let u = [gi[0][0] * grad[0] + gi[0][1] * grad[1], gi[1][0] * grad[0] + gi[1][1] * grad[1]];
            let norm2 = grad[0] * u[0] + grad[1] * u[1];
            if !(norm2 > T::zero()) {
                break;
            }
            // metric step r / |grad d|, capped at one cell
            let g = m.metric_at(x);
            let cap = (cell[0] * g[0][0].sqrt()).min(cell[1] * g[1][1].sqrt());
            let step = (r / norm2.sqrt()).max(-cap).min(cap);
            x = add(x, scale(u, step / norm2.sqrt()));
        }
        m.wrap(x)
    }

    /// Flow of `psi(xi) d/dxi` on the collar coordinate `xi = d / w` for time `t`.
    pub fn pushout_xi(&self, xi: T, t: T) -> T {
        let theta = self.theta.as_f64();
        let psi = |x: f64| if x.abs() >= 1.0 { 0.0 } else { smoothstep((1.0 - x.abs()) / theta) };
        let plateau = 1.0 - theta;
        let mut x = xi.as_f64();
        let mut left = t.as_f64();
        if x.abs() >= 1.0 || left <= 0.0 {
            return xi;
        }
        // exact on the plateau where psi = 1, RK4 on the ramps
        while left > 0.0 {
            if x >= -plateau && x < plateau {
                let run = (plateau - x).min(left);
                x += run;
                left -= run;
                continue;
            }
            let h = left.min(1e-3);
            let k1 = psi(x);
            let k2 = psi(x + 0.5 * h * k1);
            let k3 = psi(x + 0.5 * h * k2);
            let k4 = psi(x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            left -= h;
        }
        T::lit(x)
    }

    /// The push-out flow at time `t in [0, T]`: identity off the collar, otherwise the
    /// collar coordinate moves by the flow of `psi`.
    pub fn pushout_point(&self, p: Point<T>, t: T) -> Point<T> {
        let t = t.max(T::zero()).min(self.horizon());
        if t == T::zero() {
            return p;
        }
        let w = self.collar_width();
        let d = self.signed_distance(p);
        if d.abs() >= w {
            return p;
        }
        let xi = self.pushout_xi(d / w, t);
        if xi == d / w {
            return p;
        }
        self.move_to_level(p, xi * w)
    }

    /// Applies the push-out to every breakpoint and re-joins by minimizing segments.
    pub fn pushout_loop(&self, g: &DiscreteLoop<T>, t: T) -> Result<DiscreteLoop<T>, DomainError> {
        let m = &self.manifold;
        let moved: Vec<Point<T>> = g.breakpoints().iter().map(|&p| self.pushout_point(p, t)).collect();
        if moved.as_slice() == g.breakpoints() {
            return Ok(g.clone());
        }
        Ok(DiscreteLoop::with_params(m, &moved, g.params().to_vec())?)
    }
}

/// `z` with profile arc length `target`, started from `z0`.
fn invert_arc<T: Real>(profile: &Profile<T>, target: T, z0: T) -> T {
    if let Profile::Cosh = profile {
        return target.asinh();
    }
    let mut z = z0;
    for _ in 0..60 {
        let f = profile.arc_length(z) - target;
        let (_, d, _) = profile.eval(z);
        let step = f / (T::one() + d * d).sqrt();
        z = z - step;
        if step.abs() < T::lit(1e-14) {
            break;
        }
    }
    z
}

/// One probe pair whose minimizing segment dips into the region.
#[derive(Debug, Clone, Serialize)]
pub struct AuditViolation<T> {
    pub p: Point<T>,
    pub q: Point<T>,
    /// Most negative signed distance along the segment.
    pub depth: T,
}

/// Outcome of [`audit_delta_convexity`].
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityAudit<T> {
    pub delta: T,
    pub pairs_checked: usize,
    /// Whether `delta` respects the declared modulus `rho`.
    pub within_modulus: bool,
    pub violations: Vec<AuditViolation<T>>,
    pub passed: bool,
}

/// Samples pairs `p, q` outside `U` with `d(p, q) <= delta`, `p` within `2 delta` of
/// the boundary (levels biased toward it), and checks that their minimizing segment avoids `U`.
pub fn audit_delta_convexity<T: Real>(region: &ConcaveRegion<T>, delta: T, n_samples: usize, seed: u64) -> ConvexityAudit<T> {
    let m = region.manifold();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = match region.shape() {
        RegionShape::Grid { .. } => region.closure_eps,
        _ => T::lit(1e-9),
    };
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut attempts = 0;
    let band = T::two() * delta;
    while checked < n_samples && attempts < 1000 * n_samples.max(1) {
        attempts += 1;
        let p = [
            T::lit(rng.gen_range(m.domain[0].0.as_f64()..m.domain[0].1.as_f64())),
            T::lit(rng.gen_range(m.domain[1].0.as_f64()..m.domain[1].1.as_f64())),
        ];
        let dp = region.signed_distance(p);
        if dp < T::zero() || dp > band {
            continue;
        }
        // clipping happens within a sagitta of the boundary, so levels crowd near 0
        let level = band * T::lit(rng.gen_range(0.0f64..1.0).powi(4));
        let p = region.move_to_level(p, level);
        if !m.contains(p) || region.signed_distance(p) < T::zero() {
            continue;
        }
        // half the probes leave nearly along the level set, where chords clip
        let mut ang = rng.gen_range(0.0..std::f64::consts::TAU);
        if rng.gen_bool(0.5) {
            let h = T::lit(1e-6);
            let gx = region.signed_distance([p[0] + h, p[1]]) - region.signed_distance([p[0] - h, p[1]]);
            let gy = region.signed_distance([p[0], p[1] + h]) - region.signed_distance([p[0], p[1] - h]);
            let base = (-gx.as_f64()).atan2(gy.as_f64());
            let flip = if rng.gen_bool(0.5) { std::f64::consts::PI } else { 0.0 };
            ang = base + flip + 0.3 * rng.gen_range(-1.0f64..1.0).powi(3);
        }
        let dir = [T::lit(ang.cos()), T::lit(ang.sin())];
        let len = delta * T::lit(rng.gen_range(1e-3..=1.0));
        let v = scale(dir, len / m.norm_at(p, dir));
        let Ok(q) = exp_map(m, &TangentVector::new(p, v), T::one()) else { continue };
        let q = m.wrap(q);
        if !m.contains(q) || region.signed_distance(q) < T::zero() {
            continue;
        }
        let Ok(seg) = convex_segment(m, p, q) else { continue };
        checked += 1;
        let depth = seg.sample(m, 33).into_iter().map(|x| region.signed_distance(x)).fold(T::infinity(), T::min);
        if depth < -tol {
            violations.push(AuditViolation { p, q, depth });
        }
    }
    ConvexityAudit {
        delta,
        pairs_checked: checked,
        within_modulus: delta <= region.rho,
        passed: violations.is_empty() && checked == n_samples,
        violations,
    }
}
