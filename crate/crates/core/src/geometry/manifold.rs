use std::fmt;
use std::sync::Arc;

use crate::error::GeometryError;
use crate::scalar::{det, inverse, quad_form, sym_eigenvalues, sub, Mat2, Point, Real};

/// Christoffel symbols `gamma[k][i][j]` (upper index first).
pub type Christoffel<T> = [[[T; 2]; 2]; 2];

/// User supplied metric field.
pub type MetricFn<T> = Arc<dyn Fn(Point<T>) -> Mat2<T> + Send + Sync>;

/// Profile curve `r(z)` of a surface of revolution.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    /// `r(z) = cosh z`, the catenoid.
    Cosh,
    /// `r(z) = sum c_k z^k`.
    Polynomial(Vec<T>),
    /// Natural cubic spline through tabulated `(z, r)` samples.
    Spline(CubicSpline<T>),
}

impl<T: Real> Profile<T> {
    /// Returns `(r, r', r'')` at `z`.
    pub fn eval(&self, z: T) -> (T, T, T) {
        match self {
            Profile::Cosh => (z.cosh(), z.sinh(), z.cosh()),
            Profile::Polynomial(c) => {
                let mut r = T::zero();
                let mut d1 = T::zero();
                let mut d2 = T::zero();
                for &ck in c.iter().rev() {
                    d2 = d2 * z + d1 * T::two();
                    d1 = d1 * z + r;
                    r = r * z + ck;
                }
                (r, d1, d2)
            }
            Profile::Spline(s) => s.eval(z),
        }
    }

    /// Arc length of the profile between `0` and `z` (signed).
    pub fn arc_length(&self, z: T) -> T {
        match self {
            Profile::Cosh => z.sinh(),
            _ => {
                // composite Simpson on 512 panels
                let n = 512;
                let h = z / T::from_usize_lossy(n);
                let f = |s: T| {
                    let (_, d, _) = self.eval(s);
                    (T::one() + d * d).sqrt()
                };
                let mut acc = f(T::zero()) + f(z);
                for i in 1..n {
                    let w = if i % 2 == 1 { T::lit(4.0) } else { T::two() };
                    acc = acc + w * f(h * T::from_usize_lossy(i));
                }
                acc * h / T::lit(3.0)
            }
        }
    }
}

/// Natural cubic spline with value, first and second derivative evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline<T> {
    knots: Vec<T>,
    values: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    pub fn new(knots: Vec<T>, values: Vec<T>) -> Option<Self> {
        let n = knots.len();
        if n < 3 || values.len() != n || knots.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        // tridiagonal solve for the second derivatives, natural end conditions
        let mut second = vec![T::zero(); n];
        let mut u = vec![T::zero(); n];
        for i in 1..n - 1 {
            let sig = (knots[i] - knots[i - 1]) / (knots[i + 1] - knots[i - 1]);
            let p = sig * second[i - 1] + T::two();
            second[i] = (sig - T::one()) / p;
            let slope = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i])
                - (values[i] - values[i - 1]) / (knots[i] - knots[i - 1]);
            u[i] = (T::lit(6.0) * slope / (knots[i + 1] - knots[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = T::zero();
        for k in (0..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + u[k];
        }
        Some(Self { knots, values, second })
    }

    pub fn eval(&self, z: T) -> (T, T, T) {
        let n = self.knots.len();
        let z = z.max(self.knots[0]).min(self.knots[n - 1]);
        let hi = self.knots.partition_point(|&k| k < z).clamp(1, n - 1);
        let lo = hi - 1;
        let h = self.knots[hi] - self.knots[lo];
        let a = (self.knots[hi] - z) / h;
        let b = (z - self.knots[lo]) / h;
        let six = T::lit(6.0);
        let (ya, yb, sa, sb) = (self.values[lo], self.values[hi], self.second[lo], self.second[hi]);
        let r = a * ya + b * yb + ((a * a * a - a) * sa + (b * b * b - b) * sb) * h * h / six;
        let d1 = (yb - ya) / h - (T::lit(3.0) * a * a - T::one()) / six * h * sa
            + (T::lit(3.0) * b * b - T::one()) / six * h * sb;
        let d2 = a * sa + b * sb;
        (r, d1, d2)
    }
}

/// The metric family backing a [`ChartManifold`].
#[derive(Clone)]
pub enum MetricKind<T> {
    /// Round sphere of the given radius in colatitude/longitude `(theta, phi)`.
    Sphere { radius: T },
    /// Euclidean metric on a periodic box.
    FlatTorus,
    /// Surface of revolution in `(z, phi)` with metric `diag(1 + r'^2, r^2)`.
    Revolution { profile: Profile<T> },
    /// Flat torus scaled by the conformal factor `1 + A exp(-|x - c|^2 / 2w^2)`.
    PerturbedTorus { amplitude: T, center: Point<T>, width: T },
    /// Ellipsoid `(a sin t cos p, b sin t sin p, c cos t)` in `(theta, phi)`.
    Ellipsoid { a: T, b: T, c: T },
    /// Arbitrary metric field; Christoffel symbols by central differences.
    Custom(MetricFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for MetricKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Sphere { radius } => write!(f, "Sphere({radius:?})"),
            MetricKind::FlatTorus => write!(f, "FlatTorus"),
            MetricKind::Revolution { profile } => write!(f, "Revolution({profile:?})"),
            MetricKind::PerturbedTorus { amplitude, center, width } => {
                write!(f, "PerturbedTorus({amplitude:?}, {center:?}, {width:?})")
            }
            MetricKind::Ellipsoid { a, b, c } => write!(f, "Ellipsoid({a:?}, {b:?}, {c:?})"),
            MetricKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Numerical settings of the geodesic integrator and shooting solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    /// Fixed RK4 step as a fraction of the unit segment parameter.
    pub step: T,
    /// Knots stored per segment for later evaluation.
    pub knots: usize,
    pub max_newton: usize,
    /// Residual tolerance of the shooting solver, chart units.
    pub tolerance: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self { step: T::lit(1e-3), knots: 16, max_newton: 50, tolerance: T::lit(1e-9) }
    }
}

/// A two-dimensional Riemannian metric on a single chart with optional periodic axes.
#[derive(Debug, Clone)]
pub struct ChartManifold<T> {
    pub name: String,
    pub kind: MetricKind<T>,
    /// Per-axis `[lo, hi]`; for periodic axes `hi - lo` is the period.
    pub domain: [(T, T); 2],
    pub periods: [Option<T>; 2],
    pub curvature_bound: T,
    pub injectivity_floor: T,
    pub safety: T,
    /// Largest distance `distance` will search for; `None` means unbounded.
    pub horizon: Option<T>,
    pub integrator: IntegratorConfig<T>,
}

const POLE_MARGIN: f64 = 1e-7;

impl<T: Real> ChartManifold<T> {
    pub fn sphere(radius: T) -> Self {
        let pi = T::PI();
        Self {
            name: "sphere".into(),
            kind: MetricKind::Sphere { radius },
            domain: [(T::lit(POLE_MARGIN), pi - T::lit(POLE_MARGIN)), (T::zero(), T::two() * pi)],
            periods: [None, Some(T::two() * pi)],
            curvature_bound: T::one() / (radius * radius),
            injectivity_floor: pi * radius,
            safety: T::lit(0.9),
            horizon: Some(pi * radius),
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn flat_torus(periods: [T; 2]) -> Self {
        let inj = periods[0].min(periods[1]) * T::half();
        Self {
            name: "flat_torus".into(),
            kind: MetricKind::FlatTorus,
            domain: [(T::zero(), periods[0]), (T::zero(), periods[1])],
            periods: [Some(periods[0]), Some(periods[1])],
            curvature_bound: T::zero(),
            injectivity_floor: inj,
            safety: T::lit(0.9),
            horizon: None,
            integrator: IntegratorConfig::default(),
        }
    }

    /// Surface of revolution over `z in [z_min, z_max]`; the caller declares the
    /// curvature and injectivity bounds of the working region.
    pub fn revolution(profile: Profile<T>, z_range: (T, T), curvature_bound: T, injectivity_floor: T) -> Self {
        Self {
            name: "revolution".into(),
            kind: MetricKind::Revolution { profile },
            domain: [z_range, (T::zero(), T::two() * T::PI())],
            periods: [None, Some(T::two() * T::PI())],
            curvature_bound,
            injectivity_floor,
            safety: T::lit(0.9),
            horizon: Some(injectivity_floor),
            integrator: IntegratorConfig::default(),
        }
    }

    /// The catenoid `r = cosh z` with its shipped bounds: curvature is
    /// `-1/cosh^4 z <= 0` and the waist has circumference `2 pi`.
    pub fn catenoid(z_range: (T, T)) -> Self {
        Self::revolution(Profile::Cosh, z_range, T::zero(), T::PI())
    }

    pub fn ellipsoid(a: T, b: T, c: T) -> Self {
        let pi = T::PI();
        let (a2, b2, c2) = (a * a, b * b, c * c);
        let kmax = (a2 / (b2 * c2)).max(b2 / (a2 * c2)).max(c2 / (a2 * b2));
        Self {
            name: "ellipsoid".into(),
            kind: MetricKind::Ellipsoid { a, b, c },
            domain: [(T::lit(POLE_MARGIN), pi - T::lit(POLE_MARGIN)), (T::zero(), T::two() * pi)],
            periods: [None, Some(T::two() * pi)],
            curvature_bound: kmax,
            injectivity_floor: pi / kmax.sqrt(),
            safety: T::lit(0.9),
            horizon: Some(pi / kmax.sqrt()),
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn perturbed_torus(periods: [T; 2], amplitude: T, center: Point<T>, width: T) -> Self {
        let mut m = Self::flat_torus(periods);
        m.name = "perturbed_torus".into();
        m.kind = MetricKind::PerturbedTorus { amplitude, center, width };
        m.horizon = Some(m.injectivity_floor);
        // Bounds from a dense sample of the conformal factor and its curvature.
        let n = 192;
        let mut kmax = T::zero();
        let mut lmin = T::infinity();
        for i in 0..n {
            for j in 0..n {
                let p = [
                    periods[0] * T::from_usize_lossy(i) / T::from_usize_lossy(n),
                    periods[1] * T::from_usize_lossy(j) / T::from_usize_lossy(n),
                ];
                let (lam, _) = m.conformal_factor(p);
                lmin = lmin.min(lam);
                kmax = kmax.max(m.conformal_curvature(p));
            }
        }
        m.curvature_bound = kmax * T::lit(1.25);
        let mut inj = periods[0].min(periods[1]) * T::half() * lmin.sqrt();
        if m.curvature_bound > T::zero() {
            inj = inj.min(T::PI() / m.curvature_bound.sqrt());
        }
        m.injectivity_floor = inj;
        m.horizon = Some(inj);
        m
    }

    /// Manifold with a user metric; the bounds are declared by the caller.
    pub fn custom(
        name: &str,
        metric: MetricFn<T>,
        domain: [(T, T); 2],
        periods: [Option<T>; 2],
        curvature_bound: T,
        injectivity_floor: T,
    ) -> Self {
        Self {
            name: name.into(),
            kind: MetricKind::Custom(metric),
            domain,
            periods,
            curvature_bound,
            injectivity_floor,
            safety: T::lit(0.9),
            horizon: Some(injectivity_floor),
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn with_integrator(mut self, integrator: IntegratorConfig<T>) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_step(mut self, step: T) -> Self {
        self.integrator.step = step;
        self
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, MetricKind::FlatTorus)
    }

    /// Lower bound on the convexity radius: `safety * min(inj/2, pi / (2 sqrt K))`.
    pub fn conv_bound(&self) -> T {
        let mut b = self.injectivity_floor * T::half();
        if self.curvature_bound > T::zero() {
            b = b.min(T::PI() / (T::two() * self.curvature_bound.sqrt()));
        }
        b * self.safety
    }

    /// Whether `p` lies in the chart domain on every non-periodic axis.
    pub fn contains(&self, p: Point<T>) -> bool {
        (0..2).all(|k| {
            self.periods[k].is_some() || (p[k] >= self.domain[k].0 && p[k] <= self.domain[k].1)
        })
    }

    /// Reduces periodic coordinates into `[lo, lo + period)`.
    pub fn wrap(&self, mut p: Point<T>) -> Point<T> {
        for k in 0..2 {
            if let Some(per) = self.periods[k] {
                let lo = self.domain[k].0;
                let mut x = (p[k] - lo) % per;
                if x < T::zero() {
                    x = x + per;
                }
                if x >= per {
                    x = x - per;
                }
                p[k] = lo + x;
            }
        }
        p
    }

    fn check(&self, p: Point<T>) -> Result<(), GeometryError> {
        if self.contains(p) && p[0].is_finite() && p[1].is_finite() {
            Ok(())
        } else {
            Err(GeometryError::OutsideDomain(p[0].as_f64(), p[1].as_f64()))
        }
    }

    /// Metric coefficients at `p`.
    pub fn metric(&self, p: Point<T>) -> Result<Mat2<T>, GeometryError> {
        self.check(p)?;
        Ok(self.metric_at(p))
    }

    /// Metric coefficients without the domain check.
    pub fn metric_at(&self, p: Point<T>) -> Mat2<T> {
        let z = T::zero();
        match &self.kind {
            MetricKind::Sphere { radius } => {
                let a2 = *radius * *radius;
                let s = p[0].sin();
                [[a2, z], [z, a2 * s * s]]
            }
            MetricKind::FlatTorus => [[T::one(), z], [z, T::one()]],
            MetricKind::Revolution { profile } => {
                let (r, d, _) = profile.eval(p[0]);
                [[T::one() + d * d, z], [z, r * r]]
            }
            MetricKind::PerturbedTorus { .. } => {
                let (lam, _) = self.conformal_factor(p);
                [[lam, z], [z, lam]]
            }
            MetricKind::Ellipsoid { a, b, c } => {
                let e = ellipsoid_frame(*a, *b, *c, p);
                [[dot3(e.xt, e.xt), dot3(e.xt, e.xp)], [dot3(e.xt, e.xp), dot3(e.xp, e.xp)]]
            }
            MetricKind::Custom(f) => f(p),
        }
    }

    /// Christoffel symbols at `p`.
    pub fn christoffel(&self, p: Point<T>) -> Result<Christoffel<T>, GeometryError> {
        self.check(p)?;
        Ok(self.christoffel_at(p))
    }

    pub(crate) fn christoffel_at(&self, p: Point<T>) -> Christoffel<T> {
        let z = T::zero();
        let mut g = [[[z; 2]; 2]; 2];
        match &self.kind {
            MetricKind::Sphere { .. } => {
                let (s, c) = p[0].sin_cos();
                g[0][1][1] = -s * c;
                g[1][0][1] = c / s;
                g[1][1][0] = c / s;
            }
            MetricKind::FlatTorus => {}
            MetricKind::Revolution { profile } => {
                let (r, d1, d2) = profile.eval(p[0]);
                let a = T::one() + d1 * d1;
                g[0][0][0] = d1 * d2 / a;
                g[0][1][1] = -r * d1 / a;
                g[1][0][1] = d1 / r;
                g[1][1][0] = d1 / r;
            }
            MetricKind::PerturbedTorus { .. } => {
                let (lam, grad) = self.conformal_factor(p);
                let h = T::half() / lam;
                for k in 0..2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut v = z;
                            if k == j {
                                v = v + grad[i];
                            }
                            if k == i {
                                v = v + grad[j];
                            }
                            if i == j {
                                v = v - grad[k];
                            }
                            g[k][i][j] = h * v;
                        }
                    }
                }
            }
            MetricKind::Ellipsoid { a, b, c } => {
                let e = ellipsoid_frame(*a, *b, *c, p);
                let m = [[dot3(e.xt, e.xt), dot3(e.xt, e.xp)], [dot3(e.xt, e.xp), dot3(e.xp, e.xp)]];
                let inv = inverse(&m);
                let tangents = [e.xt, e.xp];
                let second = [[e.xtt, e.xtp], [e.xtp, e.xpp]];
                for i in 0..2 {
                    for j in 0..2 {
                        let proj = [dot3(tangents[0], second[i][j]), dot3(tangents[1], second[i][j])];
                        for k in 0..2 {
                            g[k][i][j] = inv[k][0] * proj[0] + inv[k][1] * proj[1];
                        }
                    }
                }
            }
            MetricKind::Custom(_) => return self.christoffel_fd(p),
        }
        g
    }

    /// Christoffel symbols from central differences of the metric.
    pub fn christoffel_fd(&self, p: Point<T>) -> Christoffel<T> {
        let h = T::lit(1e-5);
        let mut dg = [[[T::zero(); 2]; 2]; 2]; // dg[l][i][j] = d_l g_ij
        for l in 0..2 {
            let mut pp = p;
            let mut pm = p;
            pp[l] = pp[l] + h;
            pm[l] = pm[l] - h;
            let gp = self.metric_at(pp);
            let gm = self.metric_at(pm);
            for i in 0..2 {
                for j in 0..2 {
                    dg[l][i][j] = (gp[i][j] - gm[i][j]) / (T::two() * h);
                }
            }
        }
        let inv = inverse(&self.metric_at(p));
        let mut g = [[[T::zero(); 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = T::zero();
                    for l in 0..2 {
                        acc = acc + inv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                    }
                    g[k][i][j] = acc * T::half();
                }
            }
        }
        g
    }

    /// Smallest eigenvalue of the metric at `p`.
    pub fn min_eigenvalue(&self, p: Point<T>) -> T {
        sym_eigenvalues(&self.metric_at(p)).0
    }

    /// Metric norm of the chart vector `v` based at `p`.
    pub fn norm_at(&self, p: Point<T>, v: Point<T>) -> T {
        quad_form(&self.metric_at(p), v, v).max(T::zero()).sqrt()
    }

    /// Chart difference `q - p` reduced to the periodic image of smallest metric norm at `p`.
    pub fn chart_difference(&self, p: Point<T>, q: Point<T>) -> Point<T> {
        let mut d = sub(q, p);
        for k in 0..2 {
            if let Some(per) = self.periods[k] {
                d[k] = d[k] - per * (d[k] / per).round();
            }
        }
        if self.periods.iter().all(|x| x.is_none()) {
            return d;
        }
        let g = self.metric_at(p);
        let shifts = |k: usize| -> Vec<T> {
            match self.periods[k] {
                Some(per) => vec![T::zero(), -per, per],
                None => vec![T::zero()],
            }
        };
        let mut best = d;
        let mut best_norm = quad_form(&g, d, d);
        for s0 in shifts(0) {
            for s1 in shifts(1) {
                let c = [d[0] + s0, d[1] + s1];
                let n = quad_form(&g, c, c);
                if n < best_norm {
                    best_norm = n;
                    best = c;
                }
            }
        }
        best
    }

    /// Chart-level distance estimate `|chart_difference|_g` evaluated at the midpoint.
    pub fn chart_distance(&self, p: Point<T>, q: Point<T>) -> T {
        let d = self.chart_difference(p, q);
        let mid = [p[0] + d[0] * T::half(), p[1] + d[1] * T::half()];
        let mid = if self.contains(mid) { mid } else { p };
        self.norm_at(mid, d)
    }

    fn conformal_factor(&self, p: Point<T>) -> (T, Point<T>) {
        match &self.kind {
            MetricKind::PerturbedTorus { amplitude, center, width } => {
                let mut d = sub(p, *center);
                for k in 0..2 {
                    if let Some(per) = self.periods[k] {
                        d[k] = d[k] - per * (d[k] / per).round();
                    }
                }
                let w2 = *width * *width;
                let e = (-(d[0] * d[0] + d[1] * d[1]) / (T::two() * w2)).exp();
                let lam = T::one() + *amplitude * e;
                let gr = [-*amplitude * e * d[0] / w2, -*amplitude * e * d[1] / w2];
                (lam, gr)
            }
            _ => (T::one(), [T::zero(); 2]),
        }
    }

    /// Gaussian curvature of a conformal metric `lam * delta`, `-Laplace(ln lam) / (2 lam)`.
    fn conformal_curvature(&self, p: Point<T>) -> T {
        let h = T::lit(1e-4);
        let f = |q: Point<T>| self.conformal_factor(q).0.ln();
        let c = f(p);
        let lap = (f([p[0] + h, p[1]]) + f([p[0] - h, p[1]]) + f([p[0], p[1] + h]) + f([p[0], p[1] - h])
            - T::lit(4.0) * c)
            / (h * h);
        (-lap / (T::two() * self.conformal_factor(p).0)).abs()
    }

    /// Gaussian curvature from finite differences of the Christoffel symbols.
    pub fn gaussian_curvature(&self, p: Point<T>) -> T {
        let h = T::lit(1e-4);
        let gam = |q: Point<T>| self.christoffel_at(q);
        let g0 = gam(p);
        let gp = [gam([p[0] + h, p[1]]), gam([p[0], p[1] + h])];
        let gm = [gam([p[0] - h, p[1]]), gam([p[0], p[1] - h])];
        let d = |l: usize, k: usize, i: usize, j: usize| (gp[l][k][i][j] - gm[l][k][i][j]) / (T::two() * h);
        // R^k_{l i j} with k = 0, l = 1, i = 0, j = 1: R^0_{101}
        let mut r = d(0, 0, 1, 1) - d(1, 0, 0, 1);
        for m in 0..2 {
            r = r + g0[0][0][m] * g0[m][1][1] - g0[0][1][m] * g0[m][0][1];
        }
        let metric = self.metric_at(p);
        // K = g_{0k} R^k_{101} / det g; with R^0_{101} and R^1_{101}
        let mut r1 = d(0, 1, 1, 1) - d(1, 1, 0, 1);
        for m in 0..2 {
            r1 = r1 + g0[1][0][m] * g0[m][1][1] - g0[1][1][m] * g0[m][0][1];
        }
        (metric[0][0] * r + metric[0][1] * r1) / det(&metric)
    }
}

struct Frame<T> {
    xt: [T; 3],
    xp: [T; 3],
    xtt: [T; 3],
    xtp: [T; 3],
    xpp: [T; 3],
}

fn ellipsoid_frame<T: Real>(a: T, b: T, c: T, p: Point<T>) -> Frame<T> {
    let (st, ct) = p[0].sin_cos();
    let (sp, cp) = p[1].sin_cos();
    let z = T::zero();
    Frame {
        xt: [a * ct * cp, b * ct * sp, -c * st],
        xp: [-a * st * sp, b * st * cp, z],
        xtt: [-a * st * cp, -b * st * sp, -c * ct],
        xtp: [-a * ct * sp, b * ct * cp, z],
        xpp: [-a * st * cp, -b * st * sp, z],
    }
}

fn dot3<T: Real>(u: [T; 3], v: [T; 3]) -> T {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}
