use serde::Serialize;

use super::manifold::{ChartManifold, Christoffel};
use crate::error::GeometryError;
use crate::scalar::{add, chart_norm, quad_form, scale, sub, Point, Real};

/// A tangent vector given by chart components at a base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentVector<T> {
    pub base: Point<T>,
    pub components: Point<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: Point<T>, components: Point<T>) -> Self {
        Self { base, components }
    }

    pub fn zero(base: Point<T>) -> Self {
        Self { base, components: [T::zero(); 2] }
    }

    pub fn norm(&self, m: &ChartManifold<T>) -> T {
        m.norm_at(self.base, self.components)
    }
}

/// Position and velocity along a geodesic, in unwrapped chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState<T> {
    pub x: Point<T>,
    pub v: Point<T>,
}

#[inline]
fn contract<T: Real>(g: &Christoffel<T>, v: Point<T>) -> Point<T> {
    let mut a = [T::zero(); 2];
    for k in 0..2 {
        a[k] = g[k][0][0] * v[0] * v[0] + T::two() * g[k][0][1] * v[0] * v[1] + g[k][1][1] * v[1] * v[1];
    }
    a
}

#[inline]
fn accel<T: Real>(m: &ChartManifold<T>, x: Point<T>, v: Point<T>) -> Point<T> {
    let a = contract(&m.christoffel_at(x), v);
    [-a[0], -a[1]]
}

#[inline]
fn rk4<T: Real>(m: &ChartManifold<T>, s: GeodesicState<T>, h: T) -> GeodesicState<T> {
    let half = h * T::half();
    let k1x = s.v;
    let k1v = accel(m, s.x, s.v);
    let x2 = add(s.x, scale(k1x, half));
    let v2 = add(s.v, scale(k1v, half));
    let k2v = accel(m, x2, v2);
    let x3 = add(s.x, scale(v2, half));
    let v3 = add(s.v, scale(k2v, half));
    let k3v = accel(m, x3, v3);
    let x4 = add(s.x, scale(v3, h));
    let v4 = add(s.v, scale(k3v, h));
    let k4v = accel(m, x4, v4);
    let sixth = h / T::lit(6.0);
    let two = T::two();
    GeodesicState {
        x: [
            s.x[0] + sixth * (k1x[0] + two * v2[0] + two * v3[0] + v4[0]),
            s.x[1] + sixth * (k1x[1] + two * v2[1] + two * v3[1] + v4[1]),
        ],
        v: [
            s.v[0] + sixth * (k1v[0] + two * k2v[0] + two * k3v[0] + k4v[0]),
            s.v[1] + sixth * (k1v[1] + two * k2v[1] + two * k3v[1] + k4v[1]),
        ],
    }
}

/// Integrates the geodesic equation from `start` over the parameter span `t`
/// with the manifold's fixed step; `offset` is only used to report escape parameters.
pub(crate) fn integrate<T: Real>(
    m: &ChartManifold<T>,
    start: GeodesicState<T>,
    t: T,
    offset: T,
) -> Result<GeodesicState<T>, GeometryError> {
    if t <= T::zero() {
        return Ok(start);
    }
    if m.is_flat() {
        return Ok(GeodesicState { x: add(start.x, scale(start.v, t)), v: start.v });
    }
    let n = (t / m.integrator.step).ceil().to_usize().unwrap_or(1).max(1);
    let h = t / T::from_usize_lossy(n);
    let mut s = start;
    for i in 0..n {
        s = rk4(m, s, h);
        if !m.contains(s.x) || !s.x[0].is_finite() || !s.x[1].is_finite() {
            let at = offset + h * T::from_usize_lossy(i + 1);
            return Err(GeometryError::Escape { parameter: at.as_f64() });
        }
    }
    Ok(s)
}

/// Integrates over `[0, 1]` recording `knots + 1` states at `t = i / knots`.
fn integrate_knots<T: Real>(
    m: &ChartManifold<T>,
    start: GeodesicState<T>,
    knots: usize,
) -> Result<Vec<GeodesicState<T>>, GeometryError> {
    let mut out = Vec::with_capacity(knots + 1);
    out.push(start);
    let span = T::one() / T::from_usize_lossy(knots);
    let mut s = start;
    for i in 0..knots {
        s = integrate(m, s, span, span * T::from_usize_lossy(i))?;
        out.push(s);
    }
    Ok(out)
}

/// Exponential map: the geodesic with initial data `(v.base, v.components)` at parameter `t`.
pub fn exp_map<T: Real>(m: &ChartManifold<T>, v: &TangentVector<T>, t: T) -> Result<Point<T>, GeometryError> {
    m.metric(v.base)?;
    let s = integrate(m, GeodesicState { x: v.base, v: v.components }, t, T::zero())?;
    Ok(m.wrap(s.x))
}

/// A constant speed geodesic `[0, 1] -> chart` with stored integration knots.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment<T> {
    pub start: Point<T>,
    pub end: Point<T>,
    pub initial_velocity: TangentVector<T>,
    /// Velocity at `t = 1` in chart components.
    pub end_velocity: Point<T>,
    pub length: T,
    knots: Vec<GeodesicState<T>>,
}

impl<T: Real> GeodesicSegment<T> {
    /// Constant segment at `p`.
    pub fn constant(p: Point<T>) -> Self {
        let s = GeodesicState { x: p, v: [T::zero(); 2] };
        Self {
            start: p,
            end: p,
            initial_velocity: TangentVector::zero(p),
            end_velocity: [T::zero(); 2],
            length: T::zero(),
            knots: vec![s, s],
        }
    }

    /// Integrates the geodesic with initial data `v` over `[0, 1]`.
    pub fn from_velocity(m: &ChartManifold<T>, v: TangentVector<T>) -> Result<Self, GeometryError> {
        let knots = integrate_knots(m, GeodesicState { x: v.base, v: v.components }, m.integrator.knots)?;
        Ok(Self::from_knots(m, knots))
    }

    fn from_knots(m: &ChartManifold<T>, knots: Vec<GeodesicState<T>>) -> Self {
        let first = knots[0];
        let last = *knots.last().expect("knots");
        Self {
            start: m.wrap(first.x),
            end: m.wrap(last.x),
            initial_velocity: TangentVector::new(m.wrap(first.x), first.v),
            end_velocity: last.v,
            length: m.norm_at(first.x, first.v),
            knots,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.length == T::zero()
    }

    /// Unwrapped state at parameter `t in [0, 1]`.
    pub fn state_at(&self, m: &ChartManifold<T>, t: T) -> GeodesicState<T> {
        let k = self.knots.len() - 1;
        let t = t.max(T::zero()).min(T::one());
        if self.is_constant() {
            return self.knots[0];
        }
        let pos = t * T::from_usize_lossy(k);
        let i = pos.floor().to_usize().unwrap_or(0).min(k - 1);
        let t0 = T::from_usize_lossy(i) / T::from_usize_lossy(k);
        let s = self.knots[i];
        if t - t0 <= T::zero() {
            return s;
        }
        // The stored knots were produced without leaving the domain.
        integrate(m, s, t - t0, t0).unwrap_or(self.knots[i + 1])
    }

    /// Wrapped point at parameter `t`.
    pub fn point_at(&self, m: &ChartManifold<T>, t: T) -> Point<T> {
        m.wrap(self.state_at(m, t).x)
    }

    /// The restriction to `[a, b]`, reparametrized over `[0, 1]`. Knot-aligned
    /// restrictions reuse the stored states; others integrate only across `[a, b]`.
    pub fn sub_segment(&self, m: &ChartManifold<T>, a: T, b: T) -> Result<Self, GeometryError> {
        let a = a.max(T::zero());
        let b = b.min(T::one());
        if b <= a || self.is_constant() {
            return Ok(Self::constant(self.point_at(m, a)));
        }
        if a == T::zero() && b == T::one() {
            return Ok(self.clone());
        }
        let span = b - a;
        let k = self.knots.len() - 1;
        let kf = T::from_usize_lossy(k);
        let (ia, ib) = (a * kf, b * kf);
        let rescale = |st: GeodesicState<T>| GeodesicState { x: st.x, v: scale(st.v, span) };
        let mut knots: Vec<GeodesicState<T>> = if ia == ia.floor() && ib == ib.floor() && ib - ia >= T::one() {
            let (i0, i1) = (ia.to_usize().unwrap_or(0), ib.to_usize().unwrap_or(k));
            self.knots[i0..=i1].iter().map(|&st| rescale(st)).collect()
        } else {
            let n = (kf * span).ceil().to_usize().unwrap_or(1).max(2);
            let h = span / T::from_usize_lossy(n);
            let mut cur = self.state_at(m, a);
            let mut out = Vec::with_capacity(n + 1);
            out.push(rescale(cur));
            for i in 0..n {
                cur = integrate(m, cur, h, a + h * T::from_usize_lossy(i))?;
                out.push(rescale(cur));
            }
            out
        };
        let shift = sub(m.wrap(knots[0].x), knots[0].x);
        for st in &mut knots {
            st.x = add(st.x, shift);
        }
        Ok(Self::from_knots(m, knots))
    }

    /// Points at `n + 1` equally spaced parameters, in one integration pass.
    pub fn sample(&self, m: &ChartManifold<T>, n: usize) -> Vec<Point<T>> {
        if self.is_constant() {
            return vec![self.start; n + 1];
        }
        (0..=n).map(|i| self.point_at(m, T::from_usize_lossy(i) / T::from_usize_lossy(n))).collect()
    }

    /// The reversed segment from `end` to `start`.
    pub fn reversed(&self, m: &ChartManifold<T>) -> Self {
        let mut knots: Vec<_> = self
            .knots
            .iter()
            .rev()
            .map(|s| GeodesicState { x: s.x, v: [-s.v[0], -s.v[1]] })
            .collect();
        // re-anchor to the wrapped representative of the new start
        let shift = sub(m.wrap(knots[0].x), knots[0].x);
        for s in &mut knots {
            s.x = add(s.x, shift);
        }
        Self::from_knots(m, knots)
    }
}

/// Tolerance-scaled shooting: finds `v` with `exp_p(v) = p + delta`.
fn shoot<T: Real>(
    m: &ChartManifold<T>,
    p: Point<T>,
    delta: Point<T>,
) -> Result<Vec<GeodesicState<T>>, GeometryError> {
    let knots = m.integrator.knots;
    let target = add(p, delta);
    let scale_len = chart_norm(delta);
    let tol = (m.integrator.tolerance * scale_len.min(T::one()))
        .max(T::epsilon() * T::lit(64.0) * (chart_norm(p) + scale_len + T::one()));
    if m.is_flat() {
        return integrate_knots(m, GeodesicState { x: p, v: delta }, knots);
    }
    let gam = m.christoffel_at(p);
    // second order guess: x(1) ~ p + v - G(v, v) / 2
    let corr = contract(&gam, delta);
    let mut v = [delta[0] + corr[0] * T::half(), delta[1] + corr[1] * T::half()];
    // approximate Jacobian d exp / d v ~ I - G(v, .)
    let mut jac = approx_jacobian(&gam, v);
    let residual = |traj: &[GeodesicState<T>]| sub(traj.last().expect("knots").x, target);

    let mut traj = integrate_knots(m, GeodesicState { x: p, v }, knots)?;
    let mut r = residual(&traj);
    let mut rn = chart_norm(r);
    let mut fd_fresh = false;
    for _ in 0..m.integrator.max_newton {
        if rn <= tol {
            return Ok(traj);
        }
        let step = solve2(&jac, r).map(|d| [-d[0], -d[1]]);
        let mut accepted = None;
        if let Some(dv) = step {
            let mut lam = T::one();
            for _ in 0..12 {
                let cand = [v[0] + lam * dv[0], v[1] + lam * dv[1]];
                if let Ok(t2) = integrate_knots(m, GeodesicState { x: p, v: cand }, knots) {
                    let r2 = residual(&t2);
                    let n2 = chart_norm(r2);
                    if n2 < rn {
                        accepted = Some((cand, t2, r2, n2));
                        break;
                    }
                }
                lam = lam * T::half();
            }
        }
        match accepted {
            Some((cand, t2, r2, n2)) => {
                // Broyden rank-one update
                let dv = sub(cand, v);
                let dr = sub(r2, r);
                let jdv = [jac[0][0] * dv[0] + jac[0][1] * dv[1], jac[1][0] * dv[0] + jac[1][1] * dv[1]];
                let den = dv[0] * dv[0] + dv[1] * dv[1];
                if den > T::zero() {
                    for i in 0..2 {
                        for j in 0..2 {
                            jac[i][j] = jac[i][j] + (dr[i] - jdv[i]) * dv[j] / den;
                        }
                    }
                }
                v = cand;
                traj = t2;
                r = r2;
                rn = n2;
                fd_fresh = false;
            }
            None => {
                if fd_fresh {
                    break;
                }
                jac = fd_jacobian(m, p, v, knots)?;
                fd_fresh = true;
            }
        }
    }
    if rn <= tol {
        return Ok(traj);
    }
    Err(GeometryError::NoUniqueGeodesic(format!(
        "shooting did not converge (residual {:e})",
        rn.as_f64()
    )))
}

fn approx_jacobian<T: Real>(gam: &Christoffel<T>, v: Point<T>) -> [[T; 2]; 2] {
    let mut j = [[T::zero(); 2]; 2];
    for k in 0..2 {
        for c in 0..2 {
            let gv = gam[k][0][c] * v[0] + gam[k][1][c] * v[1];
            j[k][c] = if k == c { T::one() } else { T::zero() } - gv;
        }
    }
    j
}

fn fd_jacobian<T: Real>(
    m: &ChartManifold<T>,
    p: Point<T>,
    v: Point<T>,
    knots: usize,
) -> Result<[[T; 2]; 2], GeometryError> {
    let eps = T::lit(1e-6) * chart_norm(v).max(T::lit(1e-6));
    let mut j = [[T::zero(); 2]; 2];
    for c in 0..2 {
        let mut vp = v;
        let mut vm = v;
        vp[c] = vp[c] + eps;
        vm[c] = vm[c] - eps;
        let xp = integrate_knots(m, GeodesicState { x: p, v: vp }, knots)?.last().expect("knots").x;
        let xm = integrate_knots(m, GeodesicState { x: p, v: vm }, knots)?.last().expect("knots").x;
        for k in 0..2 {
            j[k][c] = (xp[k] - xm[k]) / (T::two() * eps);
        }
    }
    Ok(j)
}

fn solve2<T: Real>(a: &[[T; 2]; 2], b: Point<T>) -> Option<Point<T>> {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if d == T::zero() || !d.is_finite() {
        return None;
    }
    Some([(b[0] * a[1][1] - b[1] * a[0][1]) / d, (a[0][0] * b[1] - a[1][0] * b[0]) / d])
}

/// Solves for the minimizing segment from `p` to `q` whose length is at most `limit`.
fn segment_within<T: Real>(
    m: &ChartManifold<T>,
    p: Point<T>,
    q: Point<T>,
    limit: Option<T>,
) -> Result<GeodesicSegment<T>, GeometryError> {
    m.metric(p)?;
    m.metric(q)?;
    let delta = m.chart_difference(p, q);
    if delta[0] == T::zero() && delta[1] == T::zero() {
        return Ok(GeodesicSegment::constant(p));
    }
    if let Some(lim) = limit {
        // the chart estimate may overshoot the true distance by curvature effects
        if m.chart_distance(p, q) > lim * T::lit(1.5) {
            return Err(GeometryError::HorizonExceeded { horizon: lim.as_f64() });
        }
    }
    let knots = shoot(m, p, delta)?;
    let seg = GeodesicSegment::from_knots(m, knots);
    if let Some(lim) = limit {
        if seg.length > lim * (T::one() + T::lit(1e-9)) {
            return Err(GeometryError::HorizonExceeded { horizon: lim.as_f64() });
        }
    }
    Ok(seg)
}

/// Minimizing segment from `p` to `q` whose length stays within the convexity bound.
pub(crate) fn convex_segment<T: Real>(
    m: &ChartManifold<T>,
    p: Point<T>,
    q: Point<T>,
) -> Result<GeodesicSegment<T>, GeometryError> {
    let bound = m.conv_bound();
    match segment_within(m, p, q, Some(bound)) {
        Err(GeometryError::HorizonExceeded { .. }) => Err(GeometryError::NoUniqueGeodesic(format!(
            "points are not within the convexity bound {}",
            bound.as_f64()
        ))),
        r => r,
    }
}

/// Inverse of the exponential map within the convexity bound.
pub fn log_map<T: Real>(m: &ChartManifold<T>, p: Point<T>, q: Point<T>) -> Result<TangentVector<T>, GeometryError> {
    convex_segment(m, p, q).map(|seg| TangentVector::new(p, seg.initial_velocity.components))
}

/// Riemannian distance, searched up to the manifold's horizon.
pub fn distance<T: Real>(m: &ChartManifold<T>, p: Point<T>, q: Point<T>) -> Result<T, GeometryError> {
    if m.is_flat() {
        m.metric(p)?;
        m.metric(q)?;
        return Ok(chart_norm(m.chart_difference(p, q)));
    }
    segment_within(m, p, q, m.horizon).map(|s| s.length)
}

/// The unique minimizing constant speed geodesic from `p` to `q`.
pub fn minimizing_segment<T: Real>(
    m: &ChartManifold<T>,
    p: Point<T>,
    q: Point<T>,
) -> Result<GeodesicSegment<T>, GeometryError> {
    segment_within(m, p, q, m.horizon)
}

/// Point `t` of the way along the minimizing geodesic from `p` to `q`.
pub fn geodesic_interpolate<T: Real>(
    m: &ChartManifold<T>,
    p: Point<T>,
    q: Point<T>,
    t: T,
) -> Result<Point<T>, GeometryError> {
    if t <= T::zero() {
        return Ok(p);
    }
    if t >= T::one() {
        return Ok(q);
    }
    Ok(minimizing_segment(m, p, q)?.point_at(m, t))
}

/// Metric inner product of two chart vectors at `p`.
pub fn inner<T: Real>(m: &ChartManifold<T>, p: Point<T>, u: Point<T>, v: Point<T>) -> T {
    quad_form(&m.metric_at(p), u, v)
}
