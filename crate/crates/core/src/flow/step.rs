use super::params::BirkhoffParams;
use crate::error::FlowError;
use crate::geometry::geodesic::convex_segment;
use crate::geometry::{ChartManifold, GeodesicSegment};
use crate::loops::{loop_energy, DiscreteLoop};
use crate::scalar::{det, quad_form, Point, Real};

/// Corners turning less than this (radians) are not kept as breakpoints by [`const_speed`].
const CORNER_TOL: f64 = 1e-8;

fn solve<T: Real>(
    m: &ChartManifold<T>,
    op: &'static str,
    p: Point<T>,
    q: Point<T>,
) -> Result<GeodesicSegment<T>, FlowError> {
    convex_segment(m, p, q).map_err(|e| FlowError::StepRefused { op, reason: e.to_string() })
}

fn halves<T: Real>(
    m: &ChartManifold<T>,
    seg: &GeodesicSegment<T>,
) -> Result<(GeodesicSegment<T>, GeodesicSegment<T>), FlowError> {
    Ok((seg.sub_segment(m, T::zero(), T::half())?, seg.sub_segment(m, T::half(), T::one())?))
}

fn grid<T: Real>(n: usize) -> Vec<T> {
    (0..n).map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(n)).collect()
}

/// Keeps the points at even grid parameters and joins them by minimizing segments,
/// split at their midpoints so the result again has `2L` breakpoints on the grid.
pub fn even_replace<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    p: &BirkhoffParams<T>,
) -> Result<DiscreteLoop<T>, FlowError> {
    let n = p.grid_size();
    let x = grid::<T>(n);
    let anchors: Vec<_> = (0..p.segments).map(|i| g.point_at(m, x[2 * i])).collect();
    let mut segs = Vec::with_capacity(n);
    for i in 0..p.segments {
        let s = solve(m, "even_replace", anchors[i], anchors[(i + 1) % p.segments])?;
        let (a, b) = halves(m, &s)?;
        segs.push(a);
        segs.push(b);
    }
    Ok(DiscreteLoop::from_segments(x, segs))
}

/// Same as [`even_replace`] with the odd grid points as anchors; the arc through
/// parameter 0 joins `x_{2L-1}` to `x_1`.
pub fn odd_replace<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    p: &BirkhoffParams<T>,
) -> Result<DiscreteLoop<T>, FlowError> {
    let n = p.grid_size();
    let l = p.segments;
    let x = grid::<T>(n);
    let anchors: Vec<_> = (0..l).map(|i| g.point_at(m, x[2 * i + 1])).collect();
    let mut first = Vec::with_capacity(l);
    let mut second = Vec::with_capacity(l);
    for i in 0..l {
        let s = solve(m, "odd_replace", anchors[i], anchors[(i + 1) % l])?;
        let (a, b) = halves(m, &s)?;
        first.push(a);
        second.push(b);
    }
    let mut segs = Vec::with_capacity(n);
    segs.push(second[l - 1].clone());
    for i in 0..l {
        segs.push(first[i].clone());
        if i + 1 < l {
            segs.push(second[i].clone());
        }
    }
    Ok(DiscreteLoop::from_segments(x, segs))
}

/// Turning angle at breakpoint `j`, in radians.
pub(crate) fn corner_angle<T: Real>(m: &ChartManifold<T>, g: &DiscreteLoop<T>, j: usize) -> T {
    let n = g.len();
    let segs = g.segments();
    let (inc, out) = (&segs[(j + n - 1) % n], &segs[j]);
    if inc.is_constant() || out.is_constant() {
        return T::zero();
    }
    let gm = m.metric_at(g.breakpoints()[j]);
    let (u, v) = (inc.end_velocity, out.initial_velocity.components);
    let cross = det(&gm).sqrt() * (u[0] * v[1] - u[1] * v[0]);
    cross.abs().atan2(quad_form(&gm, u, v))
}

/// Cumulative arc length at each breakpoint, and the total.
fn arc_table<T: Real>(g: &DiscreteLoop<T>) -> (Vec<T>, T) {
    let mut cum = Vec::with_capacity(g.len());
    let mut acc = T::zero();
    for s in g.segments() {
        cum.push(acc);
        acc = acc + s.length;
    }
    (cum, acc)
}

/// Monotone reparametrization of `g` with `g(new x_k) = g at arc fraction y[k]` on the
/// grid `x_k = k / n` (`y[0] = 0`), linear in between. Corners of `g` stay breakpoints,
/// so the image and the length are unchanged.
pub(crate) fn reparametrize<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    y: &[T],
) -> Result<DiscreteLoop<T>, FlowError> {
    let n = y.len();
    let (cum, total) = arc_table(g);
    if total == T::zero() {
        return Ok(DiscreteLoop::constant(g.breakpoints()[0], n));
    }
    let eps = total * T::lit(1e-12);
    let arcs: Vec<T> = y.iter().map(|&f| f * total).collect();
    let nf = T::from_usize_lossy(n);
    // (arc position, new parameter)
    let mut nodes: Vec<(T, T)> = arcs.iter().enumerate().map(|(k, &a)| (a, T::from_usize_lossy(k) / nf)).collect();
    let tol = T::lit(CORNER_TOL);
    for (j, &c) in cum.iter().enumerate() {
        if c <= eps || total - c <= eps || corner_angle(m, g, j) <= tol {
            continue;
        }
        let k = arcs.partition_point(|&a| a <= c) - 1;
        let next = if k + 1 < n { arcs[k + 1] } else { total };
        if c - arcs[k] <= eps || next - c <= eps {
            continue;
        }
        let x = (T::from_usize_lossy(k) + (c - arcs[k]) / (next - arcs[k])) / nf;
        nodes.push((c, x));
    }
    nodes.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite parameter"));

    let segs = g.segments();
    let live: Vec<usize> = (0..segs.len()).filter(|&j| !segs[j].is_constant()).collect();
    let seg_start = |a: T| -> usize {
        // last non-degenerate segment starting at or before `a`
        let mut best = live[0];
        for &j in &live {
            if cum[j] <= a + eps {
                best = j;
            }
        }
        best
    };
    let seg_end = |b: T| -> usize {
        for &j in &live {
            if cum[j] + segs[j].length >= b - eps {
                return j;
            }
        }
        *live.last().expect("live segment")
    };
    let local = |j: usize, a: T| ((a - cum[j]) / segs[j].length).max(T::zero()).min(T::one());

    let mut out = Vec::with_capacity(nodes.len());
    for i in 0..nodes.len() {
        let a = nodes[i].0;
        let b = if i + 1 < nodes.len() { nodes[i + 1].0 } else { total };
        let (js, je) = (seg_start(a), seg_end(b));
        let piece = if b - a <= eps {
            GeodesicSegment::constant(segs[js].point_at(m, local(js, a)))
        } else if js == je {
            segs[js].sub_segment(m, local(js, a), local(js, b))?
        } else {
            let (pa, pb) = (segs[js].point_at(m, local(js, a)), segs[je].point_at(m, local(je, b)));
            solve(m, "const_speed", pa, pb)?
        };
        out.push(piece);
    }
    Ok(DiscreteLoop::from_segments(nodes.iter().map(|n| n.1).collect(), out))
}

/// Constant speed reparametrization with `n` grid points at equal arc length,
/// keeping `g(0)` and the corners of `g`.
pub fn const_speed<T: Real>(m: &ChartManifold<T>, g: &DiscreteLoop<T>, n: usize) -> Result<DiscreteLoop<T>, FlowError> {
    reparametrize(m, g, &grid::<T>(n))
}

/// The three stages `(gamma_e, gamma_o, Psi(gamma))` of one shortening step.
pub fn birkhoff_stages<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    p: &BirkhoffParams<T>,
) -> Result<(DiscreteLoop<T>, DiscreteLoop<T>, DiscreteLoop<T>), FlowError> {
    let energy = loop_energy(g);
    if energy > p.energy_cap * (T::one() + T::lit(1e-9)) {
        return Err(FlowError::EnergyCapExceeded { energy: energy.as_f64(), cap: p.energy_cap.as_f64() });
    }
    let ge = even_replace(m, g, p)?;
    let go = odd_replace(m, &ge, p)?;
    let gt = const_speed(m, &go, p.grid_size())?;
    Ok((ge, go, gt))
}

/// One step of the shortening map: even replacement, odd replacement, then
/// constant speed reparametrization.
pub fn birkhoff_step<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    p: &BirkhoffParams<T>,
) -> Result<DiscreteLoop<T>, FlowError> {
    birkhoff_stages(m, g, p).map(|s| s.2)
}

/// Loop through `H(a(x), b(x))(t)` at the parameters `xs`.
fn blend<T: Real>(
    m: &ChartManifold<T>,
    a: &DiscreteLoop<T>,
    b: &DiscreteLoop<T>,
    xs: Vec<T>,
    t: T,
) -> Result<DiscreteLoop<T>, FlowError> {
    let mut pts = Vec::with_capacity(xs.len());
    for &x in &xs {
        let (p, q) = (a.point_at(m, x), b.point_at(m, x));
        let pt = if t == T::zero() || p == q {
            p
        } else {
            solve(m, "homotopy_phi", p, q)?.point_at(m, t)
        };
        pts.push(pt);
    }
    DiscreteLoop::with_params(m, &pts, xs).map_err(|e| FlowError::StepRefused { op: "homotopy_phi", reason: e.to_string() })
}

/// The homotopy from `gamma` (s = 0) to the shortening step (s = 1). On `[0, 1/2]`
/// points move along minimizing geodesics toward the even replacement; on `[1/2, 3/4]`
/// toward the odd replacement; on `[3/4, 1]` the parametrization is blended into
/// constant speed.
pub fn homotopy_phi<T: Real>(
    m: &ChartManifold<T>,
    g: &DiscreteLoop<T>,
    s: T,
    p: &BirkhoffParams<T>,
) -> Result<DiscreteLoop<T>, FlowError> {
    let s = s.max(T::zero()).min(T::one());
    if s == T::zero() {
        return Ok(g.clone());
    }
    let energy = loop_energy(g);
    if energy > p.energy_cap * (T::one() + T::lit(1e-9)) {
        return Err(FlowError::EnergyCapExceeded { energy: energy.as_f64(), cap: p.energy_cap.as_f64() });
    }
    let n = p.grid_size();
    let ge = even_replace(m, g, p)?;
    if s <= T::half() {
        let mut xs = grid::<T>(n);
        xs.extend_from_slice(g.params());
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite parameter"));
        xs.dedup();
        return blend(m, g, &ge, xs, T::two() * s);
    }
    let u = T::two() * s - T::one();
    let go = odd_replace(m, &ge, p)?;
    if u <= T::half() {
        return blend(m, &ge, &go, grid(n), T::two() * u);
    }
    let (cum, total) = arc_table(&go);
    let x = grid::<T>(n);
    let y: Vec<T> = if total == T::zero() {
        x.clone()
    } else {
        let w = T::two() - T::two() * u;
        let v = T::two() * u - T::one();
        (0..n).map(|k| w * cum[k] / total + v * x[k]).collect()
    };
    reparametrize(m, &go, &y)
}
