use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::ChartManifold;
use crate::scalar::{Point, Real};

/// Unsigned-to-signed distance field on a cell-centred chart grid, computed by fast
/// marching with the diagonal part of the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceGrid<T> {
    lo: Point<T>,
    step: Point<T>,
    n: [usize; 2],
    periodic: [bool; 2],
    values: Vec<f64>,
}

#[derive(PartialEq)]
struct Node(f64, usize);

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // min-heap on distance
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl<T: Real> DistanceGrid<T> {
    /// Signed distance to the boundary of `{inside}` (negative inside) over the chart
    /// domain, with `n x n` cells.
    pub fn fast_marching(m: &ChartManifold<T>, inside: &dyn Fn(Point<T>) -> bool, n: usize) -> Self {
        let n = [n.max(4), n.max(4)];
        let lo = [m.domain[0].0, m.domain[1].0];
        let step = [
            (m.domain[0].1 - m.domain[0].0) / T::from_usize_lossy(n[0]),
            (m.domain[1].1 - m.domain[1].0) / T::from_usize_lossy(n[1]),
        ];
        let periodic = [m.periods[0].is_some(), m.periods[1].is_some()];
        let mut grid = Self { lo, step, n, periodic, values: vec![f64::INFINITY; n[0] * n[1]] };
        let total = n[0] * n[1];
        let centres: Vec<Point<T>> = (0..total).map(|i| grid.centre(i)).collect();
        let centre = |idx: usize| centres[idx];
        let flags: Vec<bool> = (0..total).map(|i| inside(centre(i))).collect();
        // metric length of one cell edge along each axis
        let edges: Vec<[f64; 2]> = (0..total)
            .map(|i| {
                let g = m.metric_at(centre(i));
                [(step[0] * g[0][0].sqrt()).as_f64(), (step[1] * g[1][1].sqrt()).as_f64()]
            })
            .collect();

        let mut accepted = vec![false; total];
        let mut heap = BinaryHeap::new();
        for i in 0..total {
            for (axis, j) in grid.neighbours(i) {
                if flags[i] == flags[j] || j < i {
                    continue;
                }
                // locate the crossing on the edge by bisection
                let (a, b) = (centre(i), grid.unwrapped_neighbour(i, axis, j));
                let (mut t0, mut t1) = (0.0f64, 1.0f64);
                for _ in 0..24 {
                    let mid = 0.5 * (t0 + t1);
                    let p = [
                        a[0] + (b[0] - a[0]) * T::lit(mid),
                        a[1] + (b[1] - a[1]) * T::lit(mid),
                    ];
                    if inside(m.wrap(p)) == flags[i] {
                        t0 = mid;
                    } else {
                        t1 = mid;
                    }
                }
                let t = 0.5 * (t0 + t1);
                let len = 0.5 * (edges[i][axis] + edges[j][axis]);
                let (di, dj) = (t * len, (1.0 - t) * len);
                if di < grid.values[i] {
                    grid.values[i] = di;
                }
                if dj < grid.values[j] {
                    grid.values[j] = dj;
                }
            }
        }
        for i in 0..total {
            if grid.values[i].is_finite() {
                heap.push(Node(grid.values[i], i));
            }
        }
        while let Some(Node(d, i)) = heap.pop() {
            if accepted[i] || d > grid.values[i] {
                continue;
            }
            accepted[i] = true;
            for (_, j) in grid.neighbours(i) {
                if accepted[j] {
                    continue;
                }
                let cand = grid.eikonal(j, &edges[j], &accepted);
                if cand < grid.values[j] {
                    grid.values[j] = cand;
                    heap.push(Node(cand, j));
                }
            }
        }
        for i in 0..total {
            if flags[i] {
                grid.values[i] = -grid.values[i];
            }
        }
        grid
    }

    fn centre(&self, idx: usize) -> Point<T> {
        let (i, j) = (idx % self.n[0], idx / self.n[0]);
        [
            self.lo[0] + self.step[0] * (T::from_usize_lossy(i) + T::half()),
            self.lo[1] + self.step[1] * (T::from_usize_lossy(j) + T::half()),
        ]
    }

    /// Centre of neighbour `j` of `i` along `axis`, unwrapped across periodic seams.
    fn unwrapped_neighbour(&self, i: usize, axis: usize, j: usize) -> Point<T> {
        let a = self.centre(i);
        let mut b = self.centre(j);
        let span = self.step[axis] * T::from_usize_lossy(self.n[axis]);
        let d = b[axis] - a[axis];
        if d > self.step[axis] * T::lit(1.5) {
            b[axis] = b[axis] - span;
        } else if d < -self.step[axis] * T::lit(1.5) {
            b[axis] = b[axis] + span;
        }
        b
    }

    fn neighbours(&self, idx: usize) -> Vec<(usize, usize)> {
        let (i, j) = (idx % self.n[0], idx / self.n[0]);
        let mut out = Vec::with_capacity(4);
        let [nx, ny] = self.n;
        if i > 0 {
            out.push((0, idx - 1));
        } else if self.periodic[0] {
            out.push((0, idx + nx - 1));
        }
        if i + 1 < nx {
            out.push((0, idx + 1));
        } else if self.periodic[0] {
            out.push((0, idx + 1 - nx));
        }
        if j > 0 {
            out.push((1, idx - nx));
        } else if self.periodic[1] {
            out.push((1, idx + nx * (ny - 1)));
        }
        if j + 1 < ny {
            out.push((1, idx + nx));
        } else if self.periodic[1] {
            out.push((1, i));
        }
        out
    }

    fn eikonal(&self, idx: usize, edge: &[f64; 2], accepted: &[bool]) -> f64 {
        let mut best = [f64::INFINITY; 2];
        for (axis, j) in self.neighbours(idx) {
            if accepted[j] {
                best[axis] = best[axis].min(self.values[j]);
            }
        }
        let [a, b] = *edge;
        let [tx, ty] = best;
        let one_sided = (tx + a).min(ty + b);
        if !tx.is_finite() || !ty.is_finite() {
            return one_sided;
        }
        let (ia, ib) = (1.0 / (a * a), 1.0 / (b * b));
        let qa = ia + ib;
        let qb = -2.0 * (tx * ia + ty * ib);
        let qc = tx * tx * ia + ty * ty * ib - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return one_sided;
        }
        let t = (-qb + disc.sqrt()) / (2.0 * qa);
        if t >= tx.max(ty) {
            t.min(one_sided)
        } else {
            one_sided
        }
    }

    fn value(&self, i: isize, j: isize) -> f64 {
        let wrap = |k: isize, n: usize, per: bool| -> usize {
            if per {
                k.rem_euclid(n as isize) as usize
            } else {
                k.clamp(0, n as isize - 1) as usize
            }
        };
        let (i, j) = (wrap(i, self.n[0], self.periodic[0]), wrap(j, self.n[1], self.periodic[1]));
        self.values[j * self.n[0] + i]
    }

    /// Bilinear interpolation of the signed distance.
    pub fn eval(&self, p: Point<T>) -> T {
        let u = ((p[0] - self.lo[0]) / self.step[0] - T::half()).as_f64();
        let v = ((p[1] - self.lo[1]) / self.step[1] - T::half()).as_f64();
        let (i, j) = (u.floor(), v.floor());
        let (fu, fv) = (u - i, v - j);
        let (i, j) = (i as isize, j as isize);
        let d = self.value(i, j) * (1.0 - fu) * (1.0 - fv)
            + self.value(i + 1, j) * fu * (1.0 - fv)
            + self.value(i, j + 1) * (1.0 - fu) * fv
            + self.value(i + 1, j + 1) * fu * fv;
        T::lit(d)
    }

    /// Chart size of a cell.
    pub fn cell(&self) -> Point<T> {
        self.step
    }
}
