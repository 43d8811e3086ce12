//! Scalar abstraction shared by the geometric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar used by the geometry, loop and flow code: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A chart point on a two-dimensional chart.
pub type Point<T> = [T; 2];

/// Symmetric 2x2 matrix of metric coefficients.
pub type Mat2<T> = [[T; 2]; 2];

#[inline]
pub(crate) fn add<T: Real>(a: Point<T>, b: Point<T>) -> Point<T> {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub(crate) fn sub<T: Real>(a: Point<T>, b: Point<T>) -> Point<T> {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn scale<T: Real>(a: Point<T>, s: T) -> Point<T> {
    [a[0] * s, a[1] * s]
}

#[inline]
pub(crate) fn chart_norm<T: Real>(a: Point<T>) -> T {
    a[0].hypot(a[1])
}

#[inline]
pub(crate) fn quad_form<T: Real>(g: &Mat2<T>, u: Point<T>, v: Point<T>) -> T {
    g[0][0] * u[0] * v[0] + g[0][1] * (u[0] * v[1] + u[1] * v[0]) + g[1][1] * u[1] * v[1]
}

#[inline]
pub(crate) fn det<T: Real>(g: &Mat2<T>) -> T {
    g[0][0] * g[1][1] - g[0][1] * g[1][0]
}

#[inline]
pub(crate) fn inverse<T: Real>(g: &Mat2<T>) -> Mat2<T> {
    let d = det(g);
    [[g[1][1] / d, -g[0][1] / d], [-g[1][0] / d, g[0][0] / d]]
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
pub(crate) fn sym_eigenvalues<T: Real>(g: &Mat2<T>) -> (T, T) {
    let tr = g[0][0] + g[1][1];
    let diff = g[0][0] - g[1][1];
    let off = g[0][1];
    let disc = (diff * diff * T::lit(0.25) + off * off).sqrt();
    let mid = tr * T::half();
    (mid - disc, mid + disc)
}
