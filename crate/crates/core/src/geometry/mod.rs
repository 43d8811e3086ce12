//! Riemannian geometry oracle on a single chart: metric, Christoffel symbols,
//! exponential and logarithm maps, distances and minimizing segments.

pub(crate) mod geodesic;
mod manifold;
mod registry;

pub use geodesic::{
    distance, exp_map, geodesic_interpolate, inner, log_map, minimizing_segment, GeodesicSegment, GeodesicState,
    TangentVector,
};
pub use manifold::{ChartManifold, Christoffel, CubicSpline, IntegratorConfig, MetricFn, MetricKind, Profile};
pub use registry::{ManifoldSpec, ProfileSpec, MANIFOLD_NAMES};
