//! Closed geodesics by discrete curve shortening on chart-described surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: metric, Christoffel symbols, exponential/log maps.
//! * [`loops`]: piecewise geodesic loops, length, energy and length measures.
//! * [`flow`]: the Birkhoff curve shortening map, its homotopy and iteration.
//! * [`domain`]: concave regions, collars, family flows and scenario drivers.
//! * [`group`]: finite group audits of conjugate-union coverage and related facts.
//!
//! Geometric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod domain;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod group;
pub mod loops;
mod par;
pub mod scalar;

pub use error::{DomainError, FlowError, GeometryError, GroupError, LoopError, ParamViolation};
pub use scalar::{Point, Real};

pub type ChartManifold = geometry::ChartManifold<f64>;
pub type TangentVector = geometry::TangentVector<f64>;
pub type GeodesicSegment = geometry::GeodesicSegment<f64>;
pub type DiscreteLoop = loops::DiscreteLoop<f64>;
pub type BirkhoffParams = flow::BirkhoffParams<f64>;
pub type FlowResult = flow::FlowResult<f64>;
pub type ConcaveRegion = domain::ConcaveRegion<f64>;
pub type LoopFamily = domain::LoopFamily<f64>;
