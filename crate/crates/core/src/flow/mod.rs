//! The Birkhoff curve shortening map, its homotopy to the identity and iteration.

mod iterate;
mod params;
mod step;

pub use iterate::{geodesic_residual, iterate_flow, iterate_flow_observed, Classification, FlowResult, StopRule};
pub use params::{validate_params, BirkhoffParams, RegionBounds};
pub use step::{birkhoff_stages, birkhoff_step, const_speed, even_replace, homotopy_phi, odd_replace};

#[cfg(test)]
mod tests;
