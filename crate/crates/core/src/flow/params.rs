use serde::Serialize;

use crate::error::{FlowError, ParamViolation};
use crate::geometry::ChartManifold;
use crate::scalar::Real;

/// Energy cap `E`, step radius `R` and segment count `L` of the shortening map.
/// Loops in normal form carry `2L` breakpoints on the grid `i / 2L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BirkhoffParams<T> {
    pub energy_cap: T,
    pub radius: T,
    pub segments: usize,
}

/// Bounds contributed by an active concave region: `alpha` (convexity radius over
/// the collar) and the convexity modulus `rho` of the complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionBounds<T> {
    pub alpha: T,
    pub rho: T,
}

impl<T: Real> BirkhoffParams<T> {
    /// Breakpoint count `2L`.
    pub fn grid_size(&self) -> usize {
        2 * self.segments
    }

    /// Skips validation. Used when a caller deliberately works outside the
    /// energy clause, e.g. with a fixed segment count.
    pub fn assume_valid(energy_cap: T, radius: T, segments: usize) -> Self {
        Self { energy_cap, radius, segments }
    }

    /// Smallest admissible `L` for the given `E` and `R`.
    pub fn min_segments(energy_cap: T, radius: T) -> usize {
        let need = (energy_cap / (radius * radius)).max(energy_cap.sqrt());
        need.ceil().to_usize().unwrap_or(usize::MAX).max(1)
    }
}

/// Checks every clause separately and reports all violations at once.
pub fn validate_params<T: Real>(
    energy_cap: T,
    radius: T,
    segments: usize,
    m: &ChartManifold<T>,
    region: Option<RegionBounds<T>>,
) -> Result<BirkhoffParams<T>, FlowError> {
    let mut bad = Vec::new();
    let (e, r) = (energy_cap.as_f64(), radius.as_f64());
    if !(energy_cap > T::zero()) {
        bad.push(ParamViolation::EnergyNotPositive { energy: e });
    }
    if !(radius > T::zero()) {
        bad.push(ParamViolation::RadiusNotPositive { radius: r });
    }
    let conv = m.conv_bound() * T::half();
    if radius >= conv {
        bad.push(ParamViolation::RadiusVsConvexity { radius: r, bound: conv.as_f64() });
    }
    let inj = m.injectivity_floor / T::lit(4.0);
    if radius >= inj {
        bad.push(ParamViolation::RadiusVsInjectivity { radius: r, bound: inj.as_f64() });
    }
    let l = T::from_usize_lossy(segments);
    if radius > T::zero() {
        let need = energy_cap / (radius * radius);
        if l < need {
            bad.push(ParamViolation::SegmentsVsEnergyRatio { segments, required: need.as_f64() });
        }
    }
    if energy_cap > T::zero() && l < energy_cap.sqrt() {
        bad.push(ParamViolation::SegmentsVsSqrtEnergy { segments, required: energy_cap.sqrt().as_f64() });
    }
    if let Some(b) = region {
        let a4 = b.alpha / T::lit(4.0);
        if radius >= a4 {
            bad.push(ParamViolation::RadiusVsRegionAlpha { radius: r, bound: a4.as_f64() });
        }
        let r2 = b.rho * T::half();
        if radius >= r2 {
            bad.push(ParamViolation::RadiusVsRegionRho { radius: r, bound: r2.as_f64() });
        }
    }
    if bad.is_empty() {
        Ok(BirkhoffParams { energy_cap, radius, segments })
    } else {
        Err(FlowError::InvalidParams(bad))
    }
}
