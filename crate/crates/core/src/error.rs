use thiserror::Error;

/// Failures raised by the geometry oracle.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("chart point ({0}, {1}) lies outside the chart domain")]
    OutsideDomain(f64, f64),
    #[error("geodesic left the chart domain at parameter {parameter}")]
    Escape { parameter: f64 },
    #[error("no unique minimizing geodesic: {0}")]
    NoUniqueGeodesic(String),
    #[error("distance exceeds the search horizon {horizon}")]
    HorizonExceeded { horizon: f64 },
}

/// Failures raised by loop construction and loop functionals.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LoopError {
    #[error("sample spacing too coarse at index {index}; refine the sampling")]
    RefinementNeeded { index: usize },
    #[error("loops have {left} and {right} breakpoints; resample to a common count")]
    ResampleNeeded { left: usize, right: usize },
    #[error("a loop needs at least one breakpoint")]
    Empty,
    #[error("breakpoint parameters must increase strictly from 0 within [0, 1)")]
    BadParameters,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One violated clause of the flow parameter constraints.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum ParamViolation {
    RadiusNotPositive { radius: f64 },
    RadiusVsConvexity { radius: f64, bound: f64 },
    RadiusVsInjectivity { radius: f64, bound: f64 },
    SegmentsVsEnergyRatio { segments: usize, required: f64 },
    SegmentsVsSqrtEnergy { segments: usize, required: f64 },
    RadiusVsRegionAlpha { radius: f64, bound: f64 },
    RadiusVsRegionRho { radius: f64, bound: f64 },
    EnergyNotPositive { energy: f64 },
}

impl std::fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::RadiusNotPositive { radius } => write!(f, "R = {radius} must be positive"),
            Self::RadiusVsConvexity { radius, bound } => {
                write!(f, "R = {radius} must be below half the convexity bound ({bound})")
            }
            Self::RadiusVsInjectivity { radius, bound } => {
                write!(f, "R = {radius} must be below a quarter of the injectivity floor ({bound})")
            }
            Self::SegmentsVsEnergyRatio { segments, required } => {
                write!(f, "L = {segments} must be at least E/R^2 = {required}")
            }
            Self::SegmentsVsSqrtEnergy { segments, required } => {
                write!(f, "L = {segments} must be at least sqrt(E) = {required}")
            }
            Self::RadiusVsRegionAlpha { radius, bound } => {
                write!(f, "R = {radius} must be below alpha/4 = {bound}")
            }
            Self::RadiusVsRegionRho { radius, bound } => {
                write!(f, "R = {radius} must be below rho/2 = {bound}")
            }
            Self::EnergyNotPositive { energy } => write!(f, "E = {energy} must be positive"),
        }
    }
}

/// Failures raised by the curve shortening map and its drivers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FlowError {
    #[error("invalid flow parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidParams(Vec<ParamViolation>),
    #[error("{op} refused the flow step: {reason}")]
    StepRefused { op: &'static str, reason: String },
    #[error("loop energy {energy} exceeds the cap {cap}")]
    EnergyCapExceeded { energy: f64, cap: f64 },
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Failures raised by the concave-region machinery and scenario drivers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum DomainError {
    #[error("contraction refused: loop length {length} is not below the convexity bound {bound}")]
    ContractionRefused { length: f64, bound: f64 },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("loop escaped the working region at iteration {iteration}")]
    Escape { iteration: usize },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Failures raised by the finite group algebra.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("group order {0} exceeds the table cap")]
    TooLarge(usize),
    #[error("element subset is not a subgroup")]
    NotASubgroup,
    #[error("map is not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("not a split short exact sequence: {0}")]
    NotSplit(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported field size q = {0}")]
    UnsupportedField(u32),
}
