//! Scenario configuration files.

use std::path::Path;

use geoloop::geometry::ManifoldSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    MinmaxSweep,
    MinimizeInClass,
    SingleFlow,
    RegionAudit,
    GroupAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Band { half_width: f64 },
    Ball { center: [f64; 2], radius: f64 },
    BallComplement { center: [f64; 2], radius: f64 },
    Cap { colatitude: f64 },
}

// flattened shapes cannot be combined with deny_unknown_fields
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    #[serde(flatten)]
    pub shape: ShapeSpec,
    pub eta: f64,
    pub lambda_cap: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

/// Analytic loop generators. `points` defaults to the `2L` grid of the resolved params.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopSpec {
    /// Coordinate `axis` held at `level`, the other axis swept once.
    Parallel {
        level: f64,
        #[serde(default)]
        axis: usize,
        #[serde(default)]
        points: Option<usize>,
    },
    /// A parallel with every odd breakpoint pushed by `amplitude`.
    Zigzag {
        level: f64,
        amplitude: f64,
        #[serde(default)]
        axis: usize,
        #[serde(default)]
        points: Option<usize>,
    },
    /// Chart circle, optionally modulated by `1 + wobble sin 3a`.
    Circle {
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        wobble: f64,
        #[serde(default)]
        points: Option<usize>,
    },
    Points { points: Vec<[f64; 2]> },
    /// Two-column CSV with header `x,y`.
    Csv { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Parallels across the whole `axis` range; the two ends are point loops when the
    /// chart closes up there (sphere, ellipsoid).
    ParallelSweep {
        members: usize,
        #[serde(default)]
        axis: usize,
    },
    /// Chart circles of radius `max_radius sin(pi t)` about `center`.
    Concentric { center: [f64; 2], max_radius: f64, members: usize },
    /// Explicit members; `sweepout` flags both ends as boundary.
    Loops {
        loops: Vec<LoopSpec>,
        #[serde(default = "yes")]
        sweepout: bool,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub radius: f64,
    /// Defaults to the smallest admissible `L`.
    #[serde(default)]
    pub segments: Option<usize>,
    /// Defaults to `(1.05 max l)^2` over the initial loops.
    #[serde(default)]
    pub energy_cap: Option<f64>,
    #[serde(default)]
    pub assume_valid: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopSpec {
    #[serde(default)]
    pub relative_decrement: Option<f64>,
    #[serde(default)]
    pub residual_tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub collapse_width: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    /// Defaults to the region's `rho`.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default)]
    pub max_order: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub manifold: Option<ManifoldSpec>,
    /// RK4 step of the geodesic integrator; the manifold default when absent.
    #[serde(default)]
    pub integrator_step: Option<f64>,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub initial_loop: Option<LoopSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub params: Option<ParamsSpec>,
    #[serde(default)]
    pub stop: StopSpec,
    #[serde(default)]
    pub audit: AuditSpec,
    #[serde(default)]
    pub groups: GroupSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        // unknown manifold names surface here through the tagged enum
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::config("parse_config", e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(
                "parse_config",
                format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("read_config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub(crate) fn require<'a, X>(&self, field: &'a Option<X>, name: &str) -> Result<&'a X, CliError> {
        field.as_ref().ok_or_else(|| CliError::config("validate_config", format!("{:?} needs `{name}`", self.scenario)))
    }
}
