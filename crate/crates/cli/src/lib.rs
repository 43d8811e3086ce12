//! Scenario runner: JSON configs in, JSON reports, loop CSVs and SVG traces out.

pub mod config;
pub mod error;
pub mod run;
pub mod svg;

pub use config::{ScenarioConfig, ScenarioKind, SCHEMA_VERSION};
pub use error::CliError;
pub use run::{execute, run, write_outputs, Outcome, RunOptions, RunOutput, RunReport};
pub use svg::{render_svg, SampledField, Scene, SceneLoop, SvgStyle};
