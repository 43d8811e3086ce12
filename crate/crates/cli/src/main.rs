use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geoloop::geometry::MANIFOLD_NAMES;
use geoloop::group::{audit_groups, CATALOG_MAX_ORDER};
use geoloop_cli::{run, Outcome, RunOptions};

#[derive(Parser)]
#[command(name = "geoloop", version, about = "Closed geodesics by curve shortening, and finite-group audits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the scenario in a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write scene.svg.
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
    },
    /// Audit every group up to the given order and print the report as JSON.
    AuditGroups {
        #[arg(long = "max-order", default_value_t = 24)]
        max_order: usize,
    },
    /// List the built-in manifolds.
    ListManifolds,
}

fn headline(o: &Outcome) -> String {
    match o {
        Outcome::SingleFlow { flow, .. } => {
            format!("{:?} after {} iterations, length {:.9}", flow.classification, flow.iterations, flow.final_length)
        }
        Outcome::MinimizeInClass { flow, trapped_throughout, witness_iteration, .. } => format!(
            "{:?} after {} iterations, length {:.9}, trapped throughout: {trapped_throughout}, witness: {witness_iteration:?}",
            flow.classification, flow.iterations, flow.final_length
        ),
        Outcome::MinmaxSweep { status, iterations, width, critical, .. } => format!(
            "{status:?} after {iterations} iterations, width {width:.9}, critical member {} (residual {:.2e})",
            critical.index, critical.residual
        ),
        Outcome::RegionAudit { audit, .. } => format!(
            "{} pairs at delta {}, {} violations, passed: {}",
            audit.pairs_checked,
            audit.delta,
            audit.violations.len(),
            audit.passed
        ),
        Outcome::GroupAudit { report } => {
            format!("{} groups, {} pairs, passed: {}", report.groups.len(), report.pairs, report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { config, out, svg, seed, max_iter } => {
            match run(&config, &RunOptions { out, svg, seed, max_iter }) {
                Ok((res, dir)) => {
                    println!("{}", headline(&res.report.outcome));
                    println!("wrote {}", dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Cmd::AuditGroups { max_order } => {
            if max_order == 0 || max_order > CATALOG_MAX_ORDER {
                eprintln!("error: audit_groups: max-order must lie in 1..={CATALOG_MAX_ORDER}");
                return ExitCode::from(2);
            }
            let rep = audit_groups(max_order);
            match serde_json::to_string_pretty(&rep) {
                Ok(s) => {
                    println!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: audit_groups: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Cmd::ListManifolds => {
            for (name, what) in MANIFOLD_NAMES {
                println!("{name:<16} {what}");
            }
            ExitCode::SUCCESS
        }
    }
}
