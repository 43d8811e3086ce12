//! Concave regions and their collars, the cut-off family flow, and the two scenario
//! drivers (sweepout min-max and free homotopy class minimization).

mod drivers;
mod family;
mod grid;
mod region;

pub use drivers::{minimize_in_class, minmax_sweep, ClassMinimization, HomotopyWitness, SweepResult, SweepStatus, SweepStop};
pub use family::{
    classify_member, collar_length, contract_loop, cutoff, dichotomy_drive, family_flow_step, measure_zeta,
    Alternative, DichotomyReport, FamilyStepRecord, LoopFamily, MemberOutcome, SafetyViolation,
};
pub use grid::DistanceGrid;
pub use region::{audit_delta_convexity, AuditViolation, ConcaveRegion, ConvexityAudit, Indicator, RegionShape};
