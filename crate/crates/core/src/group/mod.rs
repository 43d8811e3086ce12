//! Finite groups by multiplication table: conjugate unions and coset actions,
//! conjugacy class maps, split sequences and a catalog of all groups of order up to 24.

mod audit;
mod catalog;
mod field;
mod hom;
mod report;
mod table;

pub use audit::{
    burnside_audit, conj_class_map, conjugate_union, coset_action, embed, in_conjugate_union, split_decompose,
    surjectivity_trichotomy, BurnsideReport, ClassMap, ConjugateUnion, CosetAction, Trichotomy,
};
pub use catalog::{catalog, sl2_f3, split_extensions, SplitSequence, CATALOG_MAX_ORDER, GROUP_COUNTS};
pub use field::{gl2_borel_coverage, BorelCoverage, FiniteField};
pub use hom::{automorphisms, extend_hom, find_isomorphism, is_isomorphic, GroupHom, SubgroupEmbedding};
pub use report::{audit_groups, GroupAuditReport, GroupSummary, PairRef};
pub use table::{FiniteGroup, MAX_ORDER};

#[cfg(test)]
mod tests;
