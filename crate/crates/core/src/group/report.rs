use num_rational::Ratio;
use serde::Serialize;

use super::audit::{
    burnside_audit, conj_class_map, conjugate_union, coset_action, split_decompose, surjectivity_trichotomy,
};
use super::catalog::{catalog, split_extensions, sl2_f3};
use super::field::{gl2_borel_coverage, BorelCoverage};
use super::hom::SubgroupEmbedding;
use super::table::FiniteGroup;
use crate::par::par_map;

/// A subgroup of a catalog group, by group name and subgroup elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRef {
    pub group: String,
    pub subgroup: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub name: String,
    pub order: usize,
    pub subgroups: usize,
    pub classes: usize,
}

/// Outcome of [`audit_groups`]. Every list of failures is empty on a passing audit.
#[derive(Debug, Clone, Serialize)]
pub struct GroupAuditReport {
    pub max_order: usize,
    pub groups: Vec<GroupSummary>,
    pub pairs: usize,
    /// Proper subgroups whose conjugates cover the group.
    pub coverage_violations: Vec<PairRef>,
    /// Pairs where class-map surjectivity and the conjugate-union criterion disagree.
    pub equivalence_mismatches: Vec<PairRef>,
    /// Coset actions whose average fixed-point count is not 1, that lack a fixed-point
    /// free element, or whose fixed-point free element lies in the conjugate union.
    pub burnside_failures: Vec<PairRef>,
    pub trichotomy_violations: Vec<PairRef>,
    /// Conjugacy-surjective fails while abelianized-surjective holds.
    pub conj_ab_gap: Option<PairRef>,
    /// A proper normal subgroup `H` with `H [G, G] = G`: onto the abelianization but
    /// not onto `G`.
    pub hom_ab_gap: Option<PairRef>,
    pub a4_in_a5_gap: bool,
    pub split_sequences: usize,
    pub split_failures: usize,
    pub borel: Vec<BorelCoverage>,
    pub passed: bool,
}

struct PairOutcome {
    covered: bool,
    mismatch: bool,
    burnside_bad: bool,
    trichotomy_bad: bool,
    conj_ab: bool,
    hom_ab: bool,
}

fn check_pair(g: &FiniteGroup, h: &[usize]) -> PairOutcome {
    let emb = SubgroupEmbedding::from_elements(g, h).expect("enumerated subgroup");
    let union = conjugate_union(&emb);
    let proper = emb.is_proper();
    let cm = conj_class_map(&emb.hom);
    let tri = surjectivity_trichotomy(&emb);
    let burnside_bad = proper && {
        match coset_action(&emb).and_then(|a| burnside_audit(&a)) {
            Ok(b) => {
                b.average_fixed_points != Ratio::from_integer(1)
                    || b.fixed_point_free.is_none_or(|x| union.elements.binary_search(&x).is_ok())
            }
            Err(_) => true,
        }
    };
    PairOutcome {
        covered: proper && union.covers,
        mismatch: !cm.agrees(),
        burnside_bad,
        trichotomy_bad: !tri.implications_hold(),
        conj_ab: !tri.conj_surjective && tri.abelianized_surjective,
        hom_ab: !tri.hom_surjective && tri.abelianized_surjective && emb.is_normal(),
    }
}

/// Every group of order `<= max_order` (capped at the catalog limit) plus `S4`, `A5`,
/// `Q8` and `SL(2,3)`, every subgroup of each, and the split sequences of the catalog.
pub fn audit_groups(max_order: usize) -> GroupAuditReport {
    let mut groups = catalog(max_order);
    let extras = [FiniteGroup::symmetric(4), FiniteGroup::alternating(5), FiniteGroup::quaternion(), sl2_f3()];
    for e in extras {
        if !groups.iter().any(|g| g.name() == e.name()) {
            groups.push(e);
        }
    }
    let subgroups: Vec<Vec<Vec<usize>>> = par_map(groups.len(), |i| groups[i].subgroups());
    let work: Vec<(usize, usize)> =
        subgroups.iter().enumerate().flat_map(|(i, s)| (0..s.len()).map(move |k| (i, k))).collect();
    let outcomes = par_map(work.len(), |w| {
        let (i, k) = work[w];
        check_pair(&groups[i], &subgroups[i][k])
    });
    let mut report = GroupAuditReport {
        max_order,
        groups: groups
            .iter()
            .zip(&subgroups)
            .map(|(g, s)| GroupSummary {
                name: g.name().into(),
                order: g.order(),
                subgroups: s.len(),
                classes: g.conjugacy_classes().0.len(),
            })
            .collect(),
        pairs: work.len(),
        coverage_violations: Vec::new(),
        equivalence_mismatches: Vec::new(),
        burnside_failures: Vec::new(),
        trichotomy_violations: Vec::new(),
        conj_ab_gap: None,
        hom_ab_gap: None,
        a4_in_a5_gap: false,
        split_sequences: 0,
        split_failures: 0,
        borel: Vec::new(),
        passed: false,
    };
    for (&(i, k), o) in work.iter().zip(&outcomes) {
        let pair = || PairRef { group: groups[i].name().into(), subgroup: subgroups[i][k].clone() };
        if o.covered {
            report.coverage_violations.push(pair());
        }
        if o.mismatch {
            report.equivalence_mismatches.push(pair());
        }
        if o.burnside_bad {
            report.burnside_failures.push(pair());
        }
        if o.trichotomy_bad {
            report.trichotomy_violations.push(pair());
        }
        if o.conj_ab && report.conj_ab_gap.is_none() {
            report.conj_ab_gap = Some(pair());
        }
        if o.hom_ab && report.hom_ab_gap.is_none() {
            report.hom_ab_gap = Some(pair());
        }
        if groups[i].name() == "A5" && subgroups[i][k].len() == 12 && o.conj_ab {
            report.a4_in_a5_gap = true;
        }
    }
    let base: Vec<FiniteGroup> = groups.iter().filter(|g| g.order() <= max_order.min(24)).cloned().collect();
    let seqs = split_extensions(&base, max_order.min(24));
    report.split_sequences = seqs.len();
    report.split_failures = par_map(seqs.len(), |s| split_decompose(&seqs[s]).is_err()).into_iter().filter(|&b| b).count();
    report.borel = [2, 3, 4, 5, 7, 8, 9].iter().map(|&q| gl2_borel_coverage(q).expect("supported field")).collect();
    report.passed = report.coverage_violations.is_empty()
        && report.equivalence_mismatches.is_empty()
        && report.burnside_failures.is_empty()
        && report.trichotomy_violations.is_empty()
        && report.conj_ab_gap.is_some()
        && report.hom_ab_gap.is_some()
        && report.a4_in_a5_gap
        && report.split_failures == 0
        && report.borel.iter().all(|b| b.coverage < Ratio::from_integer(1) && b.coverage == b.reducible_share);
    report
}
